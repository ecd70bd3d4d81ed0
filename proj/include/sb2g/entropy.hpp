#ifndef SB2G_ENTROPY_HPP
#define SB2G_ENTROPY_HPP

#include "sb2g/types.hpp"

namespace sb2g {

/// Shannon entropy in nats; zero-probability entries contribute nothing.
double categorical_entropy(const LabelVector& p);

/// Differential entropy of a 2-D Gaussian clamped below at zero.
double clamped_pose_entropy(const Mat2& cov);

/// H(labels) + lambda * clamped pose entropy.
double entropy_objective(const ObjectBelief& belief, double lambda);

/// Mean distance from `from` to a Gaussian position. The covariance is
/// treated as isotropic with variance tr(cov)/2, which makes the distance
/// Rice distributed.
double expected_distance(const Vec2& from, const Vec2& mean, const Mat2& cov);

}  // namespace sb2g

#endif  // SB2G_ENTROPY_HPP
