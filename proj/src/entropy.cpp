#include "sb2g/entropy.hpp"

#include <cmath>

namespace sb2g {

double categorical_entropy(const LabelVector& p) {
  double h = 0.0;
  for (int i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) h -= p(i) * std::log(p(i));
  return h;
}

double clamped_pose_entropy(const Mat2& cov) {
  const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
  if (!(det > 0.0)) return 0.0;
  constexpr double k = 2.0 * std::numbers::pi * std::numbers::e;
  return std::max(0.0, 0.5 * std::log(k * k * det));
}

double entropy_objective(const ObjectBelief& belief, double lambda) {
  return categorical_entropy(belief.labels) + lambda * clamped_pose_entropy(belief.cov);
}

double expected_distance(const Vec2& from, const Vec2& mean, const Mat2& cov) {
  const double nu = (mean - from).norm();
  const double var = 0.5 * cov.trace();
  if (!(var > 0.0)) return nu;
  const double sigma = std::sqrt(var);
  const double a = nu * nu / (4.0 * var);
  if (a > 200.0) return nu + var / (2.0 * nu);
  // sigma * sqrt(pi/2) * L_{1/2}(-nu^2 / 2 sigma^2), with the exp(-a)
  // factor folded into the Bessel terms.
  const double e = std::exp(-a);
  const double i0 = e * std::cyl_bessel_i(0.0, a);
  const double i1 = e * std::cyl_bessel_i(1.0, a);
  const double x = 2.0 * a;
  return sigma * std::sqrt(std::numbers::pi / 2.0) * ((1.0 + x) * i0 + x * i1);
}

}  // namespace sb2g
