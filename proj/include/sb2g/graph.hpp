#ifndef SB2G_GRAPH_HPP
#define SB2G_GRAPH_HPP

#include "sb2g/config.hpp"
#include "sb2g/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sb2g {

enum class BehaviorKind { coverage, search, inspect, climb };

/// Belief sets that gate edges. None of them refers to elapsed time.
enum class PredicateKind {
  search_ready,     // p(l) > 0.7 and std < 5 m
  confident,        // p(l) > 0.9, std < 1 m and E[d] < 2.5 m
  absent,           // p(l) < 0.2
  task_complete,    // target status resolved
  confidence_lost,  // outside the relaxed confident set
};

enum class Method { sb2g, coverage_inspect, coverage_only };

std::string to_string(BehaviorKind k);
std::string to_string(PredicateKind k);
std::string to_string(Method m);
BehaviorKind behavior_from_string(const std::string& s);
PredicateKind predicate_from_string(const std::string& s);
Method method_from_string(const std::string& s);  // throws UsageError

struct Edge {
  BehaviorKind from;
  BehaviorKind to;
  PredicateKind predicate;
  std::optional<Affordance> affordance;  // label affordance the target must have
  bool dismisses = false;
  int family = 0;  // 1-4 for the trigger families, 0 for the abort edges
};

struct BehaviorGraph {
  std::vector<BehaviorKind> nodes;
  std::vector<Edge> edges;  // priority order, first match wins
  BehaviorKind active = BehaviorKind::coverage;
  std::optional<ObjectId> target;
  SemanticClassId target_label;

  bool has_node(BehaviorKind k) const;
};

BehaviorGraph make_graph(Method method);

/// Values a predicate was evaluated on; logged with each transition so the
/// decision can be audited offline.
struct PredicateInputs {
  double probability = 0.0;
  double std = 0.0;
  double expected_distance = 0.0;
  bool resolved = false;
};

PredicateInputs predicate_inputs(const ObjectBelief& belief, SemanticClassId label, const RobotState& robot);
bool evaluate_predicate(PredicateKind kind, const PredicateInputs& in, const Thresholds& th);

/// Evaluates `kind` for the tracked object `id`; a missing track is false.
bool evaluate_predicate(PredicateKind kind, const GeoSemanticBelief& belief, ObjectId id, SemanticClassId label,
                        const Thresholds& th);

/// Task label a track most plausibly carries (argmax over labels that have
/// an affordance).
std::optional<SemanticClassId> expected_task_label(const ObjectBelief& belief, const LabelRegistry& labels);

/// Label the engaged target is pursued under. Search follows the track's
/// current expected task label; task behaviors keep the label they were
/// entered with.
SemanticClassId engaged_label(const BehaviorGraph& graph, const ObjectBelief& track, const LabelRegistry& labels);

struct Transition {
  int edge = -1;
  BehaviorKind from;
  BehaviorKind to;
  PredicateKind predicate;
  std::optional<ObjectId> target;
  SemanticClassId label;
  PredicateInputs inputs;
  bool dismiss = false;
};

/// Graph transition policy: the first edge out of the active node whose
/// predicate holds. Does not modify the graph.
std::optional<Transition> transition(const BehaviorGraph& graph, const GeoSemanticBelief& belief,
                                     const LabelRegistry& labels, const Thresholds& th);

void apply(BehaviorGraph& graph, const Transition& t);

}  // namespace sb2g

#endif  // SB2G_GRAPH_HPP
