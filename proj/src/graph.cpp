#include "sb2g/graph.hpp"

#include "sb2g/entropy.hpp"

#include <algorithm>
#include <limits>

namespace sb2g {

std::string to_string(BehaviorKind k) {
  switch (k) {
    case BehaviorKind::coverage: return "coverage";
    case BehaviorKind::search: return "search";
    case BehaviorKind::inspect: return "inspect";
    case BehaviorKind::climb: return "climb";
  }
  return "unknown";
}

std::string to_string(PredicateKind k) {
  switch (k) {
    case PredicateKind::search_ready: return "search_ready";
    case PredicateKind::confident: return "confident";
    case PredicateKind::absent: return "absent";
    case PredicateKind::task_complete: return "task_complete";
    case PredicateKind::confidence_lost: return "confidence_lost";
  }
  return "unknown";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::sb2g: return "sb2g";
    case Method::coverage_inspect: return "coverage-inspect";
    case Method::coverage_only: return "coverage-only";
  }
  return "unknown";
}

BehaviorKind behavior_from_string(const std::string& s) {
  for (auto k : {BehaviorKind::coverage, BehaviorKind::search, BehaviorKind::inspect, BehaviorKind::climb})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown behavior '" + s + "'");
}

PredicateKind predicate_from_string(const std::string& s) {
  for (auto k : {PredicateKind::search_ready, PredicateKind::confident, PredicateKind::absent,
                 PredicateKind::task_complete, PredicateKind::confidence_lost})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown predicate '" + s + "'");
}

Method method_from_string(const std::string& s) {
  for (auto m : {Method::sb2g, Method::coverage_inspect, Method::coverage_only})
    if (to_string(m) == s) return m;
  throw UsageError("unknown method '" + s + "' (expected sb2g, coverage-inspect or coverage-only)");
}

bool BehaviorGraph::has_node(BehaviorKind k) const { return std::find(nodes.begin(), nodes.end(), k) != nodes.end(); }

BehaviorGraph make_graph(Method method) {
  using B = BehaviorKind;
  using P = PredicateKind;
  BehaviorGraph g;
  g.active = B::coverage;
  switch (method) {
    case Method::sb2g:
      g.nodes = {B::coverage, B::search, B::inspect, B::climb};
      g.edges = {
          {B::search, B::inspect, P::confident, Affordance::inspect, false, 1},
          {B::search, B::climb, P::confident, Affordance::ascend, false, 1},
          {B::search, B::coverage, P::absent, std::nullopt, true, 2},
          {B::coverage, B::search, P::search_ready, std::nullopt, false, 3},
          {B::inspect, B::coverage, P::task_complete, std::nullopt, false, 4},
          {B::climb, B::coverage, P::task_complete, std::nullopt, false, 4},
          {B::inspect, B::search, P::confidence_lost, std::nullopt, false, 0},
          {B::climb, B::search, P::confidence_lost, std::nullopt, false, 0},
      };
      break;
    case Method::coverage_inspect:
      g.nodes = {B::coverage, B::inspect, B::climb};
      g.edges = {
          {B::coverage, B::inspect, P::confident, Affordance::inspect, false, 3},
          {B::coverage, B::climb, P::confident, Affordance::ascend, false, 3},
          {B::inspect, B::coverage, P::task_complete, std::nullopt, false, 4},
          {B::climb, B::coverage, P::task_complete, std::nullopt, false, 4},
          {B::inspect, B::coverage, P::confidence_lost, std::nullopt, false, 0},
          {B::climb, B::coverage, P::confidence_lost, std::nullopt, false, 0},
      };
      break;
    case Method::coverage_only:
      g.nodes = {B::coverage};
      break;
  }
  return g;
}

PredicateInputs predicate_inputs(const ObjectBelief& belief, SemanticClassId label, const RobotState& robot) {
  PredicateInputs in;
  in.probability = belief.probability(label);
  in.std = belief.position_std();
  in.expected_distance = belief.floor == robot.floor ? expected_distance(robot.position, belief.mean, belief.cov)
                                                     : std::numeric_limits<double>::infinity();
  in.resolved = is_resolved(belief.status);
  return in;
}

bool evaluate_predicate(PredicateKind kind, const PredicateInputs& in, const Thresholds& th) {
  switch (kind) {
    case PredicateKind::search_ready:
      return !in.resolved && in.probability > th.search_probability && in.std < th.search_std;
    case PredicateKind::confident:
      return !in.resolved && in.probability > th.confident_probability && in.std < th.confident_std &&
             in.expected_distance < th.confident_distance;
    case PredicateKind::absent:
      return in.probability < th.absent_probability;
    case PredicateKind::task_complete:
      return in.resolved;
    case PredicateKind::confidence_lost:
      return !(in.probability > th.search_probability && in.std < th.abort_std_factor * th.confident_std);
  }
  return false;
}

bool evaluate_predicate(PredicateKind kind, const GeoSemanticBelief& belief, ObjectId id, SemanticClassId label,
                        const Thresholds& th) {
  auto it = belief.objects.find(id);
  if (it == belief.objects.end()) return false;
  return evaluate_predicate(kind, predicate_inputs(it->second, label, belief.robot.as_state()), th);
}

std::optional<SemanticClassId> expected_task_label(const ObjectBelief& belief, const LabelRegistry& labels) {
  std::optional<SemanticClassId> best;
  double best_p = -1.0;
  for (int l = 0; l < labels.size(); ++l) {
    const SemanticClassId id{l};
    if (labels.at(id).affordance == Affordance::none) continue;
    if (belief.labels(l) > best_p) {
      best_p = belief.labels(l);
      best = id;
    }
  }
  return best;
}

SemanticClassId engaged_label(const BehaviorGraph& graph, const ObjectBelief& track, const LabelRegistry& labels) {
  if (graph.active == BehaviorKind::search)
    if (const auto l = expected_task_label(track, labels)) return *l;
  return graph.target_label;
}

std::optional<Transition> transition(const BehaviorGraph& graph, const GeoSemanticBelief& belief,
                                     const LabelRegistry& labels, const Thresholds& th) {
  const RobotState robot = belief.robot.as_state();
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& edge = graph.edges[e];
    if (edge.from != graph.active) continue;
    Transition t;
    t.edge = static_cast<int>(e);
    t.from = edge.from;
    t.to = edge.to;
    t.predicate = edge.predicate;
    t.dismiss = edge.dismisses;

    if (graph.target) {
      auto it = belief.objects.find(*graph.target);
      if (it == belief.objects.end()) continue;
      const SemanticClassId label = engaged_label(graph, it->second, labels);
      if (edge.affordance && labels.at(label).affordance != *edge.affordance) continue;
      t.target = graph.target;
      t.label = label;
      t.inputs = predicate_inputs(it->second, label, robot);
      if (evaluate_predicate(edge.predicate, t.inputs, th)) return t;
      continue;
    }

    // Engage a new target: highest label probability, then nearest.
    std::optional<Transition> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& [id, track] : belief.objects) {
      if (track.floor != robot.floor || is_resolved(track.status)) continue;
      const auto label = expected_task_label(track, labels);
      if (!label) continue;
      if (edge.affordance && labels.at(*label).affordance != *edge.affordance) continue;
      const auto in = predicate_inputs(track, *label, robot);
      if (!evaluate_predicate(edge.predicate, in, th)) continue;
      const double d = (track.mean - robot.position).norm();
      if (!best || in.probability > best->inputs.probability ||
          (in.probability == best->inputs.probability && d < best_d)) {
        best = t;
        best->target = id;
        best->label = *label;
        best->inputs = in;
        best_d = d;
      }
    }
    if (best) return best;
  }
  return std::nullopt;
}

void apply(BehaviorGraph& graph, const Transition& t) {
  graph.active = t.to;
  if (t.to == BehaviorKind::coverage) {
    graph.target.reset();
  } else {
    graph.target = t.target;
    graph.target_label = t.label;
  }
}

}  // namespace sb2g
