#ifndef SB2G_EXECUTOR_HPP
#define SB2G_EXECUTOR_HPP

#include "sb2g/behaviors.hpp"
#include "sb2g/graph.hpp"
#include "sb2g/mapping.hpp"
#include "sb2g/metrics.hpp"
#include "sb2g/rng.hpp"
#include "sb2g/trace.hpp"
#include "sb2g/world.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sb2g {

struct Retarget {
  ObjectId object = 0;
  Affordance affordance = Affordance::inspect;
};

struct CoverageReset {
  int floor = 0;
};

/// Belief-side changes a controller requests along with its command. They
/// are applied to the shared belief in order, before the world steps.
using Edit = std::variant<Transition, Retarget, CoverageReset>;

struct PlanInfo {
  long nodes = 0;
  long pruned = 0;
  double value = 0.0;
  int best = 0;
  bool recovery = false;
};

struct Decision {
  ControlInput u;
  std::string behavior;
  std::optional<ObjectId> target;
  std::vector<Edit> edits;
  std::optional<PlanInfo> plan;
  std::optional<Json> command;  // operator command consumed this tick
};

/// Everything a controller may look at: the belief, the robot's own map
/// and the clock. Never ground truth.
struct TickView {
  const WorldScenario& scenario;
  const GeoSemanticBelief& belief;
  const MapKnowledge& maps;
  long tick = 0;  // tick about to be executed
  double time = 0.0;
};

class Controller {
 public:
  virtual ~Controller() = default;
  virtual Decision decide(const TickView& view) = 0;
};

/// Behavior-graph executive: transition policy, then the active node's
/// control law.
class GraphController : public Controller {
 public:
  GraphController(Method method, std::uint64_t planner_seed);
  Decision decide(const TickView& view) override;
  const BehaviorGraph& graph() const { return graph_; }

  // Transitions evaluated per tick before a behavior runs.
  static constexpr int kMaxChainedTransitions = 4;

 private:
  void reset_behaviors();

  BehaviorGraph graph_;
  std::mt19937_64 planner_rng_;
  CoveragePlanner coverage_;
  SearchBehavior search_;
  InspectBehavior inspect_;
  ClimbBehavior climb_;
};

/// Re-issues the decisions recorded in a trace.
class ReplayController : public Controller {
 public:
  explicit ReplayController(const ParsedTrace& trace);
  Decision decide(const TickView& view) override;

 private:
  std::vector<Decision> decisions_;
};

/// Runs active search on one fixed target without a behavior graph.
class SearchController : public Controller {
 public:
  SearchController(ObjectId target, std::uint64_t planner_seed) : target_(target), planner_rng_(planner_seed) {}
  Decision decide(const TickView& view) override;

 private:
  ObjectId target_;
  std::mt19937_64 planner_rng_;
  SearchBehavior search_;
};

struct SimulationOptions {
  std::string method;
  std::uint64_t seed = 1;
  double budget = 700.0;
  int target_count = -1;  // stop once this many tasks are done; -1 for all
  std::vector<ObjectBelief> prior_tracks;  // belief the run starts from
};

/// One run: ground truth, the robot's belief and maps, RNG streams and the
/// trace being written.
class Simulation {
 public:
  Simulation(WorldScenario scenario, SimulationOptions options);

  /// Executes one tick. Returns the trace records written by it.
  std::vector<Json> tick(Controller& controller);
  bool done() const { return !end_reason_.empty(); }
  /// Ends the run early; no-op once done.
  void abort(const std::string& reason);

  const WorldScenario& scenario() const { return *scenario_; }
  const World& world() const { return world_; }
  const GeoSemanticBelief& belief() const { return belief_; }
  const MapKnowledge& maps() const { return maps_; }
  const std::vector<Observation>& observations() const { return observations_; }
  const SimulationOptions& options() const { return options_; }
  const std::string& end_reason() const { return end_reason_; }
  int inspected() const;
  double closest_sum() const { return closest_.sum(); }
  double score() const;
  const std::string& trace() const { return trace_.text(); }

 private:
  void apply_edit(const Edit& e, std::vector<Json>& records);
  void handle_world_event(const WorldEvent& e, std::vector<Json>& records);
  void update_robot_belief(const ControlInput& u);
  void sensor_frame(std::vector<Json>& records);
  bool terminal() const;
  Json tick_record(const Decision& d) const;
  void finish(const std::string& reason, std::vector<Json>& records);

  std::unique_ptr<WorldScenario> scenario_;
  SimulationOptions options_;
  RngStreams rng_;
  World world_;
  MapKnowledge maps_;
  GeoSemanticBelief belief_;
  ClosestDistance closest_;
  std::vector<Observation> observations_;
  TraceWriter trace_;
  int frame_ticks_ = 5;
  bool coverage_completed_ = false;
  std::string end_reason_;
};

struct RunResult {
  std::string trace;
  std::string hash;
  std::string reason;
  long ticks = 0;
  int inspected = 0;
  double closest_sum = 0.0;
  double path_length = 0.0;
  double score = 0.0;
};

RunResult run_episode(const WorldScenario& scenario, Method method, std::uint64_t seed, double budget);

struct SearchEpisode {
  bool reached = false;  // target entered the confident set
  double time = 0.0;     // when it did, or when the episode ended
  double initial_objective = 0.0;
  double final_objective = 0.0;
  std::string trace;
};

/// Active search from `prior` until the confident set is reached or
/// `time_limit` seconds pass.
SearchEpisode run_search_episode(const WorldScenario& scenario, const ObjectBelief& prior, std::uint64_t seed,
                                 double time_limit);

/// Re-executes a trace from its header and recorded decisions.
RunResult replay_trace(const std::string& trace_text);

/// Re-executes the run described by a trace header with `controller`,
/// ending where the recorded run ended.
RunResult replay_with(const ParsedTrace& trace, Controller& controller);

// Trace (de)serialization of decision parts.
Json to_json(const Transition& t, const LabelRegistry& labels);
Transition transition_from_json(const Json& j, const LabelRegistry& labels);

struct AuditReport {
  int transitions = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks every transition in a trace against the method's edge set and the
/// logged predicate inputs, and that resolved objects are never engaged again.
AuditReport audit_trace(const ParsedTrace& trace);

}  // namespace sb2g

#endif  // SB2G_EXECUTOR_HPP
