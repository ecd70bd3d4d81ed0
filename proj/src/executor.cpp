#include "sb2g/executor.hpp"

#include "sb2g/entropy.hpp"
#include "sb2g/serialization.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace sb2g {

namespace {

Json event_record(long tick, const std::string& kind) {
  return {{"type", "event"}, {"tick", tick}, {"kind", kind}};
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_or_inf(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

void inflate_position(ObjectBelief& b, double variance) {
  b.cov(0, 0) = std::max(b.cov(0, 0), variance);
  b.cov(1, 1) = std::max(b.cov(1, 1), variance);
}

// A failed task leaves the track at least this uncertain (2.5 m std).
constexpr double kFailureVariance = 6.25;

Json status_map(const std::vector<ObjectTruth>& objects) {
  Json j = Json::object();
  for (const auto& o : objects) j[std::to_string(o.id)] = to_string(o.status);
  return j;
}

Json status_map(const std::map<ObjectId, ObjectBelief>& objects) {
  Json j = Json::object();
  for (const auto& [id, b] : objects) j[std::to_string(id)] = to_string(b.status);
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------

Json to_json(const Transition& t, const LabelRegistry& labels) {
  return {{"edge", t.edge},
          {"from", to_string(t.from)},
          {"to", to_string(t.to)},
          {"predicate", to_string(t.predicate)},
          {"target", t.target ? Json(*t.target) : Json(nullptr)},
          {"label", labels.at(t.label).name},
          {"p", t.inputs.probability},
          {"std", finite_or_null(t.inputs.std)},
          {"ed", finite_or_null(t.inputs.expected_distance)},
          {"resolved", t.inputs.resolved},
          {"dismiss", t.dismiss}};
}

Transition transition_from_json(const Json& j, const LabelRegistry& labels) {
  Transition t;
  t.edge = j.at("edge").get<int>();
  t.from = behavior_from_string(j.at("from").get<std::string>());
  t.to = behavior_from_string(j.at("to").get<std::string>());
  t.predicate = predicate_from_string(j.at("predicate").get<std::string>());
  if (!j.at("target").is_null()) t.target = j.at("target").get<int>();
  t.label = labels.require(j.at("label").get<std::string>());
  t.inputs.probability = j.at("p").get<double>();
  t.inputs.std = number_or_inf(j.at("std"));
  t.inputs.expected_distance = number_or_inf(j.at("ed"));
  t.inputs.resolved = j.at("resolved").get<bool>();
  t.dismiss = j.at("dismiss").get<bool>();
  return t;
}

// ---------------------------------------------------------------------------

GraphController::GraphController(Method method, std::uint64_t planner_seed)
    : graph_(make_graph(method)), planner_rng_(planner_seed) {}

void GraphController::reset_behaviors() {
  coverage_.reset();
  search_.reset();
  inspect_.reset();
  climb_.reset();
}

Decision GraphController::decide(const TickView& view) {
  const auto& sc = view.scenario;
  const auto& labels = sc.sensor.labels;
  Decision d;
  GeoSemanticBelief local = view.belief;

  for (int i = 0; i < kMaxChainedTransitions; ++i) {
    const auto t = transition(graph_, local, labels, sc.thresholds);
    if (!t) break;
    apply(graph_, *t);
    d.edits.emplace_back(*t);
    if (t->dismiss && t->target) {
      auto& track = local.objects.at(*t->target);
      if (!is_resolved(track.status)) track.status = advance_status(track.status, AffordanceStatus::dismissed);
    }
    if (graph_.target) {
      auto& track = local.objects.at(*graph_.target);
      const auto affordance = labels.at(graph_.target_label).affordance;
      const auto before = track.status;
      retarget_pending(track, affordance);
      if (track.status != before) d.edits.emplace_back(Retarget{track.id, affordance});
    }
    reset_behaviors();
  }

  const RobotState robot = local.robot.as_state();
  d.behavior = to_string(graph_.active);
  d.target = graph_.target;
  const ObjectBelief* target = graph_.target ? &local.objects.at(*graph_.target) : nullptr;
  switch (graph_.active) {
    case BehaviorKind::coverage: {
      const auto step = coverage_.step(robot, view.maps, sc.coverage, sc.robot.limits, view.time);
      d.u = step.u;
      if (step.complete) {
        d.edits.emplace_back(CoverageReset{robot.floor});
        coverage_.reset();
      }
      break;
    }
    case BehaviorKind::search: {
      auto step = search_.step(*target, engaged_label(graph_, *target, labels), robot, sc, view.maps, view.time, planner_rng_);
      d.u = step.u;
      if (step.replanned)
        d.plan = PlanInfo{step.plan.stats.nodes, step.plan.stats.pruned, step.plan.value, step.plan.best,
                          step.plan.recovery};
      break;
    }
    case BehaviorKind::inspect:
      d.u = inspect_.step(*target, labels.at(graph_.target_label).standoff, robot, sc, view.maps, view.time);
      break;
    case BehaviorKind::climb:
      d.u = climb_.step(*target, labels.at(graph_.target_label).standoff, robot, sc, view.maps, view.time);
      break;
  }
  if (graph_.active != BehaviorKind::climb && robot.gait == Gait::stair &&
      std::holds_alternative<std::monostate>(d.u.action))
    d.u.action = SetGait{Gait::walk};
  d.u = clamp_to_limits(d.u, sc.robot.limits, robot.gait);
  return d;
}

// ---------------------------------------------------------------------------

Decision SearchController::decide(const TickView& view) {
  Decision d;
  d.behavior = to_string(BehaviorKind::search);
  d.target = target_;
  auto it = view.belief.objects.find(target_);
  if (it == view.belief.objects.end()) return d;
  const auto& labels = view.scenario.sensor.labels;
  const auto label = expected_task_label(it->second, labels).value_or(SemanticClassId{0});
  auto step = search_.step(it->second, label, view.belief.robot.as_state(), view.scenario, view.maps, view.time,
                           planner_rng_);
  d.u = clamp_to_limits(step.u, view.scenario.robot.limits, view.belief.robot.gait);
  if (step.replanned)
    d.plan = PlanInfo{step.plan.stats.nodes, step.plan.stats.pruned, step.plan.value, step.plan.best,
                      step.plan.recovery};
  return d;
}

// ---------------------------------------------------------------------------

ReplayController::ReplayController(const ParsedTrace& trace) {
  const auto scenario = parse_scenario(trace.header.at("scenario"));
  const auto& labels = scenario.sensor.labels;
  std::size_t e = 0;
  for (const auto& rec : trace.ticks) {
    const long k = rec.at("tick").get<long>();
    Decision d;
    d.u = control_from_json(rec.at("u"), "u");
    d.behavior = rec.at("behavior").get<std::string>();
    if (!rec.at("target").is_null()) d.target = rec.at("target").get<int>();
    for (; e < trace.events.size() && trace.events[e].at("tick").get<long>() <= k; ++e) {
      const auto& ev = trace.events[e];
      if (ev.at("tick").get<long>() != k) continue;
      const auto kind = ev.at("kind").get<std::string>();
      if (kind == "transition") {
        d.edits.emplace_back(transition_from_json(ev, labels));
      } else if (kind == "retarget") {
        d.edits.emplace_back(Retarget{ev.at("object").get<int>(), affordance_from_string(ev.at("affordance"))});
      } else if (kind == "coverage_reset") {
        d.edits.emplace_back(CoverageReset{ev.at("floor").get<int>()});
      } else if (kind == "plan") {
        d.plan = PlanInfo{ev.at("nodes").get<long>(), ev.at("pruned").get<long>(), ev.at("value").get<double>(),
                          ev.at("best").get<int>(), ev.at("recovery").get<bool>()};
      }
    }
    if (static_cast<long>(decisions_.size()) != k - 1) throw ScenarioError("trace", "tick records out of sequence");
    decisions_.push_back(std::move(d));
  }
}

Decision ReplayController::decide(const TickView& view) {
  const auto i = static_cast<std::size_t>(view.tick - 1);
  if (i < decisions_.size()) return decisions_[i];
  Decision d;
  d.behavior = "replay";
  return d;
}

// ---------------------------------------------------------------------------

Simulation::Simulation(WorldScenario scenario, SimulationOptions options)
    : scenario_(std::make_unique<WorldScenario>(std::move(scenario))),
      options_(std::move(options)),
      rng_(options_.seed),
      world_(*scenario_),
      maps_(*scenario_),
      closest_(scenario_->objects.size()) {
  const auto& sc = *scenario_;
  frame_ticks_ = std::max(1, static_cast<int>(std::lround(sc.sensor.period * sc.tick_rate)));
  const auto& r = world_.robot();
  for (const auto& track : options_.prior_tracks) belief_.objects[track.id] = track;
  belief_.robot.mean = Vec3(r.position.x(), r.position.y(), r.heading);
  belief_.robot.floor = r.floor;
  belief_.robot.gait = r.gait;
  maps_.scan(sc.floor(r.floor), r.floor, r.position, sc.coverage.lidar_range);
  maps_.mark_covered(belief_.robot.as_state(), sc.sensor.fov_half_angle, sc.coverage.footprint_radius);
  closest_.update(r, world_.objects());

  Json prior = Json::array();
  for (const auto& track : options_.prior_tracks) prior.push_back(to_json(track, sc.sensor.labels));
  Json header = {{"type", "header"},
                 {"format_version", kTraceFormatVersion},
                 {"method", options_.method},
                 {"seed", options_.seed},
                 {"budget", options_.budget},
                 {"target_count", options_.target_count},
                 {"scenario", scenario_to_json(sc)},
                 {"prior", prior},
                 {"initial",
                  {{"inspected", inspected()}, {"closest_sum", closest_.sum()}, {"path_length", 0.0}, {"score", 0.0}}}};
  trace_.write(header);
}

int Simulation::inspected() const {
  int n = 0;
  for (const auto& o : world_.objects())
    if (o.status == AffordanceStatus::inspected || o.status == AffordanceStatus::ascended) ++n;
  return n;
}

double Simulation::score() const {
  RunTotals totals{world_.rewards(), world_.path_length(), world_.time(), world_.stair_failures()};
  return reward_cost(totals, scenario_->reward);
}

void Simulation::apply_edit(const Edit& edit, std::vector<Json>& records) {
  const long k = world_.tick() + 1;
  const auto& labels = scenario_->sensor.labels;
  if (const auto* t = std::get_if<Transition>(&edit)) {
    if (t->dismiss && t->target) {
      auto it = belief_.objects.find(*t->target);
      if (it != belief_.objects.end() && !is_resolved(it->second.status))
        it->second.status = advance_status(it->second.status, AffordanceStatus::dismissed);
    }
    Json j = event_record(k, "transition");
    j.update(to_json(*t, labels));
    records.push_back(j);
  } else if (const auto* r = std::get_if<Retarget>(&edit)) {
    auto it = belief_.objects.find(r->object);
    if (it != belief_.objects.end()) retarget_pending(it->second, r->affordance);
    Json j = event_record(k, "retarget");
    j["object"] = r->object;
    j["affordance"] = to_string(r->affordance);
    records.push_back(j);
  } else if (const auto* c = std::get_if<CoverageReset>(&edit)) {
    maps_.reset_coverage(c->floor);
    coverage_completed_ = true;
    Json j = event_record(k, "coverage_reset");
    j["floor"] = c->floor;
    records.push_back(j);
  }
}

void Simulation::handle_world_event(const WorldEvent& e, std::vector<Json>& records) {
  Json j = event_record(world_.tick(), to_string(e.kind));
  if (e.object >= 0) j["object"] = e.object;
  if (!e.detail.empty()) j["detail"] = e.detail;
  records.push_back(j);

  auto it = belief_.objects.find(e.object);
  if (it == belief_.objects.end()) return;
  auto& track = it->second;
  if (is_resolved(track.status)) return;
  switch (e.kind) {
    case WorldEvent::Kind::inspection_succeeded:
      retarget_pending(track, Affordance::inspect);
      track.status = advance_status(track.status, AffordanceStatus::inspected);
      break;
    case WorldEvent::Kind::ascended:
      retarget_pending(track, Affordance::ascend);
      track.status = advance_status(track.status, AffordanceStatus::ascended);
      break;
    case WorldEvent::Kind::inspection_failed:
    case WorldEvent::Kind::stair_failure:
      inflate_position(track, kFailureVariance);
      break;
    default:
      break;
  }
}

void Simulation::update_robot_belief(const ControlInput& u) {
  const auto& sc = *scenario_;
  const auto& truth = world_.robot();
  const Vec3 truth_pose(truth.position.x(), truth.position.y(), truth.heading);
  if (sc.robot.perfect_localization || truth.floor != belief_.robot.floor) {
    belief_.robot.mean = truth_pose;
    belief_.robot.cov.setZero();
  } else {
    const ControlInput uc = clamp_to_limits(u, sc.robot.limits, truth.gait);
    const Vec3 pred = propagate_pose(belief_.robot.mean, uc, sc.dt());
    belief_.robot.mean = pred;
    belief_.robot.mean(2) = wrap_angle(pred(2));
    belief_.robot.cov += sc.filter.process_noise * sc.dt();
    std::normal_distribution<double> n(0.0, sc.robot.localization_std);
    Vec3 fix = truth_pose;
    fix(0) += n(rng_.localization);
    fix(1) += n(rng_.localization);
    fix(2) = wrap_angle(fix(2) + n(rng_.localization));
    const double var = sc.robot.localization_std * sc.robot.localization_std;
    belief_.robot = localize(belief_.robot, fix, Vec3::Constant(var).asDiagonal());
  }
  belief_.robot.floor = truth.floor;
  belief_.robot.gait = truth.gait;
  belief_.time = world_.time();
}

void Simulation::sensor_frame(std::vector<Json>& records) {
  const auto& sc = *scenario_;
  const auto& truth = world_.robot();
  maps_.scan(sc.floor(truth.floor), truth.floor, truth.position, sc.coverage.lidar_range);
  observations_ = sample_observations(truth, world_.objects(), sc.sensor, &sc.floor(truth.floor),
                                      SensorStreams{rng_.detection, rng_.measurement});
  const RobotState robot = belief_.robot.as_state();
  std::vector<FilterEvent> events;
  belief_ = ingest(belief_, observations_, robot, sc.sensor, &maps_.known(robot.floor), sc.filter, &events);
  for (const auto& e : events) {
    Json j = event_record(world_.tick(), e.kind == FilterEvent::Kind::spawn ? "spawn" : "degenerate_reset");
    j["object"] = e.object;
    records.push_back(j);
  }
  maps_.mark_covered(robot, sc.sensor.fov_half_angle, sc.coverage.footprint_radius);
}

bool Simulation::terminal() const {
  if (options_.target_count >= 0 && world_.tasks_completed() >= options_.target_count) return true;
  const auto& labels = scenario_->sensor.labels;
  int tasks = 0;
  for (const auto& o : world_.objects()) {
    if (labels.at(o.label).affordance == Affordance::none) continue;
    ++tasks;
    if (is_resolved(o.status)) continue;
    auto it = belief_.objects.find(o.id);
    if (it != belief_.objects.end() && it->second.status == AffordanceStatus::dismissed) continue;
    return false;
  }
  return tasks > 0 || coverage_completed_;
}

Json Simulation::tick_record(const Decision& d) const {
  const auto& r = world_.robot();
  return {{"type", "tick"},
          {"tick", world_.tick()},
          {"t", world_.time()},
          {"pose", {r.position.x(), r.position.y(), r.heading}},
          {"floor", r.floor},
          {"gait", to_string(r.gait)},
          {"behavior", d.behavior},
          {"target", d.target ? Json(*d.target) : Json(nullptr)},
          {"u", to_json(d.u)},
          {"truth", status_map(world_.objects())},
          {"belief", status_map(belief_.objects)},
          {"inspected", inspected()},
          {"closest_sum", closest_.sum()},
          {"path_length", world_.path_length()},
          {"score", score()}};
}

void Simulation::finish(const std::string& reason, std::vector<Json>& records) {
  end_reason_ = reason;
  Json j = {{"type", "end"},
            {"tick", world_.tick()},
            {"t", world_.time()},
            {"reason", reason},
            {"inspected", inspected()},
            {"closest_sum", closest_.sum()},
            {"path_length", world_.path_length()},
            {"score", score()},
            {"stair_failures", world_.stair_failures()},
            {"tasks_completed", world_.tasks_completed()}};
  trace_.write(j);
  records.push_back(j);
}

void Simulation::abort(const std::string& reason) {
  if (done()) return;
  std::vector<Json> records;
  finish(reason, records);
}

std::vector<Json> Simulation::tick(Controller& controller) {
  std::vector<Json> records;
  if (done()) return records;
  const auto& sc = *scenario_;
  const long k = world_.tick() + 1;
  const TickView view{sc, belief_, maps_, k, world_.time()};
  const Decision d = controller.decide(view);
  for (const auto& e : d.edits) apply_edit(e, records);
  if (d.plan) {
    Json j = event_record(k, "plan");
    j["nodes"] = d.plan->nodes;
    j["pruned"] = d.plan->pruned;
    j["value"] = d.plan->value;
    j["best"] = d.plan->best;
    j["recovery"] = d.plan->recovery;
    records.push_back(j);
  }
  if (d.command) {
    Json j = event_record(k, "command");
    j["command"] = *d.command;
    records.push_back(j);
  }

  for (const auto& e : world_.step(d.u, sc.dt(), rng_.motion)) handle_world_event(e, records);
  update_robot_belief(d.u);
  if (k % frame_ticks_ == 0) sensor_frame(records);
  closest_.update(world_.robot(), world_.objects());
  records.push_back(tick_record(d));
  for (const auto& r : records) trace_.write(r);

  if (terminal())
    finish("complete", records);
  else if (world_.time() >= options_.budget - 1e-9)
    finish("budget", records);
  return records;
}

// ---------------------------------------------------------------------------

namespace {

RunResult result_of(const Simulation& sim) {
  RunResult r;
  r.trace = sim.trace();
  r.hash = sha256_hex(r.trace);
  r.reason = sim.end_reason();
  r.ticks = sim.world().tick();
  r.inspected = sim.inspected();
  r.closest_sum = sim.closest_sum();
  r.path_length = sim.world().path_length();
  r.score = sim.score();
  return r;
}

}  // namespace

RunResult run_episode(const WorldScenario& scenario, Method method, std::uint64_t seed, double budget) {
  SimulationOptions options;
  options.method = to_string(method);
  options.seed = seed;
  options.budget = budget;
  Simulation sim(scenario, options);
  GraphController controller(method, stream_seed(seed, Stream::planner));
  while (!sim.done()) sim.tick(controller);
  return result_of(sim);
}

SearchEpisode run_search_episode(const WorldScenario& scenario, const ObjectBelief& prior, std::uint64_t seed,
                                 double time_limit) {
  SimulationOptions options;
  options.method = "search";
  options.seed = seed;
  options.budget = time_limit;
  options.prior_tracks = {prior};
  Simulation sim(scenario, options);
  SearchController controller(prior.id, stream_seed(seed, Stream::planner));
  const auto& labels = scenario.sensor.labels;
  auto confident = [&] {
    const auto& track = sim.belief().objects.at(prior.id);
    const auto label = expected_task_label(track, labels).value_or(SemanticClassId{0});
    return evaluate_predicate(PredicateKind::confident, sim.belief(), prior.id, label, scenario.thresholds);
  };
  SearchEpisode out;
  out.initial_objective = entropy_objective(prior, scenario.planner.entropy_weight);
  while (!sim.done()) {
    sim.tick(controller);
    if (confident()) {
      out.reached = true;
      sim.abort("confident");
    }
  }
  out.time = sim.world().time();
  out.final_objective = entropy_objective(sim.belief().objects.at(prior.id), scenario.planner.entropy_weight);
  out.trace = sim.trace();
  return out;
}

RunResult replay_trace(const std::string& trace_text) {
  const auto parsed = parse_trace(trace_text);
  ReplayController controller(parsed);
  return replay_with(parsed, controller);
}

RunResult replay_with(const ParsedTrace& parsed, Controller& controller) {
  const auto& h = parsed.header;
  SimulationOptions options;
  options.method = h.at("method").get<std::string>();
  options.seed = h.at("seed").get<std::uint64_t>();
  options.budget = h.at("budget").get<double>();
  options.target_count = h.at("target_count").get<int>();
  auto scenario = parse_scenario(h.at("scenario"));
  for (const auto& p : h.at("prior")) options.prior_tracks.push_back(object_belief_from_json(p, scenario.sensor.labels));
  Simulation sim(std::move(scenario), options);
  long end_tick = -1;
  std::string end_reason;
  if (!parsed.end.is_null()) {
    end_tick = parsed.end.at("tick").get<long>();
    end_reason = parsed.end.at("reason").get<std::string>();
  }
  while (!sim.done()) {
    if (sim.world().tick() == end_tick && end_reason != "complete" && end_reason != "budget") {
      sim.abort(end_reason);
      break;
    }
    if (end_tick >= 0 && sim.world().tick() > end_tick) {
      sim.abort("replay_overrun");
      break;
    }
    sim.tick(controller);
  }
  return result_of(sim);
}

// ---------------------------------------------------------------------------

AuditReport audit_trace(const ParsedTrace& trace) {
  AuditReport report;
  const auto method_name = trace.header.at("method").get<std::string>();
  const auto scenario = parse_scenario(trace.header.at("scenario"));
  const auto& labels = scenario.sensor.labels;
  const bool graph_method = method_name != "teleop" && method_name != "search";
  BehaviorGraph graph;
  if (graph_method) graph = make_graph(method_from_string(method_name));

  auto flag = [&](long tick, const std::string& what) {
    report.violations.push_back("tick " + std::to_string(tick) + ": " + what);
  };

  BehaviorKind active = BehaviorKind::coverage;
  std::optional<ObjectId> target;
  std::set<ObjectId> resolved;
  std::size_t e = 0;
  for (const auto& rec : trace.ticks) {
    const long k = rec.at("tick").get<long>();
    for (; e < trace.events.size() && trace.events[e].at("tick").get<long>() <= k; ++e) {
      const auto& ev = trace.events[e];
      if (ev.at("kind").get<std::string>() != "transition") continue;
      ++report.transitions;
      if (!graph_method) {
        flag(k, "transition in a run without a behavior graph");
        continue;
      }
      Transition t;
      try {
        t = transition_from_json(ev, labels);
      } catch (const std::exception& ex) {
        flag(k, std::string("unreadable transition: ") + ex.what());
        continue;
      }
      if (t.edge < 0 || t.edge >= static_cast<int>(graph.edges.size())) {
        flag(k, "transition on a nonexistent edge");
        continue;
      }
      const auto& edge = graph.edges[static_cast<std::size_t>(t.edge)];
      if (edge.from != active || edge.from != t.from || edge.to != t.to || edge.predicate != t.predicate ||
          edge.dismisses != t.dismiss)
        flag(k, "transition does not match edge " + std::to_string(t.edge) + " out of " + to_string(active));
      if (edge.affordance && labels.at(t.label).affordance != *edge.affordance)
        flag(k, "transition label lacks the edge affordance");
      if (!evaluate_predicate(t.predicate, t.inputs, scenario.thresholds))
        flag(k, "predicate " + to_string(t.predicate) + " did not hold");
      if (t.to != BehaviorKind::coverage && t.target && t.target != target && resolved.count(*t.target))
        flag(k, "resolved object " + std::to_string(*t.target) + " engaged again");
      if (t.dismiss && t.target) resolved.insert(*t.target);
      active = t.to;
      target = t.to == BehaviorKind::coverage ? std::nullopt : t.target;
    }
    if (graph_method && rec.at("behavior").get<std::string>() != to_string(active))
      flag(k, "recorded behavior differs from the graph's active node");
    for (const auto& [id, status] : rec.at("belief").items())
      if (is_resolved(status_from_string(status.get<std::string>()))) resolved.insert(std::stoi(id));
  }
  return report;
}

}  // namespace sb2g
