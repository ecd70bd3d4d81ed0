#include "sb2g/session.hpp"

#include <cmath>

namespace sb2g {

namespace {

double finite_number(const Json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number()) throw ProtocolError(key + ": expected a number");
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) throw ProtocolError(key + ": must be finite");
  return v;
}

}  // namespace

ClientMessage parse_client_message(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error&) {
    throw ProtocolError("message is not valid JSON");
  }
  return parse_client_message(j);
}

ClientMessage parse_client_message(const Json& j) {
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  if (!j.contains("type") || !j.at("type").is_string()) throw ProtocolError("type: expected a string");
  if (!j.contains("format_version") || !j.at("format_version").is_number_integer())
    throw ProtocolError("format_version: expected an integer");
  if (j.at("format_version").get<int>() != kProtocolVersion)
    throw ProtocolError("format_version: unsupported version " + j.at("format_version").dump());
  if (!j.contains("tick") || !j.at("tick").is_number_integer() || j.at("tick").get<long>() < 0)
    throw ProtocolError("tick: expected a non-negative integer");
  ClientMessage m;
  m.type = j.at("type").get<std::string>();
  m.tick = j.at("tick").get<long>();
  if (m.type == "cmd_vel") {
    m.velocity.vx = finite_number(j, "vx");
    m.velocity.vy = finite_number(j, "vy");
    m.velocity.omega = finite_number(j, "omega");
  } else if (m.type == "trigger_inspect") {
    if (!j.contains("object_id") || !j.at("object_id").is_number_integer())
      throw ProtocolError("object_id: expected an integer");
    m.object_id = j.at("object_id").get<int>();
  } else if (m.type == "set_gait") {
    if (!j.contains("mode") || !j.at("mode").is_string()) throw ProtocolError("mode: expected a string");
    try {
      m.gait = gait_from_string(j.at("mode").get<std::string>());
    } catch (const std::exception&) {
      throw ProtocolError("mode: expected walk or stair");
    }
  } else if (m.type != "start" && m.type != "pause") {
    throw ProtocolError("type: unknown message type '" + m.type + "'");
  }
  return m;
}

Json to_json(const ClientMessage& m) {
  Json j = {{"type", m.type}, {"format_version", kProtocolVersion}, {"tick", m.tick}};
  if (m.type == "cmd_vel") {
    j["vx"] = m.velocity.vx;
    j["vy"] = m.velocity.vy;
    j["omega"] = m.velocity.omega;
  } else if (m.type == "trigger_inspect") {
    j["object_id"] = m.object_id;
  } else if (m.type == "set_gait") {
    j["mode"] = to_string(m.gait);
  }
  return j;
}

// ---------------------------------------------------------------------------

void TeleopController::command(const ClientMessage& m) { pending_ = m; }

void TeleopController::hold() {
  pending_.reset();
  held_ = ControlInput{};
}

Decision TeleopController::decide(const TickView& view) {
  Decision d;
  d.behavior = "teleop";
  ControlInput u = held_;
  if (pending_) {
    const ClientMessage m = *pending_;
    pending_.reset();
    d.command = to_json(m);
    if (m.type == "cmd_vel") {
      held_ = m.velocity;
      held_.action = std::monostate{};
      u = held_;
    } else if (m.type == "trigger_inspect") {
      auto it = view.belief.objects.find(m.object_id);
      if (it != view.belief.objects.end()) {
        u.action = TriggerInspect{m.object_id, it->second.mean};
        d.target = m.object_id;
      }
    } else if (m.type == "set_gait") {
      u.action = SetGait{m.gait};
    }
  }
  d.u = clamp_to_limits(u, view.scenario.robot.limits, view.belief.robot.gait);
  return d;
}

namespace {

class CommandReplay : public Controller {
 public:
  explicit CommandReplay(const ParsedTrace& trace) {
    for (const auto& ev : trace.events)
      if (ev.at("kind").get<std::string>() == "command")
        commands_[ev.at("tick").get<long>()] = parse_client_message(ev.at("command"));
  }

  Decision decide(const TickView& view) override {
    auto it = commands_.find(view.tick);
    if (it != commands_.end()) teleop_.command(it->second);
    return teleop_.decide(view);
  }

 private:
  std::map<long, ClientMessage> commands_;
  TeleopController teleop_;
};

}  // namespace

RunResult replay_commands(const ParsedTrace& trace) {
  if (trace.header.at("method").get<std::string>() != "teleop")
    throw UsageError("command replay needs a teleop trace");
  CommandReplay controller(trace);
  return replay_with(trace, controller);
}

// ---------------------------------------------------------------------------

std::string to_string(SessionMode m) { return m == SessionMode::teleop ? "teleop" : "autonomous"; }

std::string to_string(SessionState s) {
  switch (s) {
    case SessionState::waiting: return "waiting";
    case SessionState::running: return "running";
    case SessionState::paused: return "paused";
    case SessionState::ended: return "ended";
  }
  return "unknown";
}

SessionMode session_mode_from_string(const std::string& s) {
  if (s == "teleop") return SessionMode::teleop;
  if (s == "autonomous") return SessionMode::autonomous;
  throw UsageError("unknown mode '" + s + "' (expected teleop or autonomous)");
}

Session::Session(WorldScenario scenario, SessionOptions options) : options_(options) {
  if (!(options_.budget > 0.0)) throw UsageError("budget must be positive");
  snapshot_ticks_ = std::max(1L, std::lround(scenario.tick_rate / kSnapshotRate));
  SimulationOptions sim;
  sim.method = options_.mode == SessionMode::teleop ? "teleop" : to_string(options_.method);
  sim.seed = options_.seed;
  sim.budget = options_.budget;
  sim.target_count = options_.target_count;
  sim_ = std::make_unique<Simulation>(std::move(scenario), sim);
  if (options_.mode == SessionMode::teleop) {
    auto t = std::make_unique<TeleopController>();
    teleop_ = t.get();
    controller_ = std::move(t);
  } else {
    controller_ = std::make_unique<GraphController>(options_.method, stream_seed(options_.seed, Stream::planner));
    state_ = SessionState::running;
  }
}

Json Session::message(const std::string& type) const {
  return {{"type", type}, {"format_version", kProtocolVersion}, {"tick", sim_->world().tick()}};
}

Json Session::state_event() const {
  Json j = message("event");
  j["kind"] = "state";
  j["state"] = to_string(state_);
  return j;
}

Json Session::session_end() const {
  Json j = message("session_end");
  j["reason"] = sim_->end_reason();
  j["t"] = sim_->world().time();
  j["inspected"] = sim_->inspected();
  j["path_length"] = sim_->world().path_length();
  j["score"] = sim_->score();
  j["trace_hash"] = sha256_hex(sim_->trace());
  return j;
}

void Session::set_state(SessionState s, std::vector<Json>& out) {
  if (s == state_) return;
  state_ = s;
  out.push_back(state_event());
}

std::optional<Json> Session::receive(const std::string& text) {
  auto error = [&](const std::string& what) {
    Json j = message("event");
    j["kind"] = "error";
    j["message"] = what;
    return j;
  };
  ClientMessage m;
  try {
    m = parse_client_message(text);
  } catch (const ProtocolError& e) {
    return error(e.what());
  }
  if (ended()) return error("session has ended");
  if (m.is_command()) {
    if (!teleop_) return error("commands are ignored in autonomous mode");
    pending_ = m;
  } else {
    requested_.push_back(m.type == "start" ? SessionState::running : SessionState::paused);
  }
  return std::nullopt;
}

std::optional<Json> Session::abort(const std::string& reason) {
  if (ended()) return std::nullopt;
  sim_->abort(reason);
  state_ = SessionState::ended;
  return session_end();
}

void Session::client_connected() {
  ++clients_;
  disconnected_for_ = 0.0;
}

void Session::client_disconnected() { clients_ = std::max(0, clients_ - 1); }

std::vector<Json> Session::advance() {
  std::vector<Json> out;
  if (ended()) return out;
  const double dt = sim_->scenario().dt();

  for (auto s : requested_) {
    if (s == SessionState::running && (state_ == SessionState::waiting || state_ == SessionState::paused)) {
      disconnect_pause_ = false;
      set_state(s, out);
    } else if (s == SessionState::paused && state_ == SessionState::running) {
      set_state(s, out);
    }
  }
  requested_.clear();

  if (teleop_ && clients_ == 0) {
    if (state_ == SessionState::running) {
      teleop_->hold();
      pending_.reset();
      disconnect_pause_ = true;
      disconnected_for_ = 0.0;
      set_state(SessionState::paused, out);
    } else if (state_ == SessionState::paused && disconnect_pause_) {
      disconnected_for_ += dt;
      if (disconnected_for_ >= options_.disconnect_timeout - 1e-9) {
        sim_->abort("disconnect_timeout");
        state_ = SessionState::ended;
        out.push_back(session_end());
        return out;
      }
    }
  }

  if (state_ == SessionState::running) {
    if (pending_ && teleop_) teleop_->command(*pending_);
    pending_.reset();
    for (auto& r : sim_->tick(*controller_)) {
      if (r.at("type") != "event") continue;
      Json j = std::move(r);
      j["format_version"] = kProtocolVersion;
      out.push_back(std::move(j));
    }
  }

  ++wall_ticks_;
  if (sim_->done()) {
    state_ = SessionState::ended;
    out.push_back(snapshot());
    out.push_back(session_end());
  } else if (wall_ticks_ % snapshot_ticks_ == 0) {
    out.push_back(snapshot());
  }
  return out;
}

Json Session::snapshot() const {
  const auto& sc = sim_->scenario();
  const auto& labels = sc.sensor.labels;
  const auto& belief = sim_->belief();
  const auto robot = belief.robot.as_state();
  Json j = message("snapshot");
  j["t"] = sim_->world().time();
  j["state"] = to_string(state_);
  j["mode"] = to_string(options_.mode);
  j["robot"] = {{"pose", {robot.position.x(), robot.position.y(), robot.heading}},
                {"position_std", std::sqrt(std::max(0.0, 0.5 * belief.robot.cov.topLeftCorner<2, 2>().trace()))},
                {"floor", robot.floor},
                {"gait", to_string(robot.gait)}};

  const auto& known = sim_->maps().known(robot.floor);
  const auto& covered = sim_->maps().coverage(robot.floor);
  const Cell lo = known.cell_of(robot.position - Vec2::Constant(kOccupancyWindow));
  const Cell hi = known.cell_of(robot.position + Vec2::Constant(kOccupancyWindow));
  const int x0 = std::clamp(lo.x, 0, known.width() - 1), x1 = std::clamp(hi.x, 0, known.width() - 1);
  const int y0 = std::clamp(lo.y, 0, known.height() - 1), y1 = std::clamp(hi.y, 0, known.height() - 1);
  Json rows = Json::array(), mask = Json::array();
  for (int y = y1; y >= y0; --y) {
    std::string row, cov;
    for (int x = x0; x <= x1; ++x) {
      const Cell c{x, y};
      switch (known.at(c)) {
        case CellState::free: row += '.'; break;
        case CellState::occupied: row += '#'; break;
        case CellState::stair: row += 'S'; break;
        case CellState::unknown: row += '?'; break;
      }
      cov += covered[known.index(c)] ? '1' : '0';
    }
    rows.push_back(row);
    mask.push_back(cov);
  }
  const Vec2 origin = known.origin() + known.cell_size() * Vec2(x0, y0);
  j["map"] = {{"floor", robot.floor},  {"cell_size", known.cell_size()}, {"origin", {origin.x(), origin.y()}},
              {"width", x1 - x0 + 1}, {"height", y1 - y0 + 1},           {"rows", rows},
              {"covered", mask}};

  Json obs = Json::array();
  for (const auto& z : sim_->observations()) obs.push_back(to_json(z, labels));
  j["observations"] = obs;
  Json beliefs = Json::array();
  for (const auto& [id, b] : belief.objects) beliefs.push_back(to_json(b, labels));
  j["beliefs"] = beliefs;
  j["status"] = {{"inspected", sim_->inspected()},
                 {"score", sim_->score()},
                 {"path_length", sim_->world().path_length()},
                 {"elapsed", sim_->world().time()},
                 {"budget", options_.budget}};
  return j;
}

}  // namespace sb2g
