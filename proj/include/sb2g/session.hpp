#ifndef SB2G_SESSION_HPP
#define SB2G_SESSION_HPP

#include "sb2g/executor.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sb2g {

constexpr int kProtocolVersion = 1;
constexpr double kSnapshotRate = 10.0;
constexpr double kDefaultSessionBudget = 300.0;
constexpr double kDisconnectTimeout = 30.0;
constexpr double kOccupancyWindow = 8.0;  // half-width of the snapshot map window, metres

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A validated client->server message.
struct ClientMessage {
  std::string type;  // cmd_vel, trigger_inspect, set_gait, start, pause
  long tick = 0;
  ControlInput velocity;
  ObjectId object_id = 0;
  Gait gait = Gait::walk;

  bool is_command() const { return type == "cmd_vel" || type == "trigger_inspect" || type == "set_gait"; }
};

/// Throws ProtocolError naming the offending field.
ClientMessage parse_client_message(const std::string& text);
ClientMessage parse_client_message(const Json& j);
Json to_json(const ClientMessage& m);

/// Operator control: the last cmd_vel is held until replaced; inspect and
/// gait commands fire once.
class TeleopController : public Controller {
 public:
  /// Replaces any command not yet consumed.
  void command(const ClientMessage& m);
  void hold();
  Decision decide(const TickView& view) override;

 private:
  std::optional<ClientMessage> pending_;
  ControlInput held_;
};

/// Re-executes the operator commands logged in a teleop trace.
RunResult replay_commands(const ParsedTrace& trace);

enum class SessionMode { teleop, autonomous };
enum class SessionState { waiting, running, paused, ended };

std::string to_string(SessionMode m);
std::string to_string(SessionState s);
SessionMode session_mode_from_string(const std::string& s);  // throws UsageError

struct SessionOptions {
  SessionMode mode = SessionMode::teleop;
  Method method = Method::sb2g;  // autonomous mode
  std::uint64_t seed = 1;
  double budget = kDefaultSessionBudget;
  int target_count = -1;
  double disconnect_timeout = kDisconnectTimeout;
};

/// One simulator session, independent of the transport. The owner calls
/// advance() once per tick period of wall time and forwards client
/// messages through receive() between calls; both must come from the same
/// thread.
class Session {
 public:
  Session(WorldScenario scenario, SessionOptions options);

  /// Returns an error event for the sender when the message is rejected.
  std::optional<Json> receive(const std::string& text);
  void client_connected();
  void client_disconnected();

  /// Messages to broadcast after one tick period.
  std::vector<Json> advance();
  /// Ends the session early; returns the session_end message.
  std::optional<Json> abort(const std::string& reason);

  Json snapshot() const;
  SessionState state() const { return state_; }
  bool ended() const { return state_ == SessionState::ended; }
  long wall_ticks() const { return wall_ticks_; }
  int clients() const { return clients_; }
  const Simulation& simulation() const { return *sim_; }
  const SessionOptions& options() const { return options_; }
  /// Trace written so far.
  const std::string& trace() const { return sim_->trace(); }

 private:
  Json message(const std::string& type) const;
  Json state_event() const;
  Json session_end() const;
  void set_state(SessionState s, std::vector<Json>& out);

  SessionOptions options_;
  std::unique_ptr<Simulation> sim_;
  std::unique_ptr<Controller> controller_;
  TeleopController* teleop_ = nullptr;
  SessionState state_ = SessionState::waiting;
  std::optional<ClientMessage> pending_;
  std::vector<SessionState> requested_;
  int clients_ = 0;
  long wall_ticks_ = 0;
  long snapshot_ticks_ = 1;
  double disconnected_for_ = 0.0;
  bool disconnect_pause_ = false;
};

}  // namespace sb2g

#endif  // SB2G_SESSION_HPP
