#ifndef SB2G_SERVER_HPP
#define SB2G_SERVER_HPP

#include "sb2g/session.hpp"

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>

namespace sb2g {

struct ServerOptions {
  std::string host = "127.0.0.1";
  unsigned short port = 8765;  // 0 picks a free port
  double speed = 1.0;          // simulated seconds per wall second
  std::filesystem::path trace_out;
  bool handle_signals = false;  // SIGINT/SIGTERM end the session
};

/// WebSocket front end for a Session. Network I/O runs on its own thread;
/// every client message is queued and handed to the session by the tick
/// loop.
class SimServer {
 public:
  SimServer(Session& session, ServerOptions options);
  ~SimServer();
  SimServer(const SimServer&) = delete;
  SimServer& operator=(const SimServer&) = delete;

  /// Bound port, valid after construction.
  unsigned short port() const;
  /// Paces the session until it ends, then closes every connection.
  void run();
  /// Thread-safe request to end the session.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sb2g

#endif  // SB2G_SERVER_HPP
