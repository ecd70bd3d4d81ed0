#include "sb2g/server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

namespace sb2g {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

struct Connection;

struct Inbound {
  enum class Kind { connected, message, disconnected } kind;
  std::shared_ptr<Connection> from;
  std::string text;
};

class InboundQueue {
 public:
  void push(Inbound in) {
    std::lock_guard lock(mutex_);
    items_.push_back(std::move(in));
  }
  std::vector<Inbound> drain() {
    std::lock_guard lock(mutex_);
    std::vector<Inbound> out(std::make_move_iterator(items_.begin()), std::make_move_iterator(items_.end()));
    items_.clear();
    return out;
  }

 private:
  std::mutex mutex_;
  std::deque<Inbound> items_;
};

struct Connection : std::enable_shared_from_this<Connection> {
  Connection(tcp::socket socket, InboundQueue& queue) : ws(std::move(socket)), inbound(queue) {}

  void start() {
    ws.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws.async_accept(beast::bind_front_handler(&Connection::on_accept, shared_from_this()));
  }

  void on_accept(beast::error_code ec) {
    if (ec) return;
    open = true;
    inbound.push({Inbound::Kind::connected, shared_from_this(), {}});
    read();
  }

  void read() {
    ws.async_read(buffer, beast::bind_front_handler(&Connection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      if (open) inbound.push({Inbound::Kind::disconnected, shared_from_this(), {}});
      open = false;
      return;
    }
    inbound.push({Inbound::Kind::message, shared_from_this(), beast::buffers_to_string(buffer.data())});
    buffer.consume(buffer.size());
    read();
  }

  // Called from any thread.
  void send(std::shared_ptr<const std::string> text) {
    asio::post(ws.get_executor(), [self = shared_from_this(), text] {
      self->outbox.push_back(text);
      if (self->outbox.size() == 1) self->write();
    });
  }

  void write() {
    ws.text(true);
    ws.async_write(asio::buffer(*outbox.front()),
                   beast::bind_front_handler(&Connection::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      outbox.clear();
      return;
    }
    outbox.pop_front();
    if (!outbox.empty()) write();
  }

  void close() {
    asio::post(ws.get_executor(), [self = shared_from_this()] {
      if (!self->ws.is_open()) return;
      self->ws.async_close(websocket::close_code::normal, [self](beast::error_code) {});
    });
  }

  websocket::stream<beast::tcp_stream> ws;
  InboundQueue& inbound;
  beast::flat_buffer buffer;
  std::deque<std::shared_ptr<const std::string>> outbox;
  bool open = false;
};

}  // namespace

struct SimServer::Impl {
  Impl(Session& s, ServerOptions o)
      : session(s), options(std::move(o)), acceptor(io), signals(io) {
    if (!(options.speed > 0.0)) throw UsageError("speed must be positive");
    const tcp::endpoint endpoint(asio::ip::make_address(options.host), options.port);
    acceptor.open(endpoint.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(endpoint);
    acceptor.listen();
    bound_port = acceptor.local_endpoint().port();
    if (options.handle_signals) {
      signals.add(SIGINT);
      signals.add(SIGTERM);
      signals.async_wait([this](beast::error_code ec, int) {
        if (!ec) stopping = true;
      });
    }
    accept();
    io_thread = std::thread([this] { io.run(); });
  }

  ~Impl() {
    io.stop();
    if (io_thread.joinable()) io_thread.join();
  }

  void accept() {
    acceptor.async_accept(asio::make_strand(io), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<Connection>(std::move(socket), inbound)->start();
      accept();
    });
  }

  void send(const std::shared_ptr<Connection>& c, const Json& j) {
    c->send(std::make_shared<const std::string>(j.dump()));
  }

  void broadcast(const Json& j) {
    auto text = std::make_shared<const std::string>(j.dump());
    for (const auto& c : clients) c->send(text);
  }

  void drain() {
    for (auto& in : inbound.drain()) {
      switch (in.kind) {
        case Inbound::Kind::connected:
          clients.insert(in.from);
          session.client_connected();
          send(in.from, session.snapshot());
          break;
        case Inbound::Kind::message:
          if (auto err = session.receive(in.text)) send(in.from, *err);
          break;
        case Inbound::Kind::disconnected:
          if (clients.erase(in.from)) session.client_disconnected();
          break;
      }
    }
  }

  void run() {
    using clock = std::chrono::steady_clock;
    const auto period = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(session.simulation().scenario().dt() / options.speed));
    auto next = clock::now();
    while (!session.ended()) {
      drain();
      if (stopping) {
        if (auto end = session.abort("stopped")) broadcast(*end);
        break;
      }
      for (const auto& m : session.advance()) broadcast(m);
      next += period;
      std::this_thread::sleep_until(next);
    }
    if (!options.trace_out.empty()) write_text(options.trace_out, session.trace());
    // Let queued frames go out before closing.
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    for (const auto& c : clients) c->close();
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    asio::post(io, [this] {
      beast::error_code ec;
      acceptor.close(ec);
      signals.cancel(ec);
    });
  }

  Session& session;
  ServerOptions options;
  asio::io_context io;
  tcp::acceptor acceptor;
  asio::signal_set signals;
  InboundQueue inbound;
  std::set<std::shared_ptr<Connection>> clients;  // tick-loop thread only
  unsigned short bound_port = 0;
  std::atomic<bool> stopping{false};
  std::thread io_thread;
};

SimServer::SimServer(Session& session, ServerOptions options)
    : impl_(std::make_unique<Impl>(session, std::move(options))) {}

SimServer::~SimServer() = default;

unsigned short SimServer::port() const { return impl_->bound_port; }

void SimServer::run() { impl_->run(); }

void SimServer::stop() { impl_->stopping = true; }

}  // namespace sb2g
