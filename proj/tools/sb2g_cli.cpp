#include "sb2g/experiment.hpp"
#include "sb2g/scenario.hpp"
#include "sb2g/server.hpp"
#include "sb2g/session.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace sb2g;

namespace {

constexpr int kExitUsage = 2;

struct RunArgs {
  std::string scenario;
  std::string method;
  std::string seeds;
  double budget = -1.0;
  std::string out;
  int workers = 0;
};

struct CompareArgs {
  std::vector<std::string> dirs;
  bool strict = false;
};

struct ReplayArgs {
  std::string trace;
};

struct AuditArgs {
  std::vector<std::string> traces;
};

struct ServeArgs {
  std::string scenario;
  std::string mode = "teleop";
  std::string method = "sb2g";
  std::string host = "127.0.0.1";
  int port = 8765;
  double budget = kDefaultSessionBudget;
  std::uint64_t seed = 1;
  int target_count = -1;
  double speed = 1.0;
  std::string trace_out;
};

int cmd_run(const RunArgs& a) {
  const Method method = method_from_string(a.method);
  const auto seeds = parse_seeds(a.seeds);
  if (a.budget != -1.0 && !(a.budget > 0.0)) throw UsageError("--budget must be positive");
  const auto scenario = load_scenario(a.scenario);
  const double budget = a.budget > 0.0 ? a.budget : scenario.budget;
  const auto result = run_experiment(scenario, method, seeds, budget, a.out, a.workers);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& r = result.runs[i];
    std::cout << result.method << " seed " << seeds[i] << ": inspected " << r.inspected << ", score "
              << format_number(r.score) << ", " << r.reason << " at tick " << r.ticks << '\n';
  }
  std::cout << "wrote " << seeds.size() << " traces, runs.csv and summary.csv to " << a.out << '\n';
  return 0;
}

int cmd_compare(const CompareArgs& a) {
  std::vector<RunSet> sets;
  for (const auto& d : a.dirs) sets.push_back(load_run_set(d));
  std::map<std::string, int> uses;
  for (const auto& s : sets) ++uses[s.name];
  for (std::size_t i = 0; i < sets.size(); ++i)
    if (uses[sets[i].name] > 1) sets[i].name = a.dirs[i];
  std::cout << format_report(compare(sets, a.strict));
  return 0;
}

int cmd_replay(const ReplayArgs& a) {
  const auto text = read_text(a.trace);
  const auto parsed = parse_trace(text);
  const bool teleop = parsed.header.at("method").get<std::string>() == "teleop";
  const RunResult r = teleop ? replay_commands(parsed) : replay_trace(text);
  const std::string recorded = sha256_hex(text);
  std::cout << (teleop ? "command log" : "decision") << " replay: inspected " << r.inspected << ", score "
            << format_number(r.score) << ", " << r.reason << " at tick " << r.ticks << '\n';
  std::cout << "recorded " << recorded << "\nreplayed " << r.hash << '\n';
  if (r.hash != recorded) {
    std::cout << "replay diverged\n";
    return 1;
  }
  std::cout << "identical\n";
  return 0;
}

int cmd_audit(const AuditArgs& a) {
  int bad = 0;
  for (const auto& path : a.traces) {
    const auto text = read_text(path);
    const auto schema = validate_trace(text);
    const auto report = schema.empty() ? audit_trace(parse_trace(text)) : AuditReport{};
    std::cout << path << ": " << report.transitions << " transitions, " << schema.size() << " schema errors, "
              << report.violations.size() << " violations\n";
    for (const auto& e : schema) std::cout << "  schema: " << e << '\n';
    for (const auto& v : report.violations) std::cout << "  " << v << '\n';
    if (!schema.empty() || !report.ok()) ++bad;
  }
  return bad ? 1 : 0;
}

int cmd_serve(const ServeArgs& a) {
  if (a.port < 0 || a.port > 65535) throw UsageError("--port must be in 0..65535");
  SessionOptions options;
  options.mode = session_mode_from_string(a.mode);
  options.method = method_from_string(a.method);
  options.seed = a.seed;
  options.budget = a.budget;
  options.target_count = a.target_count;
  Session session(load_scenario(a.scenario), options);
  ServerOptions server_options;
  server_options.host = a.host;
  server_options.port = static_cast<unsigned short>(a.port);
  server_options.speed = a.speed;
  server_options.trace_out = a.trace_out;
  server_options.handle_signals = true;
  SimServer server(session, server_options);
  std::cout << "listening on ws://" << a.host << ':' << server.port() << " (" << a.mode << ")" << std::endl;
  server.run();
  std::cout << "session ended: " << session.simulation().end_reason() << ", inspected "
            << session.simulation().inspected() << '\n';
  if (!a.trace_out.empty()) std::cout << "trace written to " << a.trace_out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SB2G belief-space inspection planner and simulator"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one method over a seed range");
  run_cmd->add_option("--scenario", run.scenario, "Scenario JSON file")->required();
  run_cmd->add_option("--method", run.method, "sb2g, coverage-inspect or coverage-only")->required();
  run_cmd->add_option("--seeds", run.seeds, "Seed range a..b")->required();
  run_cmd->add_option("--budget", run.budget, "Time budget in seconds (default: the scenario's)");
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  run_cmd->add_option("--workers", run.workers, "Worker threads (default: $SB2G_WORKERS or all cores)");

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Paired comparison of run directories");
  cmp_cmd->add_option("--in", cmp.dirs, "Run directories")->required();
  cmp_cmd->add_flag("--strict", cmp.strict, "Reject single-seed comparisons");

  ReplayArgs rep;
  auto* rep_cmd = app.add_subcommand("replay", "Re-execute a trace and check it reproduces");
  rep_cmd->add_option("--trace", rep.trace, "Trace file")->required();

  AuditArgs aud;
  auto* aud_cmd = app.add_subcommand("audit", "Validate traces and audit their transitions");
  aud_cmd->add_option("--trace", aud.traces, "Trace files")->required();

  ServeArgs srv;
  auto* srv_cmd = app.add_subcommand("serve", "Serve a live session over WebSocket");
  srv_cmd->add_option("--scenario", srv.scenario, "Scenario JSON file")->required();
  srv_cmd->add_option("--mode", srv.mode, "teleop or autonomous");
  srv_cmd->add_option("--method", srv.method, "Method driving autonomous sessions");
  srv_cmd->add_option("--host", srv.host, "Address to bind");
  srv_cmd->add_option("--port", srv.port, "Port, 0 for any free port");
  srv_cmd->add_option("--budget", srv.budget, "Session length in simulated seconds");
  srv_cmd->add_option("--seed", srv.seed, "Simulation seed");
  srv_cmd->add_option("--target-count", srv.target_count, "End once this many tasks are done");
  srv_cmd->add_option("--speed", srv.speed, "Simulated seconds per wall-clock second");
  srv_cmd->add_option("--trace-out", srv.trace_out, "Where to write the session trace");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*cmp_cmd) return cmd_compare(cmp);
    if (*rep_cmd) return cmd_replay(rep);
    if (*aud_cmd) return cmd_audit(aud);
    if (*srv_cmd) return cmd_serve(srv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
