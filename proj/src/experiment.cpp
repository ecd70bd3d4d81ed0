#include "sb2g/experiment.hpp"

#include "sb2g/metrics.hpp"
#include "sb2g/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace sb2g {

namespace {

std::uint64_t parse_seed(const std::string& s, const std::string& whole) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw UsageError("bad seed range '" + whole + "' (expected a..b)");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw UsageError("seed out of range in '" + whole + "'");
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  const auto dots = text.find("..");
  std::uint64_t first, last;
  if (dots == std::string::npos) {
    first = last = parse_seed(text, text);
  } else {
    first = parse_seed(text.substr(0, dots), text);
    last = parse_seed(text.substr(dots + 2), text);
  }
  if (last < first) throw UsageError("empty seed range '" + text + "'");
  if (last - first >= 100000) throw UsageError("seed range '" + text + "' is too large");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = first; s <= last; ++s) seeds.push_back(s);
  return seeds;
}

int worker_count() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string(kWorkersEnv) + " must be a positive integer, got '" + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentResult run_experiment(const WorldScenario& scenario, Method method, const std::vector<std::uint64_t>& seeds,
                                double budget, const std::filesystem::path& out, int workers) {
  if (seeds.empty()) throw UsageError("no seeds given");
  if (!(budget > 0.0)) throw UsageError("budget must be positive");
  ExperimentResult result;
  result.method = to_string(method);
  result.seeds = seeds;
  result.runs.resize(seeds.size());

  if (workers <= 0) workers = worker_count();
  workers = std::min<int>(workers, static_cast<int>(seeds.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        result.runs[i] = run_episode(scenario, method, seeds[i], budget);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<ParsedTrace> parsed;
  for (const auto& r : result.runs) parsed.push_back(parse_trace(r.trace));
  result.summary = summary_csv(result.method, parsed, kSummaryStep);
  result.runs_table = runs_csv(result.method, seeds, result.runs);

  if (!out.empty()) {
    std::filesystem::create_directories(out);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const std::string stem = "seed-" + std::to_string(seeds[i]);
      write_text(out / (stem + ".jsonl"), result.runs[i].trace);
      write_text(out / (stem + ".csv"), series_csv(parsed[i], kSummaryStep));
    }
    write_text(out / "runs.csv", result.runs_table);
    write_text(out / "summary.csv", result.summary);
  }
  return result;
}

std::string runs_csv(const std::string& method, const std::vector<std::uint64_t>& seeds,
                     const std::vector<RunResult>& runs) {
  std::ostringstream out;
  out << "format_version,method,seed,reason,ticks,inspected,closest_sum,path_length,score,hash\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    out << kTraceFormatVersion << ',' << method << ',' << seeds[i] << ',' << r.reason << ',' << r.ticks << ','
        << r.inspected << ',' << format_number(r.closest_sum) << ',' << format_number(r.path_length) << ','
        << format_number(r.score) << ',' << r.hash << '\n';
  }
  return out.str();
}

std::vector<RunRow> parse_runs_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("format_version,method,seed,", 0) != 0)
    throw UsageError("runs.csv: missing header");
  std::vector<RunRow> rows;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    const std::string where = "runs.csv line " + std::to_string(n);
    if (f.size() != 10) throw UsageError(where + ": expected 10 columns");
    if (f[0] != std::to_string(kTraceFormatVersion)) throw UsageError(where + ": unsupported format_version " + f[0]);
    try {
      RunRow r;
      r.method = f[1];
      r.seed = std::stoull(f[2]);
      r.reason = f[3];
      r.ticks = std::stol(f[4]);
      r.inspected = std::stoi(f[5]);
      r.closest_sum = std::stod(f[6]);
      r.path_length = std::stod(f[7]);
      r.score = std::stod(f[8]);
      r.hash = f[9];
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw UsageError(where + ": malformed number");
    }
  }
  return rows;
}

std::string series_csv(const ParsedTrace& trace, double step) {
  std::ostringstream out;
  out << "format_version,t,inspected,closest_sum,path_length,score\n";
  const double budget = trace.header.at("budget").get<double>();
  for (const auto& s : resample(trace_samples(trace), step, budget))
    out << kTraceFormatVersion << ',' << format_number(s.t) << ',' << s.inspected << ','
        << format_number(s.closest_sum) << ',' << format_number(s.path_length) << ',' << format_number(s.score)
        << '\n';
  return out.str();
}

RunSet load_run_set(const std::filesystem::path& dir) {
  const auto path = dir / "runs.csv";
  if (!std::filesystem::exists(path)) throw UsageError("no runs.csv in '" + dir.string() + "'");
  RunSet set;
  set.rows = parse_runs_csv(read_text(path));
  if (set.rows.empty()) throw UsageError("'" + path.string() + "' has no runs");
  set.name = set.rows.front().method;
  for (const auto& r : set.rows)
    if (r.method != set.name) throw UsageError("'" + path.string() + "' mixes methods");
  return set;
}

namespace {

PairedMetric paired(const std::vector<double>& a, const std::vector<double>& b, int required) {
  PairedMetric m;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    m.deltas.push_back(d);
    m.mean_delta += d;
    if (d > 0.0) ++m.first_wins;
    if (d < 0.0) ++m.second_wins;
  }
  m.mean_delta /= static_cast<double>(a.size());
  if (m.first_wins >= required) m.ordering = Ordering::first_better;
  if (m.second_wins >= required) m.ordering = Ordering::second_better;
  return m;
}

}  // namespace

CompareReport compare(const std::vector<RunSet>& sets, bool strict) {
  if (sets.size() < 2) throw UsageError("compare needs at least two run sets");
  std::vector<std::map<std::uint64_t, const RunRow*>> by_seed(sets.size());
  for (std::size_t s = 0; s < sets.size(); ++s)
    for (const auto& r : sets[s].rows)
      if (!by_seed[s].emplace(r.seed, &r).second)
        throw UsageError("seed " + std::to_string(r.seed) + " appears twice in '" + sets[s].name + "'");

  CompareReport report;
  for (const auto& [seed, row] : by_seed.front()) report.seeds.push_back(seed);
  for (std::size_t s = 1; s < sets.size(); ++s) {
    std::vector<std::uint64_t> seeds;
    for (const auto& [seed, row] : by_seed[s]) seeds.push_back(seed);
    if (seeds != report.seeds)
      throw UsageError("seeds of '" + sets[s].name + "' do not match those of '" + sets.front().name + "'");
  }
  if (strict && report.seeds.size() < 2) throw UsageError("strict comparison needs more than one seed");
  const int n = static_cast<int>(report.seeds.size());
  report.required = static_cast<int>(std::ceil(0.8 * n - 1e-9));

  auto column = [&](std::size_t s, auto field) {
    std::vector<double> v;
    for (auto seed : report.seeds) v.push_back(field(*by_seed[s].at(seed)));
    return v;
  };
  auto inspected = [](const RunRow& r) { return static_cast<double>(r.inspected); };
  auto score = [](const RunRow& r) { return r.score; };

  std::vector<int> wins(sets.size(), 0);
  bool total = true;
  for (std::size_t a = 0; a < sets.size(); ++a)
    for (std::size_t b = a + 1; b < sets.size(); ++b) {
      PairedComparison c;
      c.first = sets[a].name;
      c.second = sets[b].name;
      c.inspected = paired(column(a, inspected), column(b, inspected), report.required);
      c.score = paired(column(a, score), column(b, score), report.required);
      switch (c.inspected.ordering) {
        case Ordering::first_better: ++wins[a]; break;
        case Ordering::second_better: ++wins[b]; break;
        case Ordering::inconclusive: total = false; break;
      }
      report.pairs.push_back(std::move(c));
    }
  if (total) {
    std::vector<std::size_t> order(sets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return wins[x] > wins[y]; });
    bool chain = true;
    for (std::size_t i = 0; i < order.size(); ++i)
      if (wins[order[i]] != static_cast<int>(order.size() - 1 - i)) chain = false;
    if (chain)
      for (auto i : order) report.ranking.push_back(sets[i].name);
  }
  return report;
}

namespace {

std::string ordering_text(const PairedComparison& c, const PairedMetric& m) {
  switch (m.ordering) {
    case Ordering::first_better: return c.first + " > " + c.second;
    case Ordering::second_better: return c.second + " > " + c.first;
    case Ordering::inconclusive: break;
  }
  return "no ordering";
}

void metric_lines(std::ostringstream& out, const char* name, const PairedComparison& c, const PairedMetric& m) {
  out << "  " << name << ": deltas [";
  for (std::size_t i = 0; i < m.deltas.size(); ++i) out << (i ? ", " : "") << format_number(m.deltas[i]);
  out << "] mean " << format_number(m.mean_delta) << ", wins " << m.first_wins << '/' << m.second_wins << " -> "
      << ordering_text(c, m) << '\n';
}

}  // namespace

std::string format_report(const CompareReport& report) {
  std::ostringstream out;
  out << "seeds:";
  for (auto s : report.seeds) out << ' ' << s;
  out << "\nordering requires " << report.required << " of " << report.seeds.size() << " seeds\n";
  for (const auto& c : report.pairs) {
    out << c.first << " vs " << c.second << '\n';
    metric_lines(out, "inspected", c, c.inspected);
    metric_lines(out, "score", c, c.score);
  }
  out << "ranking by inspected: ";
  if (report.ranking.empty()) {
    out << "none";
  } else {
    for (std::size_t i = 0; i < report.ranking.size(); ++i) out << (i ? " > " : "") << report.ranking[i];
  }
  out << '\n';
  return out.str();
}

}  // namespace sb2g
