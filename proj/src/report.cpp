#include "fctl/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fctl/config.hpp"
#include "fctl/errors.hpp"
#include "fctl/network.hpp"
#include "fctl/output.hpp"
#include "fctl/simulator.hpp"
#include "fctl/solver.hpp"

namespace fctl {

namespace fs = std::filesystem;

std::string file_stem(const std::string& name) {
  std::string out;
  for (char ch : name) {
    const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                      (ch >= '0' && ch <= '9') || ch == '_' || ch == '-';
    out += keep ? ch : '_';
  }
  return out.empty() ? "queue" : out;
}

namespace {

std::string num(double v) { return fmt::format("{:.10g}", v); }

class CsvFile {
 public:
  CsvFile(const fs::path& path, const RunConfig& rc, const std::vector<std::string>& meta)
      : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    out_ << "# fctl " << kToolVersion << "\n";
    out_ << "# mode " << rc.mode << "\n";
    out_ << "# config " << fs::path(rc.config_path).filename().string() << "\n";
    for (const auto& m : meta) out_ << "# " << m << "\n";
  }

  template <typename... Cols>
  void row(const Cols&... cols) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cols, first = false), ...);
    out_ << "\n";
  }

  void row(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

std::vector<std::string> tail_header(int levels) {
  std::vector<std::string> h{"quantity"};
  for (int m = 1; m <= levels; ++m) h.push_back(fmt::format("ge{}", m));
  return h;
}

template <typename Seq, typename F>
std::vector<std::string> tail_row(const std::string& label, const Seq& v, F&& pick) {
  std::vector<std::string> r{label};
  for (const auto& x : v) r.push_back(num(pick(x)));
  return r;
}

struct AnalyticQueue {
  std::string name;
  const QueueSolution* sol;
  double rho;
};

// Per-queue analytic artifacts.
void write_analytic(const fs::path& dir, const RunConfig& rc, const AnalyticQueue& q,
                    int levels) {
  const auto& s = *q.sol;
  const std::string stem = file_stem(q.name);
  const std::vector<std::string> meta{fmt::format("queue {}", q.name)};
  {
    CsvFile f(dir / fmt::format("means_{}.csv", stem), rc, meta);
    f.row("slot", "mean");
    const auto means = s.mean_per_slot();
    for (std::size_t k = 0; k < means.size(); ++k) f.row(k, num(means[k]));
  }
  {
    CsvFile f(dir / fmt::format("tails_{}.csv", stem), rc, meta);
    const TailTable t = s.tail_table(levels);
    auto id = [](double x) { return x; };
    f.row(tail_header(levels));
    f.row(tail_row("X_0", t.x0, id));
    f.row(tail_row("X_g", t.xg, id));
    f.row(tail_row("X_bar", t.xbar, id));
  }
  {
    CsvFile f(dir / fmt::format("green_{}.csv", stem), rc, meta);
    f.row("effective_green", "probability");
    const auto dist = effective_green_dist(s);
    for (std::size_t j = 0; j < dist.size(); ++j) f.row(j, num(dist[j]));
  }
  {
    CsvFile f(dir / fmt::format("output_{}.csv", stem), rc, meta);
    f.row("slot", "mean");
    const auto o = output_mean_per_slot(output_pgf(s));
    for (std::size_t k = 0; k < o.size(); ++k) f.row(k + 1, num(o[k]));
  }
}

void write_simulated(const fs::path& dir, const RunConfig& rc, const std::string& name,
                     const SimStats& st, const SimConfig& cfg) {
  const std::string stem = file_stem(name);
  const std::vector<std::string> meta{
      fmt::format("queue {}", name), fmt::format("seed {}", cfg.seed),
      fmt::format("cycles {} warmup {} replications {}", cfg.cycles, cfg.warmup_cycles,
                  cfg.replications)};
  {
    CsvFile f(dir / fmt::format("means_{}.csv", stem), rc, meta);
    f.row("slot", "mean", "stderr");
    for (std::size_t k = 0; k < st.slot_mean.size(); ++k)
      f.row(k, num(st.slot_mean[k].mean), num(st.slot_mean[k].se));
  }
  {
    CsvFile f(dir / fmt::format("tails_{}.csv", stem), rc, meta);
    const int levels = static_cast<int>(st.tail_x0.size());
    auto mean = [](const Estimate& e) { return e.mean; };
    auto se = [](const Estimate& e) { return e.se; };
    f.row(tail_header(levels));
    f.row(tail_row("X_0", st.tail_x0, mean));
    f.row(tail_row("X_g", st.tail_xg, mean));
    f.row(tail_row("X_bar", st.tail_xbar, mean));
    f.row(tail_row("X_0_stderr", st.tail_x0, se));
    f.row(tail_row("X_g_stderr", st.tail_xg, se));
    f.row(tail_row("X_bar_stderr", st.tail_xbar, se));
  }
  {
    CsvFile f(dir / fmt::format("green_{}.csv", stem), rc, meta);
    f.row("effective_green", "probability", "stderr");
    for (std::size_t j = 0; j < st.green_hist.size(); ++j)
      f.row(j, num(st.green_hist[j].mean), num(st.green_hist[j].se));
  }
  {
    CsvFile f(dir / fmt::format("output_{}.csv", stem), rc, meta);
    f.row("slot", "mean", "stderr");
    for (std::size_t k = 0; k < st.output_mean.size(); ++k)
      f.row(k + 1, num(st.output_mean[k].mean), num(st.output_mean[k].se));
  }
}

SimConfig effective_sim(const ModelConfig& mc, const RunConfig& rc) {
  SimConfig cfg = mc.simulation;
  if (rc.seed) cfg.seed = *rc.seed;
  if (rc.cycles) cfg.cycles = *rc.cycles;
  if (rc.warmup_cycles) cfg.warmup_cycles = *rc.warmup_cycles;
  if (rc.replications) cfg.replications = *rc.replications;
  cfg.tail_levels = mc.tail_levels;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("simulation settings: {}", e.what()));
  }
  return cfg;
}

NetworkSpec effective_network(const ModelConfig& mc, const RunConfig& rc) {
  NetworkSpec spec = mc.as_network();
  if (rc.epsilon_weight) spec.epsilon_weight = *rc.epsilon_weight;
  return spec;
}

const QueueConfig& require_single(const ModelConfig& mc, const RunConfig& rc) {
  if (!mc.queue)
    throw ConfigError(fmt::format("mode {} needs a 'queue' config, not a network", rc.mode));
  return *mc.queue;
}

struct AnalysisResult {
  NetworkSpec spec;
  NetworkSolution sol;
};

AnalysisResult analyze(const ModelConfig& mc, const RunConfig& rc, const fs::path& dir,
                       std::ostream& log) {
  AnalysisResult r{effective_network(mc, rc), {}};
  r.sol = analyze_network(r.spec);
  CsvFile summary(dir / "summary.csv", rc, {});
  summary.row("queue", "rho", "mean_x0", "mean_x_bar", "roots", "max_root_residual");
  for (std::size_t v = 0; v < r.spec.nodes.size(); ++v) {
    const auto& node = r.spec.nodes[v];
    if (!node.reported) continue;
    const auto& res = r.sol.nodes[v];
    for (const auto& w : res.solution.warnings()) log << "warning: " << node.name << ": " << w << "\n";
    write_analytic(dir, rc, {node.name, &res.solution, res.rho}, mc.tail_levels);
    summary.row(node.name, num(res.rho), num(res.solution.mean_x0()),
                num(res.solution.mean_xbar()), res.solution.roots().roots.size(),
                num(res.solution.roots().max_residual()));
    fmt::print(log, "{}: rho = {:.4f}, E[X_bar] = {:.6f}\n", node.name, res.rho,
               res.solution.mean_xbar());
  }
  return r;
}

std::vector<SimStats> simulate(const ModelConfig& mc, const RunConfig& rc, const fs::path& dir,
                               std::ostream& log) {
  const NetworkSpec spec = effective_network(mc, rc);
  const SimConfig cfg = effective_sim(mc, rc);
  const auto stats = simulate_network(spec, cfg);
  CsvFile summary(dir / "summary.csv", rc,
                  {fmt::format("seed {}", cfg.seed),
                   fmt::format("cycles {} warmup {} replications {}", cfg.cycles,
                               cfg.warmup_cycles, cfg.replications)});
  summary.row("queue", "mean_x_bar", "stderr", "arrivals_per_cycle", "departures_per_cycle");
  for (std::size_t v = 0; v < spec.nodes.size(); ++v) {
    const auto& node = spec.nodes[v];
    if (!node.reported) continue;
    const auto& st = stats[v];
    write_simulated(dir, rc, node.name, st, cfg);
    summary.row(node.name, num(st.xbar_mean.mean), num(st.xbar_mean.se),
                num(st.arrivals_per_cycle.mean), num(st.departures_per_cycle.mean));
    fmt::print(log, "{}: E[X_bar] = {:.6f} +- {:.6f}\n", node.name, st.xbar_mean.mean,
               st.xbar_mean.se);
  }
  return stats;
}

// Deviation in standard errors; a zero standard error only tolerates
// rounding-level differences.
double sigmas(double dev, double se) {
  if (se > 0.0) return std::abs(dev) / se;
  return std::abs(dev) < 1e-9 ? 0.0 : INFINITY;
}

ExitCode compare(const ModelConfig& mc, const RunConfig& rc, const fs::path& dir,
                 std::ostream& log) {
  fs::create_directories(dir / "analytic");
  fs::create_directories(dir / "simulation");
  const AnalysisResult a = analyze(mc, rc, dir / "analytic", log);
  const auto sim = simulate(mc, rc, dir / "simulation", log);
  const SimConfig cfg = effective_sim(mc, rc);

  CsvFile f(dir / "compare.csv", rc, {fmt::format("seed {}", cfg.seed)});
  f.row("queue", "slot", "analytic", "simulated", "stderr", "deviation", "sigmas");
  double worst = 0.0;
  double worst_dev = 0.0;
  std::string worst_where = "-";
  for (std::size_t v = 0; v < a.spec.nodes.size(); ++v) {
    const auto& node = a.spec.nodes[v];
    if (!node.reported) continue;
    const auto means = a.sol.nodes[v].solution.mean_per_slot();
    auto emit = [&](const std::string& slot, double an, const Estimate& e) {
      const double dev = e.mean - an;
      const double s = sigmas(dev, e.se);
      f.row(node.name, slot, num(an), num(e.mean), num(e.se), num(dev), num(s));
      if (s > worst || (s == worst && std::abs(dev) > std::abs(worst_dev))) {
        worst = s;
        worst_dev = dev;
        worst_where = fmt::format("{} slot {}", node.name, slot);
      }
    };
    for (std::size_t k = 0; k < means.size(); ++k)
      emit(std::to_string(k), means[k], sim[v].slot_mean[k]);
    emit("bar", a.sol.nodes[v].solution.mean_xbar(), sim[v].xbar_mean);
  }
  fmt::print(log, "max deviation {:.6f} at {} ({:.2f} standard errors)\n", worst_dev,
             worst_where, worst);
  if (worst > rc.compare_sigmas) {
    fmt::print(log, "compare: deviation exceeds {} standard errors\n", rc.compare_sigmas);
    return ExitCode::compare_flagged;
  }
  return ExitCode::ok;
}

void roots_mode(const ModelConfig& mc, const RunConfig& rc, const fs::path& dir,
                std::ostream& log) {
  const NetworkSpec spec = effective_network(mc, rc);
  const NetworkSolution sol = analyze_network(spec);
  for (std::size_t v = 0; v < spec.nodes.size(); ++v) {
    if (!spec.nodes[v].reported) continue;
    const RootSet& rs = sol.nodes[v].solution.roots();
    CsvFile f(dir / fmt::format("roots_{}.csv", file_stem(spec.nodes[v].name)), rc,
              {fmt::format("queue {}", spec.nodes[v].name),
               fmt::format("truncation {}", rs.truncation)});
    f.row("index", "re", "im", "abs", "residual");
    for (std::size_t i = 0; i < rs.roots.size(); ++i)
      f.row(i + 1, num(rs.roots[i].real()), num(rs.roots[i].imag()), num(std::abs(rs.roots[i])),
            num(rs.residuals[i]));
    fmt::print(log, "{}: {} roots, max residual {:.3g}\n", spec.nodes[v].name, rs.roots.size(),
               rs.max_residual());
  }
}

void invert_mode(const ModelConfig& mc, const RunConfig& rc, const fs::path& dir,
                 std::ostream& log) {
  const NetworkSpec spec = effective_network(mc, rc);
  const NetworkSolution sol = analyze_network(spec);
  for (std::size_t v = 0; v < spec.nodes.size(); ++v) {
    if (!spec.nodes[v].reported) continue;
    const QueueSolution& s = sol.nodes[v].solution;
    const auto x0 = s.x0_pmf();
    const auto laws = s.slot_pmfs(x0);
    const auto xbar = s.xbar_pmf(laws);
    const auto& xg = laws[s.green()];
    const std::size_t len = std::max({x0.size(), xg.size(), xbar.size()});
    auto at = [](const std::vector<double>& p, std::size_t n) { return n < p.size() ? p[n] : 0.0; };
    CsvFile f(dir / fmt::format("pmf_{}.csv", file_stem(spec.nodes[v].name)), rc,
              {fmt::format("queue {}", spec.nodes[v].name)});
    f.row("n", "x0", "xg", "x_bar");
    for (std::size_t n = 0; n < len; ++n) f.row(n, num(at(x0, n)), num(at(xg, n)), num(at(xbar, n)));
    fmt::print(log, "{}: {} states\n", spec.nodes[v].name, len);
  }
}

}  // namespace

ExitCode run(const RunConfig& rc, std::ostream& log) {
  try {
    if (rc.config_path.empty()) throw ConfigError("--config is required");
    if (!fs::exists(rc.config_path))
      throw ConfigError(fmt::format("{}: no such file", rc.config_path));
    const ModelConfig mc = parse_config_file(rc.config_path);
    const fs::path dir(rc.out_dir);
    fs::create_directories(dir);

    if (rc.mode == "analyze-single") {
      require_single(mc, rc);
      analyze(mc, rc, dir, log);
    } else if (rc.mode == "analyze-network") {
      analyze(mc, rc, dir, log);
    } else if (rc.mode == "simulate-single") {
      require_single(mc, rc);
      simulate(mc, rc, dir, log);
    } else if (rc.mode == "simulate-network") {
      simulate(mc, rc, dir, log);
    } else if (rc.mode == "compare") {
      return compare(mc, rc, dir, log);
    } else if (rc.mode == "roots") {
      roots_mode(mc, rc, dir, log);
    } else if (rc.mode == "invert") {
      invert_mode(mc, rc, dir, log);
    } else {
      throw ConfigError(fmt::format("unknown mode '{}'", rc.mode));
    }
    return ExitCode::ok;
  } catch (const InstabilityError& e) {
    fmt::print(log, "error: {}\n", e.what());
    return ExitCode::instability;
  } catch (const NumericsError& e) {
    fmt::print(log, "error: numerics: {}\n", e.what());
    return ExitCode::numerics_failure;
  } catch (const ConfigError& e) {
    fmt::print(log, "error: {}\n", e.what());
    return ExitCode::config_error;
  } catch (const std::invalid_argument& e) {
    fmt::print(log, "error: {}\n", e.what());
    return ExitCode::config_error;
  } catch (const std::exception& e) {
    fmt::print(log, "error: {}\n", e.what());
    return ExitCode::config_error;
  }
}

}  // namespace fctl
