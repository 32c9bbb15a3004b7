// rmflow: command-line front end for the preset experiments.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "rmflow/cauchy.hpp"
#include "rmflow/empirical.hpp"
#include "rmflow/errors.hpp"
#include "rmflow/harness.hpp"

namespace fs = std::filesystem;
using namespace rmflow;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

ExperimentConfig load(const Options& o) {
  ExperimentConfig c;
  if (!o.config.empty()) {
    c = load_config(o.config);
  } else {
    if (!o.preset.empty()) c.preset = parse_preset(o.preset);
    apply_preset_defaults(c);
  }
  if (!o.out.empty()) c.output_dir = o.out;
  if (o.seed) c.base_seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  return c;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

fs::path out_dir(const ExperimentConfig& c) {
  fs::path d(c.output_dir);
  fs::create_directories(d);
  return d;
}

void write_pairs(const fs::path& p, const std::vector<std::pair<double, double>>& xy) {
  std::ofstream f(p);
  char buf[96];
  for (const auto& [x, y] : xy) {
    std::snprintf(buf, sizeof buf, "%.10g %.10g\n", x, y);
    f << buf;
  }
}

int finish(const RunOutcome& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  if (r.exit_status != 0) std::cerr << "error: " << r.message << "\n";
  return r.exit_status;
}

// Final-time eigenvalues pooled over replicas, as a normalized histogram.
void write_histogram(const fs::path& p, const std::vector<EigenPath>& paths, std::size_t bins) {
  std::vector<double> all;
  for (const auto& path : paths) all.insert(all.end(), path.spectra.back().begin(), path.spectra.back().end());
  if (all.empty()) return;
  const auto [lo_it, hi_it] = std::minmax_element(all.begin(), all.end());
  const double lo = *lo_it, hi = *hi_it + 1e-12, w = (hi - lo) / static_cast<double>(bins);
  std::vector<double> h(bins, 0.0);
  for (double x : all) h[std::min(bins - 1, static_cast<std::size_t>((x - lo) / w))] += 1.0;
  std::vector<std::pair<double, double>> xy;
  for (std::size_t i = 0; i < bins; ++i)
    xy.emplace_back(lo + (static_cast<double>(i) + 0.5) * w, h[i] / (static_cast<double>(all.size()) * w));
  write_pairs(p, xy);
}

void write_density(const fs::path& p, const LimitLaw& law) {
  auto [lo, hi] = support(law);
  std::vector<std::pair<double, double>> xy;
  const int m = 400;
  for (int i = 1; i < m; ++i) {
    const double x = lo + (hi - lo) * i / m;
    xy.emplace_back(x, density(law, x));
  }
  write_pairs(p, xy);
}

int cmd_simulate(const Options& o) {
  const auto c = load(o);
  const auto r = run_preset(c, true);
  if (r.exit_status != 0) return finish(r);
  const auto dir = out_dir(c);
  {
    std::ofstream f(dir / "results.csv", std::ios::binary);
    write_csv(f, r.table, timestamp());
  }
  const double tf = c.grid().back();
  for (std::size_t i = 0; i < c.n_list.size(); ++i)
    write_histogram(dir / ("hist_n" + std::to_string(c.n_list[i]) + ".dat"), r.paths[i], 40);
  if (c.preset != Preset::custom && has_cdf(preset_law(c, tf))) write_density(dir / "law_density.dat", preset_law(c, tf));
  std::map<std::size_t, std::vector<std::pair<double, double>>> m2;
  for (const auto& row : r.table.rows)
    if (row.stat == "m2_mean") m2[row.n].emplace_back(row.t, row.value);
  for (const auto& [n, xy] : m2) write_pairs(dir / ("m2_mean_n" + std::to_string(n) + ".dat"), xy);
  std::cout << "wrote " << r.table.rows.size() << " rows to " << (dir / "results.csv").string() << "\n";
  return finish(r);
}

int cmd_moments(const Options& o) {
  const auto c = load(o);
  validate(c);
  const auto dir = out_dir(c);
  std::ofstream f(dir / "limit_moments.csv", std::ios::binary);
  f << "t";
  std::cout << "t";
  for (int k = 0; k <= 8; ++k) {
    f << ",m" << k;
    std::cout << "\tm" << k;
  }
  f << "\n";
  std::cout << "\n";
  char buf[64];
  for (double t : c.grid()) {
    const auto m = limit_moments(c, t, 8);
    std::snprintf(buf, sizeof buf, "%.17g", t);
    f << buf;
    std::cout << t;
    for (double v : m) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      f << ',' << buf;
      std::cout << '\t' << v;
    }
    f << "\n";
    std::cout << "\n";
  }
  return 0;
}

int cmd_compare(const Options& o) {
  const auto c = load(o);
  const auto r = run_preset(c);
  if (r.exit_status != 0) return finish(r);
  bool any = false;
  for (const char* stat : {"w1", "ks"}) {
    std::map<std::size_t, std::vector<double>> v;
    double tf = c.grid().back();
    for (const auto& row : r.table.rows)
      if (row.stat == stat && row.t == tf) v[row.n].push_back(row.value);
    for (const auto& [n, xs] : v) {
      std::cout << stat << " n=" << n << " median=" << median(xs) << "\n";
      any = true;
    }
  }
  if (!any) {
    // moment-only classes
    const double tf = c.grid().back();
    for (const auto& row : r.table.rows)
      if (row.replica == "ens" && row.t == tf && row.stat.size() > 5 && row.stat.substr(2) == "_mean") {
        const std::string k = row.stat.substr(0, 2);
        double se = 0, lim = 0;
        for (const auto& s : r.table.rows)
          if (s.replica == "ens" && s.n == row.n && s.t == tf) {
            if (s.stat == k + "_stderr") se = s.value;
            if (s.stat == k + "_limit") lim = s.value;
          }
        std::cout << k << " n=" << row.n << " mean=" << row.value << " stderr=" << se << " limit=" << lim << "\n";
      }
  }
  return finish(r);
}

int cmd_sweep(const Options& o) {
  const auto c = load(o);
  const auto r = run_preset(c);
  if (r.exit_status != 0) return finish(r);
  const auto rep = sweep_report(r.table);
  const auto dir = out_dir(c);
  std::ofstream f(dir / "sweep.csv", std::ios::binary);
  f << "n,median_w1,median_ks\n";
  std::vector<std::pair<double, double>> w, k;
  char buf[128];
  for (const auto& p : rep.points) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", p.n, p.median_w1, p.median_ks);
    f << buf;
    std::cout << "n=" << p.n << " median_w1=" << p.median_w1 << " median_ks=" << p.median_ks << "\n";
    w.emplace_back(static_cast<double>(p.n), p.median_w1);
    k.emplace_back(static_cast<double>(p.n), p.median_ks);
  }
  write_pairs(dir / "sweep_w1.dat", w);
  write_pairs(dir / "sweep_ks.dat", k);
  std::cout << "slope_w1=" << rep.slope_w1 << " monotone_w1=" << rep.monotone_w1 << "\n"
            << "slope_ks=" << rep.slope_ks << " monotone_ks=" << rep.monotone_ks << "\n";
  return finish(r);
}

int cmd_invert(const Options& o) {
  const auto c = load(o);
  validate(c);
  const double tf = c.grid().back();
  const LimitLaw law = preset_law(c, tf);
  if (!has_cdf(law)) throw UnsupportedOperation("invert: " + describe(law) + " has no density");
  const auto [lo, hi] = support(law);
  std::vector<double> x;
  const int m = 400;
  for (int i = 1; i < m; ++i) x.push_back(lo + (hi - lo) * i / m);
  const auto rec = stieltjes_invert([&](cplx z) { return cauchy_transform(law, z); }, x, {0.04, 0.02, 0.01, 0.005});
  const auto dir = out_dir(c);
  std::ofstream f(dir / "invert.dat");
  double worst = 0.0;
  char buf[128];
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = density(law, x[i]);
    worst = std::max(worst, std::fabs(rec[i] - d));
    std::snprintf(buf, sizeof buf, "%.10g %.10g %.10g\n", x[i], rec[i], d);
    f << buf;
  }
  std::cout << describe(law) << ": sup |recovered - density| = " << worst << "\n";
  return 0;
}

int cmd_residual(const Options& o) {
  const auto c = load(o);
  validate(c);
  const auto coef = limit_coefficients(c);
  if (c.preset != Preset::custom && has_cdf(preset_law(c, c.grid().back()))) {
    // the limit law itself, discretized by quantile atoms
    EmpiricalMeasureProcess proc;
    for (double t : c.grid()) {
      const LimitLaw law = preset_law(c, t);
      proc.t_grid.push_back(t);
      proc.measures.emplace_back(quantile_atoms(law, 400));
    }
    for (int k = 1; k <= 6; ++k)
      std::cout << "law x^" << k << ": "
                << limit_equation_residual(proc, Polynomial::monomial(k), coef.g2, coef.h2, coef.b, coef.beta) << "\n";
  }
  const auto r = run_preset(c);
  if (r.exit_status != 0) return finish(r);
  for (const char* stat : {"residual_x2", "residual_x4"}) {
    std::map<std::size_t, std::vector<double>> v;
    for (const auto& row : r.table.rows)
      if (row.stat == stat) v[row.n].push_back(row.value);
    for (const auto& [n, xs] : v) std::cout << stat << " n=" << n << " median=" << median(xs) << "\n";
  }
  return finish(r);
}

int cmd_presets() {
  for (Preset p : all_presets()) {
    std::cout << to_string(p) << ": " << preset_summary(p) << "\n";
    for (const auto& k : preset_keys(p))
      std::cout << "  " << k.key << " = " << k.default_value << "    # " << k.meaning << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-valued flows and their spectral limits"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "config file (key = value lines)");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--seed", o.seed, "base seed");
  app.add_option("--threads", o.threads, "worker threads (speed only)");
  app.add_option("--preset", o.preset, "preset when no config file is given");

  int status = 0;
  auto add = [&](const char* name, const char* help, std::function<int()> f) {
    app.add_subcommand(name, help)->callback([&status, f] { status = f(); });
  };
  add("simulate", "run the preset, write results.csv and plot data", [&] { return cmd_simulate(o); });
  add("moments", "tabulate limit moments over the time grid", [&] { return cmd_moments(o); });
  add("compare", "median KS / W1 (or moment table) per n", [&] { return cmd_compare(o); });
  add("sweep", "medians per n and log-log slopes", [&] { return cmd_sweep(o); });
  add("invert", "Stieltjes inversion of the preset law at the final time", [&] { return cmd_invert(o); });
  add("residual", "limit-equation residuals of the law and of simulated paths", [&] { return cmd_residual(o); });
  add("presets", "list presets and their keys", [] { return cmd_presets(); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedOperation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return status;
}
