#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmflow/flow_sim.hpp"
#include "rmflow/limit_law.hpp"

namespace rmflow {

enum class Preset { wigner, wigner_real, wishart, wishart_nonunique, geometric, jacobi, free_bm, free_ou, custom };

std::string to_string(Preset p);
Preset parse_preset(const std::string& s);
std::vector<Preset> all_presets();

struct ExperimentConfig {
  Preset preset = Preset::wigner;
  std::vector<std::size_t> n_list{25, 50, 100};
  std::size_t replica_count = 20;
  std::uint64_t base_seed = 1;
  double dt = 1e-3;
  std::vector<double> t_grid;  // empty: 0, t_step, ..., t_final
  double t_final = 1.0;
  double t_step = 0.05;
  int beta = 2;
  double alpha = 2.5;
  double a = 1.0;
  double p = 3.0, q = 3.0;
  double theta = 0.0, sigma = 1.0;
  // custom preset: ascending polynomial coefficients of g, h and b_n / n
  std::vector<double> g_poly{0.5}, h_poly{1.0}, b_poly{};
  double initial = 0.0;  // custom: delta_initial start
  std::string output_dir = "out";
  unsigned threads = 1;

  std::vector<double> grid() const;
};

// Flat "key = value" text, '#' comments.  Unknown keys are errors.  Keys not
// given keep the preset's defaults (apply_preset_defaults runs first).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void apply_preset_defaults(ExperimentConfig& cfg);

struct PresetKey {
  std::string key, meaning, default_value;
};
// Keys each preset reads, for the `presets` listing.
std::vector<PresetKey> preset_keys(Preset p);
std::string preset_summary(Preset p);

// All checks that must pass before any simulation, including the Wishart
// positivity inequality alpha n >= beta (n - 1) + 2 at every n.  Throws
// ValidationError.
void validate(const ExperimentConfig& cfg);

FlowSpec flow_spec(const ExperimentConfig& cfg, std::size_t n);
// The law the preset's empirical process should approach at time t.
LimitLaw preset_law(const ExperimentConfig& cfg, double t);
// Coefficients of the limit equation (g^2, h^2, b and beta).
struct LimitCoefficients {
  SpectralFunction g2, h2, b;
  double beta;
};
LimitCoefficients limit_coefficients(const ExperimentConfig& cfg);
// m_0..m_kmax of the limit at time t (exact, closed form or moment ODE).
std::vector<double> limit_moments(const ExperimentConfig& cfg, double t, std::size_t k_max);

struct ResultRow {
  std::string preset;
  std::size_t n;
  std::string replica;  // index or "ens"
  double t;
  std::string stat;
  double value;
};

// Closed vocabulary of statistic names.
//   path rows, every grid time:  m1..m8, min_eig, max_eig, ks, w1, neg_mass
//   path rows, final time:       residual_x2, residual_x4, em_drift_x4,
//                                em_correction_x4, em_interaction_x4,
//                                em_martingale_x4, clamp_events, domain_exit
//   ensemble rows ("ens"):       m<k>_mean, m<k>_stderr, m<k>_limit, neg_mass_pred
const std::vector<std::string>& stat_vocabulary();
bool known_stat(const std::string& s);

struct ResultTable {
  std::vector<ResultRow> rows;
};

struct RunOutcome {
  ResultTable table;
  int exit_status = 0;  // 0 ok, 2 validation, 3 numerical
  std::string message;
  std::vector<std::string> warnings;
  std::vector<std::vector<EigenPath>> paths;  // per n, kept for plots
};

// Validates, simulates each n in n_list, computes statistics.  Never throws
// for validation or numerical failures; they become the exit status.
RunOutcome run_preset(const ExperimentConfig& cfg, bool keep_paths = false);

// CSV with a "# generated <timestamp>" first line, then the header
// preset,n,replica,t,stat,value and rows with 17 significant digits.
void write_csv(std::ostream& os, const ResultTable& table, const std::string& timestamp);
std::string csv_string(const ResultTable& table, const std::string& timestamp);
// Drops the timestamp line, for reproducibility comparisons.
std::string strip_timestamp(const std::string& csv);

struct SweepPoint {
  std::size_t n;
  double median_w1, median_ks;
};
struct SweepReport {
  std::vector<SweepPoint> points;
  double slope_w1 = 0.0, slope_ks = 0.0;  // least squares in log-log
  bool monotone_w1 = false, monotone_ks = false;
};

// Per-n medians over replicas of w1 and ks at the last grid time.  Needs two
// or more distinct n.
SweepReport sweep_report(const ResultTable& table);
// Median over replicas of |stat| at the last grid time, per n, and the log-log slope.
std::pair<std::vector<std::pair<std::size_t, double>>, double> median_slope(const ResultTable& table,
                                                                           const std::string& stat);

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);
double median(std::vector<double> v);

}  // namespace rmflow
