#include "rmflow/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "rmflow/empirical.hpp"
#include "rmflow/errors.hpp"
#include "rmflow/moments.hpp"
#include "rmflow/cauchy.hpp"

namespace rmflow {

namespace {

const std::vector<std::pair<Preset, std::string>> kPresetNames{
    {Preset::wigner, "wigner"},   {Preset::wigner_real, "wigner_real"},
    {Preset::wishart, "wishart"}, {Preset::wishart_nonunique, "wishart_nonunique"},
    {Preset::geometric, "geometric"}, {Preset::jacobi, "jacobi"},
    {Preset::free_bm, "free_bm"}, {Preset::free_ou, "free_ou"},
    {Preset::custom, "custom"}};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
    throw ValidationError("config: " + key + ": not a finite number: '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ValidationError("config: " + key + ": not a non-negative integer: '" + v + "'");
  return x;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(parse_double(key, s));
  return out;
}

// g^2 = h^2 for the free presets so that beta * 2 g^2 h^2 = sigma^2.
double free_g2(const ExperimentConfig& c) { return std::fabs(c.sigma) / std::sqrt(2.0 * c.beta); }

std::size_t negative_count(const ExperimentConfig& c, std::size_t n) {
  const double nn = static_cast<double>(n);
  const double k = std::ceil((nn + 1.0 - c.alpha * nn) / 2.0);
  return static_cast<std::size_t>(std::clamp(k, 0.0, nn));
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_short(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

std::string to_string(Preset p) {
  for (const auto& [k, v] : kPresetNames)
    if (k == p) return v;
  return "?";
}

Preset parse_preset(const std::string& s) {
  for (const auto& [k, v] : kPresetNames)
    if (v == s) return k;
  throw ValidationError("unknown preset '" + s + "'");
}

std::vector<Preset> all_presets() {
  std::vector<Preset> out;
  for (const auto& kv : kPresetNames) out.push_back(kv.first);
  return out;
}

std::vector<double> ExperimentConfig::grid() const {
  if (!t_grid.empty()) return t_grid;
  std::vector<double> g;
  if (!(t_step > 0.0) || !(t_final >= 0.0)) return g;
  const auto steps = static_cast<long>(std::llround(t_final / t_step));
  for (long i = 0; i <= steps; ++i) g.push_back(static_cast<double>(i) * t_step);
  if (!g.empty() && std::fabs(g.back() - t_final) > 1e-12 * std::max(1.0, t_final)) g.push_back(t_final);
  if (!g.empty()) g.back() = std::max(g.back(), t_final);
  return g;
}

void apply_preset_defaults(ExperimentConfig& c) {
  const Preset p = c.preset;
  c = ExperimentConfig{};
  c.preset = p;
  switch (p) {
    case Preset::wigner:
      c.beta = 2;
      break;
    case Preset::wigner_real:
      c.beta = 1;
      break;
    case Preset::wishart:
      c.beta = 2;
      c.alpha = 2.5;
      c.n_list = {25, 50};
      break;
    case Preset::wishart_nonunique:
      c.beta = 1;
      c.alpha = 0.5;
      c.n_list = {100};
      break;
    case Preset::geometric:
      c.beta = 2;
      c.a = 1.0;
      c.alpha = 0.0;
      c.n_list = {50};
      break;
    case Preset::jacobi:
      c.beta = 2;
      c.p = c.q = 3.0;
      c.a = 0.25;
      c.n_list = {50};
      break;
    case Preset::free_bm:
      c.beta = 1;
      c.theta = 0.0;
      c.sigma = 1.0;
      break;
    case Preset::free_ou:
      c.beta = 1;
      c.theta = -1.0;
      c.sigma = 1.0;
      break;
    case Preset::custom:
      c.beta = 2;
      break;
  }
}

ExperimentConfig parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second) throw ValidationError("config: duplicate key '" + key + "'");
    kv.emplace_back(key, value);
  }

  ExperimentConfig c;
  for (const auto& [k, v] : kv)
    if (k == "preset") c.preset = parse_preset(v);
  apply_preset_defaults(c);

  for (const auto& [k, v] : kv) {
    if (k == "preset") continue;
    if (k == "n_list") {
      c.n_list.clear();
      for (const auto& s : split_list(v)) c.n_list.push_back(static_cast<std::size_t>(parse_u64(k, s)));
    } else if (k == "replicas") {
      c.replica_count = static_cast<std::size_t>(parse_u64(k, v));
    } else if (k == "seed") {
      c.base_seed = parse_u64(k, v);
    } else if (k == "dt") {
      c.dt = parse_double(k, v);
    } else if (k == "t_grid") {
      c.t_grid = parse_doubles(k, v);
    } else if (k == "t_final") {
      c.t_final = parse_double(k, v);
    } else if (k == "t_step") {
      c.t_step = parse_double(k, v);
    } else if (k == "beta") {
      c.beta = static_cast<int>(parse_u64(k, v));
    } else if (k == "alpha") {
      c.alpha = parse_double(k, v);
    } else if (k == "a") {
      c.a = parse_double(k, v);
    } else if (k == "p") {
      c.p = parse_double(k, v);
    } else if (k == "q") {
      c.q = parse_double(k, v);
    } else if (k == "theta") {
      c.theta = parse_double(k, v);
    } else if (k == "sigma") {
      c.sigma = parse_double(k, v);
    } else if (k == "g") {
      c.g_poly = parse_doubles(k, v);
    } else if (k == "h") {
      c.h_poly = parse_doubles(k, v);
    } else if (k == "b") {
      c.b_poly = parse_doubles(k, v);
    } else if (k == "initial") {
      c.initial = parse_double(k, v);
    } else if (k == "output_dir") {
      c.output_dir = v;
    } else if (k == "threads") {
      c.threads = static_cast<unsigned>(parse_u64(k, v));
    } else {
      throw ValidationError("config: unknown key '" + k + "'");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<PresetKey> preset_keys(Preset p) {
  ExperimentConfig d;
  d.preset = p;
  apply_preset_defaults(d);
  auto list = [](const auto& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_short(static_cast<double>(v[i]));
    return s;
  };
  std::vector<PresetKey> keys{
      {"preset", "preset name", to_string(p)},
      {"n_list", "matrix sizes, ascending", list(d.n_list)},
      {"replicas", "paths per n", std::to_string(d.replica_count)},
      {"seed", "base seed (u64)", std::to_string(d.base_seed)},
      {"dt", "Euler-Maruyama step", fmt_short(d.dt)},
      {"t_final", "last record time", fmt_short(d.t_final)},
      {"t_step", "record spacing", fmt_short(d.t_step)},
      {"t_grid", "explicit record times (overrides t_final/t_step)", ""},
      {"beta", "1 real symmetric, 2 complex Hermitian", std::to_string(d.beta)},
      {"output_dir", "output directory", d.output_dir},
      {"threads", "worker threads (speed only)", std::to_string(d.threads)}};
  switch (p) {
    case Preset::wishart:
      keys.push_back({"alpha", "drift constant, b_n = alpha n; needs alpha n >= beta (n-1) + 2", fmt_short(d.alpha)});
      break;
    case Preset::wishart_nonunique:
      keys.push_back({"alpha", "drift constant in [0, 1); beta must be 1", fmt_short(d.alpha)});
      break;
    case Preset::geometric:
      keys.push_back({"a", "start delta_a, a > 0", fmt_short(d.a)});
      keys.push_back({"alpha", "drift alpha x", fmt_short(d.alpha)});
      break;
    case Preset::jacobi:
      keys.push_back({"p", "drift b_n = n (p - (p+q) x)", fmt_short(d.p)});
      keys.push_back({"q", "see p", fmt_short(d.q)});
      keys.push_back({"a", "start delta_a, a in [0, 1]", fmt_short(d.a)});
      break;
    case Preset::free_bm:
    case Preset::free_ou:
      keys.push_back({"theta", p == Preset::free_bm ? "drift theta" : "drift theta x", fmt_short(d.theta)});
      keys.push_back({"sigma", "noise level", fmt_short(d.sigma)});
      break;
    case Preset::custom:
      keys.push_back({"g", "coefficients of g (ascending)", list(d.g_poly)});
      keys.push_back({"h", "coefficients of h (ascending)", list(d.h_poly)});
      keys.push_back({"b", "coefficients of b_n / n (ascending)", ""});
      keys.push_back({"initial", "start delta_initial", fmt_short(d.initial)});
      break;
    default:
      break;
  }
  return keys;
}

std::string preset_summary(Preset p) {
  switch (p) {
    case Preset::wigner:
      return "Dyson flow g = 1/2, h = 1, b = 0, complex; limit semicircle with variance t";
    case Preset::wigner_real:
      return "Dyson flow, real symmetric; limit semicircle with variance t/2";
    case Preset::wishart:
      return "g = sqrt|x|, h = 1, b_n = alpha n; limit Marchenko-Pastur";
    case Preset::wishart_nonunique:
      return "real Wishart flow started with k* negative eigenvalues; limit two-sided MP mixture";
    case Preset::geometric:
      return "g = h = sqrt|x|, drift alpha x, start delta_a; moment comparison";
    case Preset::jacobi:
      return "g = sqrt|x|, h = sqrt|1-x|, b_n = n (p - (p+q) x); moment comparison";
    case Preset::free_bm:
      return "constant g = h, drift theta; limit free Brownian motion";
    case Preset::free_ou:
      return "constant g = h, drift theta x; limit free Ornstein-Uhlenbeck";
    case Preset::custom:
      return "polynomial g, h, b_n/n; moment comparison against the moment ODE";
  }
  return {};
}

void validate(const ExperimentConfig& c) {
  auto fail = [&](const std::string& m) { throw ValidationError(to_string(c.preset) + ": " + m); };
  if (c.n_list.empty()) fail("n_list is empty");
  for (std::size_t i = 0; i < c.n_list.size(); ++i) {
    if (c.n_list[i] == 0) fail("n must be >= 1");
    if (i > 0 && c.n_list[i] <= c.n_list[i - 1]) fail("n_list must be strictly ascending");
  }
  if (c.replica_count == 0) fail("replicas must be >= 1");
  if (c.threads == 0) fail("threads must be >= 1");
  if (!(c.dt > 0.0)) fail("dt must be > 0");
  if (c.beta != 1 && c.beta != 2) fail("beta must be 1 or 2");
  const auto g = c.grid();
  if (g.empty()) fail("empty time grid (check t_final / t_step)");
  if (g.front() != 0.0) fail("time grid must start at 0");
  for (std::size_t i = 1; i < g.size(); ++i)
    if (!(g[i] > g[i - 1])) fail("time grid must be strictly ascending");

  switch (c.preset) {
    case Preset::wishart:
      if (!(c.alpha >= 0.0)) fail("alpha must be >= 0");
      for (std::size_t n : c.n_list) {
        // c1 = c2 = 1, c3 = alpha n
        const double lhs = c.alpha * static_cast<double>(n);
        const double rhs = c.beta * (static_cast<double>(n) - 1.0) + 2.0;
        if (lhs < rhs) {
          std::ostringstream os;
          os << "positivity inequality c3(n) >= c1(n) c2(n) (beta (n-1) + 2) fails at n = " << n
             << ": alpha n = " << lhs << " < " << rhs;
          fail(os.str());
        }
      }
      break;
    case Preset::wishart_nonunique:
      if (!(c.alpha >= 0.0 && c.alpha < 1.0)) fail("alpha must lie in [0, 1)");
      if (c.beta != 1) fail("the mixture solves the real (beta = 1) equation; set beta = 1");
      break;
    case Preset::geometric:
      if (!(c.a > 0.0)) fail("a must be > 0");
      break;
    case Preset::jacobi:
      if (!(c.a >= 0.0 && c.a <= 1.0)) fail("a must lie in [0, 1]");
      for (std::size_t n : c.n_list) {
        const double need = static_cast<double>(n) - 1.0 + 2.0 / c.beta;
        const double pn = c.p * static_cast<double>(n), qn = c.q * static_cast<double>(n);
        if (std::min(pn, qn) < need) {
          std::ostringstream os;
          os << "containment condition p(n) ^ q(n) >= n - 1 + 2/beta fails at n = " << n << ": min(" << pn << ", "
             << qn << ") < " << need;
          fail(os.str());
        }
      }
      break;
    case Preset::custom: {
      auto deg = [](const std::vector<double>& v) {
        int d = static_cast<int>(v.size()) - 1;
        while (d >= 0 && v[static_cast<std::size_t>(d)] == 0.0) --d;
        return d;
      };
      if (deg(c.g_poly) > 1 || deg(c.h_poly) > 1 || deg(c.b_poly) > 1)
        fail("g, h and b must have degree <= 1 for the moment hierarchy to close");
      break;
    }
    default:
      break;
  }
}

FlowSpec flow_spec(const ExperimentConfig& c, std::size_t n) {
  FlowSpec s;
  s.beta = c.beta;
  s.n = n;
  s.dt = c.dt;
  s.t_grid = c.grid();
  s.initial_spectrum.assign(n, 0.0);
  const double nn = static_cast<double>(n);
  switch (c.preset) {
    case Preset::wigner:
    case Preset::wigner_real:
      s.g = SpectralFunction::constant(0.5);
      s.h = SpectralFunction::constant(1.0);
      break;
    case Preset::wishart:
      s.g = SpectralFunction::sqrt_abs();
      s.h = SpectralFunction::constant(1.0);
      s.b = SpectralFunction::constant(c.alpha * nn);
      s.monitored_domain = Projection::nonneg;
      break;
    case Preset::wishart_nonunique: {
      s.g = SpectralFunction::sqrt_abs();
      s.h = SpectralFunction::constant(1.0);
      s.b = SpectralFunction::constant(c.alpha * nn);
      const std::size_t k = negative_count(c, n);
      for (std::size_t i = 0; i < n; ++i)
        s.initial_spectrum[i] = i < k ? -1e-4 * static_cast<double>(k - i) : 1e-4 * static_cast<double>(i - k + 1);
      break;
    }
    case Preset::geometric:
      s.g = SpectralFunction::sqrt_abs();
      s.h = SpectralFunction::sqrt_abs();
      s.b = SpectralFunction::affine(c.alpha, 0.0);
      s.drift_prescaled = true;
      s.initial_spectrum.assign(n, c.a);
      s.monitored_domain = Projection::nonneg;
      break;
    case Preset::jacobi:
      s.g = SpectralFunction::sqrt_abs();
      s.h = SpectralFunction::sqrt_abs_one_minus();
      s.b = SpectralFunction::affine(-(c.p + c.q) * nn, c.p * nn);
      s.initial_spectrum.assign(n, c.a);
      s.monitored_domain = Projection::unit_interval;
      break;
    case Preset::free_bm:
    case Preset::free_ou: {
      const double g = std::sqrt(free_g2(c));
      s.g = s.h = SpectralFunction::constant(g);
      s.b = c.preset == Preset::free_bm ? SpectralFunction::constant(c.theta) : SpectralFunction::affine(c.theta, 0.0);
      s.drift_prescaled = true;
      break;
    }
    case Preset::custom:
      s.g = SpectralFunction::polynomial(Polynomial(c.g_poly));
      s.h = SpectralFunction::polynomial(Polynomial(c.h_poly));
      s.b = SpectralFunction::polynomial(Polynomial(c.b_poly));
      s.drift_prescaled = true;
      s.initial_spectrum.assign(n, c.initial);
      break;
  }
  return s;
}

LimitLaw preset_law(const ExperimentConfig& c, double t) {
  switch (c.preset) {
    case Preset::wigner:
    case Preset::wigner_real:
      return semicircle_law(t, c.beta);
    case Preset::wishart:
      return MarchenkoPastur{c.alpha, t, c.beta};
    case Preset::wishart_nonunique:
      return MpMixtureTwo{c.alpha, t};
    case Preset::geometric:
      return GeometricLaw{c.a, c.alpha, c.beta, t};
    case Preset::jacobi:
      return JacobiLaw{c.p, c.q, c.beta, c.a, t};
    case Preset::free_bm:
      return t > 0.0 ? LimitLaw{free_bm_law(c.theta, c.sigma, t)} : LimitLaw{PointMass{0.0}};
    case Preset::free_ou:
      return t > 0.0 ? LimitLaw{free_ou_law(c.theta, c.sigma, t)} : LimitLaw{PointMass{0.0}};
    case Preset::custom:
      break;
  }
  throw UnsupportedOperation("custom preset has no closed-form law");
}

LimitCoefficients limit_coefficients(const ExperimentConfig& c) {
  const double beta = c.beta;
  switch (c.preset) {
    case Preset::wigner:
    case Preset::wigner_real:
      return {SpectralFunction::constant(0.25), SpectralFunction::constant(1.0), SpectralFunction::zero(), beta};
    case Preset::wishart:
    case Preset::wishart_nonunique:
      return {SpectralFunction::abs(), SpectralFunction::constant(1.0), SpectralFunction::constant(c.alpha), beta};
    case Preset::geometric:
      return {SpectralFunction::abs(), SpectralFunction::abs(), SpectralFunction::affine(c.alpha, 0.0), beta};
    case Preset::jacobi:
      return {SpectralFunction::abs(), SpectralFunction::abs_one_minus(), SpectralFunction::affine(-(c.p + c.q), c.p),
              beta};
    case Preset::free_bm:
    case Preset::free_ou: {
      const auto g2 = SpectralFunction::constant(free_g2(c));
      return {g2, g2,
              c.preset == Preset::free_bm ? SpectralFunction::constant(c.theta) : SpectralFunction::affine(c.theta, 0.0),
              beta};
    }
    case Preset::custom: {
      const Polynomial g(c.g_poly), h(c.h_poly);
      return {SpectralFunction::polynomial(g * g), SpectralFunction::polynomial(h * h),
              SpectralFunction::polynomial(Polynomial(c.b_poly)), beta};
    }
  }
  return {};
}

std::vector<double> limit_moments(const ExperimentConfig& c, double t, std::size_t k_max) {
  if (c.preset == Preset::custom) {
    const Polynomial g(c.g_poly), h(c.h_poly);
    std::vector<double> init(k_max + 1);
    for (std::size_t k = 0; k <= k_max; ++k) init[k] = std::pow(c.initial, static_cast<double>(k));
    return generic_moment_ode(Polynomial(c.b_poly).coefficients(), (g * g).coefficients(), (h * h).coefficients(),
                              c.beta, init, k_max, t, c.dt)
        .back()
        .m;
  }
  return law_moments(preset_law(c, t), k_max).m;
}

const std::vector<std::string>& stat_vocabulary() {
  static const std::vector<std::string> v = [] {
    std::vector<std::string> s;
    for (int k = 1; k <= 8; ++k) s.push_back("m" + std::to_string(k));
    for (const char* x : {"min_eig", "max_eig", "ks", "w1", "neg_mass", "residual_x2", "residual_x4", "em_drift_x4",
                          "em_correction_x4", "em_interaction_x4", "em_martingale_x4", "clamp_events", "domain_exit",
                          "neg_mass_pred"})
      s.push_back(x);
    for (int k = 1; k <= 8; ++k)
      for (const char* suf : {"_mean", "_stderr", "_limit"}) s.push_back("m" + std::to_string(k) + suf);
    return s;
  }();
  return v;
}

bool known_stat(const std::string& s) {
  const auto& v = stat_vocabulary();
  return std::find(v.begin(), v.end(), s) != v.end();
}

RunOutcome run_preset(const ExperimentConfig& cfg, bool keep_paths) {
  RunOutcome out;
  try {
    validate(cfg);
  } catch (const ValidationError& e) {
    out.exit_status = 2;
    out.message = e.what();
    return out;
  }
  constexpr std::size_t K = 8;
  const std::string name = to_string(cfg.preset);
  const auto grid = cfg.grid();
  auto& rows = out.table.rows;
  try {
    const bool cdf_ok = cfg.preset != Preset::custom && has_cdf(preset_law(cfg, grid.back()));
    const auto coef = limit_coefficients(cfg);
    std::vector<std::vector<double>> lim;
    for (double t : grid) lim.push_back(limit_moments(cfg, t, K));
    std::vector<LimitLaw> laws;
    if (cdf_ok)
      for (double t : grid) laws.push_back(preset_law(cfg, t));

    for (std::size_t n : cfg.n_list) {
      const FlowSpec spec = flow_spec(cfg, n);
      for (auto& w : growth_condition_warnings(spec)) out.warnings.push_back(name + " n=" + std::to_string(n) + ": " + w);
      const auto paths = simulate_ensemble(spec, cfg.replica_count, splitmix64(cfg.base_seed ^ (0x9e37ULL * n)),
                                           cfg.threads);
      std::vector<std::vector<std::vector<double>>> mom(grid.size());  // [t][k][replica]
      for (auto& m : mom) m.assign(K + 1, {});
      std::vector<std::vector<double>> neg(grid.size());
      for (std::size_t r = 0; r < paths.size(); ++r) {
        const auto& path = paths[r];
        const std::string rep = std::to_string(r);
        const auto proc = EmpiricalMeasureProcess::from_path(path);
        for (std::size_t j = 0; j < grid.size(); ++j) {
          const double t = grid[j];
          const auto& mu = proc.measures[j];
          for (std::size_t k = 1; k <= K; ++k) {
            const double v = moment(mu, k);
            mom[j][k].push_back(v);
            rows.push_back({name, n, rep, t, "m" + std::to_string(k), v});
          }
          rows.push_back({name, n, rep, t, "min_eig", mu.atoms().front()});
          rows.push_back({name, n, rep, t, "max_eig", mu.atoms().back()});
          if (cdf_ok) {
            rows.push_back({name, n, rep, t, "ks", ks_distance(mu, laws[j])});
            rows.push_back({name, n, rep, t, "w1", wasserstein1(mu, laws[j])});
          }
          if (cfg.preset == Preset::wishart_nonunique) {
            const double v = cdf_left(mu, 0.0);
            neg[j].push_back(v);
            rows.push_back({name, n, rep, t, "neg_mass", v});
          }
        }
        const double tf = grid.back();
        rows.push_back({name, n, rep, tf, "residual_x2",
                        limit_equation_residual(proc, Polynomial::monomial(2), coef.g2, coef.h2, coef.b, coef.beta)});
        rows.push_back({name, n, rep, tf, "residual_x4",
                        limit_equation_residual(proc, Polynomial::monomial(4), coef.g2, coef.h2, coef.b, coef.beta)});
        const auto em = em_sde_decomposition(proc, Polynomial::monomial(4), spec);
        rows.push_back({name, n, rep, tf, "em_drift_x4", em.drift.back()});
        rows.push_back({name, n, rep, tf, "em_correction_x4", em.correction.back()});
        rows.push_back({name, n, rep, tf, "em_interaction_x4", em.interaction.back()});
        rows.push_back({name, n, rep, tf, "em_martingale_x4", em.martingale.back()});
        rows.push_back({name, n, rep, tf, "clamp_events", static_cast<double>(path.diagnostics.clamp_events)});
        rows.push_back({name, n, rep, tf, "domain_exit",
                        path.diagnostics.first_domain_exit ? *path.diagnostics.first_domain_exit : -1.0});
      }
      const double R = static_cast<double>(paths.size());
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid[j];
        for (std::size_t k = 1; k <= K; ++k) {
          const auto& v = mom[j][k];
          const double mean = std::accumulate(v.begin(), v.end(), 0.0) / R;
          double s2 = 0.0;
          for (double x : v) s2 += (x - mean) * (x - mean);
          const double se = R > 1 ? std::sqrt(s2 / (R - 1.0) / R) : 0.0;
          const std::string base = "m" + std::to_string(k);
          rows.push_back({name, n, "ens", t, base + "_mean", mean});
          rows.push_back({name, n, "ens", t, base + "_stderr", se});
          rows.push_back({name, n, "ens", t, base + "_limit", lim[j][k]});
        }
        if (cfg.preset == Preset::wishart_nonunique)
          rows.push_back({name, n, "ens", t, "neg_mass_pred", t > 0.0 ? (1.0 - cfg.alpha) / 2.0 : 0.0});
      }
      if (keep_paths) out.paths.push_back(paths);
    }
  } catch (const ValidationError& e) {
    out.table.rows.clear();
    out.paths.clear();
    out.exit_status = 2;
    out.message = e.what();
  } catch (const NumericalError& e) {
    out.table.rows.clear();
    out.paths.clear();
    out.exit_status = 3;
    out.message = e.what();
  }
  return out;
}

void write_csv(std::ostream& os, const ResultTable& table, const std::string& timestamp) {
  os << "# generated " << timestamp << "\n";
  os << "preset,n,replica,t,stat,value\n";
  for (const auto& r : table.rows)
    os << r.preset << ',' << r.n << ',' << r.replica << ',' << fmt(r.t) << ',' << r.stat << ',' << fmt(r.value) << '\n';
}

std::string csv_string(const ResultTable& table, const std::string& timestamp) {
  std::ostringstream os;
  write_csv(os, table, timestamp);
  return os.str();
}

std::string strip_timestamp(const std::string& csv) {
  if (csv.rfind("# generated", 0) == 0) {
    const auto nl = csv.find('\n');
    return nl == std::string::npos ? std::string{} : csv.substr(nl + 1);
  }
  return csv;
}

double median(std::vector<double> v) {
  if (v.empty()) throw ValidationError("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("log_log_slope: need two or more points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("log_log_slope: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n, my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw ValidationError("log_log_slope: need two or more distinct x");
  return sxy / sxx;
}

std::pair<std::vector<std::pair<std::size_t, double>>, double> median_slope(const ResultTable& table,
                                                                           const std::string& stat) {
  std::map<std::size_t, double> last_t;
  for (const auto& r : table.rows)
    if (r.stat == stat && r.replica != "ens") last_t[r.n] = std::max(last_t.count(r.n) ? last_t[r.n] : r.t, r.t);
  std::map<std::size_t, std::vector<double>> vals;
  for (const auto& r : table.rows)
    if (r.stat == stat && r.replica != "ens" && r.t == last_t[r.n]) vals[r.n].push_back(std::fabs(r.value));
  if (vals.size() < 2) throw ValidationError("sweep: '" + stat + "' needs two or more distinct n");
  std::vector<std::pair<std::size_t, double>> med;
  std::vector<double> x, y;
  for (const auto& [n, v] : vals) {
    med.emplace_back(n, median(v));
    x.push_back(static_cast<double>(n));
    y.push_back(med.back().second);
  }
  return {med, log_log_slope(x, y)};
}

SweepReport sweep_report(const ResultTable& table) {
  SweepReport rep;
  const auto [w, sw] = median_slope(table, "w1");
  const auto [k, sk] = median_slope(table, "ks");
  rep.slope_w1 = sw;
  rep.slope_ks = sk;
  for (std::size_t i = 0; i < w.size(); ++i) rep.points.push_back({w[i].first, w[i].second, k.at(i).second});
  rep.monotone_w1 = rep.monotone_ks = true;
  for (std::size_t i = 1; i < rep.points.size(); ++i) {
    rep.monotone_w1 = rep.monotone_w1 && rep.points[i].median_w1 < rep.points[i - 1].median_w1;
    rep.monotone_ks = rep.monotone_ks && rep.points[i].median_ks < rep.points[i - 1].median_ks;
  }
  return rep;
}

}  // namespace rmflow
