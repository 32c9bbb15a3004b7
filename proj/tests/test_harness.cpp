#include <doctest.h>

#include <cmath>
#include <map>

#include "rmflow/errors.hpp"
#include "rmflow/harness.hpp"

using namespace rmflow;

namespace {

ExperimentConfig small(Preset p) {
  ExperimentConfig c;
  c.preset = p;
  apply_preset_defaults(c);
  c.n_list = {6, 10};
  c.replica_count = 3;
  c.t_final = 0.2;
  c.t_step = 0.1;
  c.dt = 1e-2;
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "# comment\n"
      "preset = wishart   # trailing\n"
      "n_list = 50, 100\n"
      "replicas = 4\n"
      "alpha = 3.5\n"
      "t_grid = 0, 0.5, 1\n");
  CHECK(c.preset == Preset::wishart);
  CHECK(c.n_list == std::vector<std::size_t>{50, 100});
  CHECK(c.replica_count == 4);
  CHECK(c.alpha == 3.5);
  CHECK(c.beta == 2);  // preset default kept
  CHECK(c.grid() == std::vector<double>{0, 0.5, 1});

  // preset applies first even when listed last
  CHECK(parse_config("alpha = 0.25\npreset = wishart_nonunique\n").alpha == 0.25);

  CHECK_THROWS_AS(parse_config("nonsense = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("alpha = abc\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("alpha 3\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("preset = nope\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("dt = 1\ndt = 2\n"), ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/x.cfg"), ValidationError);

  ExperimentConfig g;
  g.t_final = 1.0;
  g.t_step = 0.25;
  CHECK(g.grid() == std::vector<double>{0, 0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("every preset lists its keys and validates with defaults") {
  for (Preset p : all_presets()) {
    CHECK(parse_preset(to_string(p)) == p);
    CHECK_FALSE(preset_summary(p).empty());
    CHECK(preset_keys(p).size() >= 10);
    ExperimentConfig c;
    c.preset = p;
    apply_preset_defaults(c);
    CHECK_NOTHROW(validate(c));
  }
}

TEST_CASE("Wishart positivity inequality") {
  ExperimentConfig c;
  c.preset = Preset::wishart;
  apply_preset_defaults(c);
  c.n_list = {50};
  c.alpha = 2.5;
  CHECK_NOTHROW(validate(c));
  c.alpha = 1.5;
  try {
    validate(c);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("c3(n) >= c1(n) c2(n) (beta (n-1) + 2)") != std::string::npos);
  }
  const auto out = run_preset(c);
  CHECK(out.exit_status == 2);
  CHECK(out.table.rows.empty());

  // boundary: alpha n = beta (n - 1) + 2 holds with equality
  c.n_list = {10};
  c.alpha = 2.0;
  CHECK_NOTHROW(validate(c));
  c.beta = 1;
  c.alpha = 1.05;  // 10.5 >= 11 fails
  CHECK_THROWS_AS(validate(c), ValidationError);
}

TEST_CASE("other validation failures") {
  auto c = small(Preset::wishart_nonunique);
  c.alpha = 1.0;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = small(Preset::wishart_nonunique);
  c.beta = 2;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = small(Preset::jacobi);
  c.a = 1.5;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = small(Preset::jacobi);
  c.p = 0.5;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = small(Preset::wigner);
  c.n_list = {10, 6};
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = small(Preset::wigner);
  c.beta = 4;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = small(Preset::custom);
  c.g_poly = {0, 0, 1};
  CHECK_THROWS_AS(validate(c), ValidationError);
}

TEST_CASE("nonunique start has k* negative eigenvalues") {
  auto c = small(Preset::wishart_nonunique);
  const auto s = flow_spec(c, 10);
  // ceil((11 - 5) / 2) = 3
  int neg = 0;
  for (double x : s.initial_spectrum) neg += x < 0.0;
  CHECK(neg == 3);
}

TEST_CASE("result table shape and vocabulary") {
  for (Preset p : all_presets()) {
    CAPTURE(to_string(p));
    auto c = small(p);
    if (p == Preset::wishart) c.alpha = 3.0;
    if (p == Preset::jacobi) c.p = c.q = 2.0;
    const auto out = run_preset(c);
    REQUIRE(out.exit_status == 0);
    std::map<std::tuple<std::size_t, std::string, double>, int> count;
    for (const auto& r : out.table.rows) {
      CHECK(known_stat(r.stat));
      CHECK(std::isfinite(r.value));
      if (r.replica != "ens") ++count[{r.n, r.stat, r.t}];
    }
    for (const auto& [key, k] : count) CHECK(k == 3);
    CHECK(count.count({6, "m4", 0.1}) == 1);
    CHECK(count.count({10, "residual_x4", 0.2}) == 1);
    const bool has_law = p != Preset::custom && p != Preset::geometric && p != Preset::jacobi;
    CHECK(count.count({10, "w1", 0.2}) == (has_law ? 1u : 0u));
  }
}

TEST_CASE("ensemble limits match the preset law") {
  auto c = small(Preset::wigner);
  const auto out = run_preset(c);
  for (const auto& r : out.table.rows)
    if (r.stat == "m2_limit") CHECK(r.value == doctest::Approx(r.t).epsilon(1e-12));
  // custom with the Wigner coefficients reproduces the same moments
  auto d = small(Preset::custom);
  d.g_poly = {0.5};
  d.h_poly = {1.0};
  const auto m = limit_moments(d, 0.7, 4);
  CHECK(m[2] == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(m[4] == doctest::Approx(2 * 0.49).epsilon(1e-9));
}

TEST_CASE("CSV is reproducible and independent of threads") {
  auto c = small(Preset::wigner);
  const auto a = csv_string(run_preset(c).table, "T1");
  const auto b = csv_string(run_preset(c).table, "T2");
  c.threads = 4;
  const auto d = csv_string(run_preset(c).table, "T3");
  CHECK(a != b);
  CHECK(strip_timestamp(a) == strip_timestamp(b));
  CHECK(strip_timestamp(a) == strip_timestamp(d));
  CHECK(strip_timestamp(a).rfind("preset,n,replica,t,stat,value\n", 0) == 0);
  CHECK(a.find('\r') == std::string::npos);
  c.base_seed = 2;
  CHECK(strip_timestamp(csv_string(run_preset(c).table, "T")) != strip_timestamp(a));
}

TEST_CASE("sweep slope") {
  ResultTable t;
  for (std::size_t n : {25, 50, 100, 200})
    for (int r = 0; r < 5; ++r) {
      const double v = (1.0 + 0.01 * r) / std::sqrt(static_cast<double>(n));
      t.rows.push_back({"x", n, std::to_string(r), 0.0, "w1", 99.0});  // earlier time is ignored
      t.rows.push_back({"x", n, std::to_string(r), 1.0, "w1", v});
      t.rows.push_back({"x", n, std::to_string(r), 1.0, "ks", 0.3});
    }
  const auto rep = sweep_report(t);
  CHECK(rep.slope_w1 == doctest::Approx(-0.5).epsilon(0.05 / 0.5));
  CHECK(std::fabs(rep.slope_ks) <= 1e-12);
  CHECK(rep.monotone_w1);
  CHECK_FALSE(rep.monotone_ks);
  CHECK(rep.points.size() == 4);
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);

  ResultTable one;
  one.rows.push_back({"x", 10, "0", 1.0, "w1", 0.1});
  one.rows.push_back({"x", 10, "0", 1.0, "ks", 0.1});
  CHECK_THROWS_AS(sweep_report(one), ValidationError);
}
