#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "srk/errors.hpp"
#include "srk/harness.hpp"

using srk::RecoveryCurve;
using srk::SupportSet;

namespace {

srk::ExperimentConfig small_config() {
  srk::ExperimentConfig config;
  config.m = 120;
  config.n = 30;
  config.k = 3;
  config.k_hat = 5;
  config.signals = 20;
  config.corruption = {1, 2, 7.0, 1.0};
  config.budget = srk::FixedBudget{30};
  config.trials = 3;
  config.seed = 11;
  return config;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("support_recovery_fraction") {
  CHECK(srk::support_recovery_fraction(SupportSet({1, 2, 3}, 10), SupportSet({1, 2, 3}, 10)) == 1.0);
  CHECK(srk::support_recovery_fraction(SupportSet({0, 4}, 10), SupportSet({1, 2, 3}, 10)) == 0.0);
  CHECK(srk::support_recovery_fraction(SupportSet({1, 2, 4, 9}, 10), SupportSet({1, 2, 3, 5, 7}, 10)) == 0.4);
  CHECK(srk::support_precision(SupportSet({1, 2, 4, 9}, 10), SupportSet({1, 2, 3, 5, 7}, 10)) == 0.5);
  CHECK_THROWS_AS(srk::support_recovery_fraction(SupportSet({1}, 10), SupportSet({}, 10)), srk::ParameterError);
  CHECK_THROWS_AS(srk::support_recovery_fraction(SupportSet({1}, 10), SupportSet({1}, 11)), srk::DimensionError);
}

TEST_CASE("presets reproduce the experiment table") {
  CHECK(srk::preset_names().size() == 8);
  const auto fig1a = srk::preset("fig1a");
  CHECK(fig1a.signals == 300);
  CHECK(std::get<srk::FixedBudget>(fig1a.budget).per_signal == 40);
  CHECK(fig1a.m == 1000);
  CHECK(fig1a.n == 100);
  CHECK(fig1a.k == 10);
  CHECK(fig1a.k_hat == 15);
  CHECK(fig1a.ensemble == srk::Ensemble::gaussian);
  CHECK(fig1a.corruption.count_max == 1);

  const auto fig1b = srk::preset("fig1b");
  CHECK(fig1b.ensemble == srk::Ensemble::uniform01);
  CHECK(std::get<srk::FixedBudget>(fig1b.budget).per_signal == 80);
  CHECK(fig1b.signals == 600);

  CHECK(srk::preset("fig2a").corruption.mean == 0.0);
  CHECK(srk::preset("fig2b").corruption.stddev == 1.0);

  const auto fig3 = srk::preset("fig3");
  CHECK(fig3.corruption.count_min == 1);
  CHECK(fig3.corruption.count_max == 3);
  CHECK(fig3.corruption.mean == 7.0);
  CHECK(fig3.corruption.stddev == 1.0);
  CHECK(std::get<srk::FixedBudget>(fig3.budget).per_signal == 50);

  const auto fig4 = srk::preset("fig4");
  CHECK(fig4.signals == 800);
  const auto& online = std::get<srk::OnlineBudget>(fig4.budget);
  CHECK(online.p_stall == 0.1);
  CHECK(online.short_range == std::pair<std::size_t, std::size_t>{5, 15});
  CHECK(online.long_range == std::pair<std::size_t, std::size_t>{95, 100});

  const auto fig5 = srk::preset("fig5");
  CHECK(fig5.m == 100);
  CHECK(fig5.n == 500);
  CHECK(fig5.signals == 1500);

  const auto fig7 = srk::preset("fig7");
  CHECK(fig7.m == 248);
  CHECK(fig7.n == 541);
  CHECK(fig7.signals == 200);
  CHECK(std::holds_alternative<srk::FixedBudget>(fig7.budget));

  for (const auto& name : srk::preset_names()) CHECK_NOTHROW(srk::preset(name).validate());
  CHECK_THROWS_AS(srk::preset("fig6"), srk::ParameterError);
}

TEST_CASE("config validation") {
  auto config = small_config();
  config.budget = srk::OnlineBudget{};
  config.algorithm = srk::Algorithm::both;
  CHECK_THROWS_AS(config.validate(), srk::ParameterError);
  config.algorithm = srk::Algorithm::cmmv;
  CHECK_NOTHROW(config.validate());
  config.k_hat = 31;
  CHECK_THROWS_AS(config.validate(), srk::ParameterError);
  config = small_config();
  config.trials = 0;
  CHECK_THROWS_AS(config.validate(), srk::ParameterError);
}

TEST_CASE("run_trial recovers an uncorrupted support") {
  auto config = small_config();
  config.corruption = {0, 0, 7.0, 1.0};
  config.algorithm = srk::Algorithm::cmmv;
  config.budget = srk::FixedBudget{300};
  for (std::size_t t = 0; t < 5; ++t) {
    const auto result = srk::run_trial(config, t);
    REQUIRE(result.curves.size() == 1);
    CHECK(result.curves[0].label == "cmmv");
    CHECK(result.curves[0].points.back().mean == 1.0);
    CHECK(result.curves[0].points.back().projection == 6000);
  }
}

TEST_CASE("run_trial is deterministic and solver-independent in its instance") {
  const auto config = small_config();
  const auto a = srk::run_trial(config, 2);
  const auto b = srk::run_trial(config, 2);
  REQUIRE(a.curves.size() == 2);
  CHECK(a.curves == b.curves);
  CHECK(a.curves[0].label == "mmv");
  CHECK(a.curves[0].points.size() == 30);
  CHECK(a.curves[0].points.front().projection == 20);
  CHECK(a.curves[1].points.size() == 20);

  auto cmmv_only = config;
  cmmv_only.algorithm = srk::Algorithm::cmmv;
  CHECK(srk::run_trial(cmmv_only, 2).curves[0] == a.curves[1]);
  CHECK_FALSE(srk::run_trial(config, 3).curves == a.curves);
}

TEST_CASE("fig1a single trial is quantised in steps of 1/k") {
  auto config = srk::preset("fig1a");
  config.algorithm = srk::Algorithm::cmmv;
  const auto result = srk::run_trial(config, 0);
  for (const auto& point : result.curves[0].points) {
    const double scaled = point.mean * 10.0;
    CHECK(std::abs(scaled - std::round(scaled)) < 1e-12);
  }
}

TEST_CASE("aggregate_curves aligns by step interpolation") {
  const RecoveryCurve a{"c", {{10, 0.0, 0}, {20, 0.5, 0}, {40, 1.0, 0}}, 1};
  const RecoveryCurve b{"c", {{15, 0.5, 0}, {30, 1.0, 0}, {35, 1.0, 0}}, 1};
  const auto agg = srk::aggregate_curves({a, b});
  CHECK(agg.trials == 2);
  // Span [max first, min last] = [15, 35].
  REQUIRE(agg.points.size() == 4);
  const std::vector<std::size_t> grid{15, 20, 30, 35};
  const std::vector<double> means{0.25, 0.5, 0.75, 0.75};
  const std::vector<double> stds{0.25, 0.0, 0.25, 0.25};
  for (std::size_t g = 0; g < grid.size(); ++g) {
    CHECK(agg.points[g].projection == grid[g]);
    CHECK(agg.points[g].mean == doctest::Approx(means[g]));
    CHECK(agg.points[g].stddev == doctest::Approx(stds[g]));
  }
  CHECK_THROWS_AS(srk::aggregate_curves({}), srk::ParameterError);
  CHECK_THROWS_AS(srk::aggregate_curves({a, RecoveryCurve{"d", {{1, 0, 0}}, 1}}), srk::ParameterError);

  CHECK_FALSE(srk::value_at(agg, 14).has_value());
  CHECK(*srk::value_at(agg, 25) == doctest::Approx(0.5));
  CHECK(*srk::first_reaching(agg, 0.7) == 30);
  CHECK_FALSE(srk::first_reaching(agg, 0.9).has_value());
}

TEST_CASE("run_experiment aggregation") {
  auto config = small_config();
  config.trials = 1;
  const auto single = srk::run_experiment(config);
  const auto trial = srk::run_trial(config, 0);
  REQUIRE(single.curves.size() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(single.curves[c].points.size() == trial.curves[c].points.size());
    for (std::size_t p = 0; p < trial.curves[c].points.size(); ++p) {
      CHECK(single.curves[c].points[p].mean == trial.curves[c].points[p].mean);
      CHECK(single.curves[c].points[p].stddev == 0.0);
    }
  }

  config.trials = 6;
  const auto serial = srk::run_experiment(config, {1, {}});
  const auto parallel = srk::run_experiment(config, {3, {}});
  CHECK(serial.curves == parallel.curves);
  for (const auto& curve : serial.curves) {
    for (const auto& point : curve.points) {
      CHECK(point.mean >= 0.0);
      CHECK(point.mean <= 1.0);
      CHECK(point.stddev >= 0.0);
    }
  }
}

TEST_CASE("doubling trials keeps the mean within the CLT band") {
  auto config = small_config();
  config.trials = 10;
  const auto base = srk::run_experiment(config).curves;
  config.trials = 20;
  const auto doubled = srk::run_experiment(config).curves;
  for (std::size_t c = 0; c < base.size(); ++c) {
    for (const auto& point : base[c].points) {
      const double other = srk::value_at(doubled[c], point.projection).value();
      // Guard the zero-variance case with one quantum of the metric (1/k).
      const double band = std::max(2.0 * point.stddev / std::sqrt(10.0), 1.0 / 3.0);
      CHECK(std::abs(other - point.mean) <= band);
    }
  }
}

TEST_CASE("more uncorrupted signals never hurt the tally estimate on average") {
  auto config = small_config();
  config.corruption = {0, 0, 7.0, 1.0};
  config.algorithm = srk::Algorithm::cmmv;
  config.budget = srk::FixedBudget{120};
  config.trials = 10;
  const auto curve = srk::run_experiment(config).curves.at(0);
  const double half = srk::value_at(curve, 10 * 120).value();
  CHECK(curve.points.back().mean >= half);
}

TEST_CASE("run_experiment forwards trial progress and failures") {
  auto config = small_config();
  std::vector<std::size_t> seen;
  srk::RunOptions options{2, [&](std::size_t t, const srk::TrialResult&) { seen.push_back(t); }};
  srk::run_experiment(config, options);
  std::sort(seen.begin(), seen.end());
  CHECK(seen == std::vector<std::size_t>{0, 1, 2});

  config.k_hat = 0;
  CHECK_THROWS_AS(srk::run_experiment(config), srk::ParameterError);
}

TEST_CASE("CSV format") {
  const auto dir = std::filesystem::temp_directory_path() / "srk_test_harness_csv";
  std::filesystem::create_directories(dir);
  const RecoveryCurve one{"curve", {{100, 0.5, 0.0}}, 1};
  srk::write_csv({one}, dir / "one.csv");
  CHECK(slurp(dir / "one.csv") == "label,projection,mean,std\ncurve,100,0.5,0\n");

  const RecoveryCurve mmv{"mmv", {{300, 0.1, 0.030000000000000002}, {600, 1.0 / 3.0, 0.125}}, 4};
  const RecoveryCurve cmmv{"cmmv", {{40, 0.7, 0.2}, {80, 0.9999999999999999, 1e-17}}, 4};
  srk::write_csv({mmv, cmmv}, dir / "two.csv");
  const auto text = slurp(dir / "two.csv");
  CHECK(text.find("mmv,300,0.1,0.030000000000000002\nmmv,600,") != std::string::npos);
  CHECK(text.find("mmv,600") < text.find("cmmv,40"));

  const auto back = srk::read_csv(dir / "two.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].label == "mmv");
  CHECK(back[0].points == mmv.points);
  CHECK(back[1].points == cmmv.points);

  CHECK_THROWS_AS(srk::to_csv({}), srk::ParameterError);
  CHECK_THROWS_AS(srk::to_csv({RecoveryCurve{"a,b", {}, 1}}), srk::ParameterError);
  CHECK_THROWS_AS(srk::parse_csv("nope\n"), srk::ParameterError);
  CHECK_THROWS_AS(srk::parse_csv("label,projection,mean,std\nx,1,2\n"), srk::ParameterError);
  try {
    srk::write_csv({one}, dir / "missing" / "x.csv");
    FAIL("expected an I/O error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("CSV round trip is exact for random values") {
  srk::Rng rng(3);
  RecoveryCurve curve{"r", {}, 1};
  std::size_t projection = 0;
  for (int p = 0; p < 500; ++p) {
    projection += 1 + rng.uniform_index(50);
    curve.points.push_back({projection, rng.uniform01(), rng.uniform01() * 0.5});
  }
  CHECK(srk::parse_csv(srk::to_csv({curve})).at(0).points == curve.points);
}

TEST_CASE("describe lists the table parameters") {
  CHECK(srk::preset("fig3").describe().find("corruptions=1..3") != std::string::npos);
  CHECK(srk::preset("fig4").describe().find("online(p=0.1,[5,15],[95,100])") != std::string::npos);
}
