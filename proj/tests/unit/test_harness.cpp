#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cswitch/error.hpp"
#include "cswitch/harness.hpp"
#include "cswitch/presets.hpp"

using namespace cswitch;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.scenario = "unit";
  cfg.instance.generator = "stationary";
  cfg.instance.n_units = 1;
  cfg.instance.horizon = 64;
  cfg.instance.m = 3;
  cfg.design.block_length = 8;
  EstimatorSpec ht;
  ht.label = "HT";
  ht.radius = 8;
  EstimatorSpec dim;
  dim.kind = "dim";
  dim.label = "DIM";
  EstimatorSpec dimbi;
  dimbi.kind = "dimbi";
  dimbi.label = "DIMBI";
  dimbi.burn_in = 4;
  cfg.estimators = {ht, dim, dimbi};
  cfg.n_instances = 3;
  cfg.n_draws = 12;
  cfg.seed = 99;
  return cfg;
}

std::string csv_of(const ReplicationReport& r) {
  std::ostringstream out;
  write_csv(out, r);
  return out.str();
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("log-log slope") {
    std::vector<std::pair<double, double>> inv, inv2, flat;
    for (double x : {1.0, 2.0, 5.0, 10.0, 40.0}) {
      inv.emplace_back(x, 3.0 / x);
      inv2.emplace_back(x, 3.0 / (x * x));
      flat.emplace_back(x, 3.0);
    }
    CHECK(loglog_slope(inv) == doctest::Approx(-1.0));
    CHECK(loglog_slope(inv2) == doctest::Approx(-2.0));
    CHECK(loglog_slope(flat) == doctest::Approx(0.0));
    CHECK_THROWS_AS(loglog_slope({{1.0, 0.0}, {2.0, 1.0}}), ValidationError);
    CHECK_THROWS_AS(loglog_slope({{2.0, 1.0}, {2.0, 3.0}}), ValidationError);
  }

  TEST_CASE("config json round trip") {
    const auto cfg = small_config();
    const auto doc = to_json(cfg);
    const auto back = config_from_json(doc);
    CHECK(to_json(back) == doc);
    CHECK(doc.at("instance").at("T") == 64);
    CHECK(doc.at("design").at("ell") == 8);

    const auto wrapped = configs_from_json(nlohmann::json{{"experiments", {doc, doc}}});
    CHECK(wrapped.size() == 2);
    CHECK(configs_from_json(doc).size() == 1);
  }

  TEST_CASE("config validation") {
    auto cfg = small_config();
    cfg.instance.generator = "bogus";
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = small_config();
    cfg.n_draws = 0;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = small_config();
    cfg.estimators[0].kind = "ols";
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = small_config();
    cfg.design.clustering = "lattice";
    cfg.design.width = 3;
    cfg.instance.n_units = 10;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = small_config();
    cfg.estimators[2].burn_in = 8;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"instance", {{"generator", "stationary"}, {"T", -3}}}}),
                    std::exception);
  }

  TEST_CASE("results do not depend on the worker count") {
    const auto cfg = small_config();
    const auto one = csv_of(run_experiment(cfg, 1));
    CHECK(one == csv_of(run_experiment(cfg, 4)));
    CHECK(one == csv_of(run_experiment(cfg, 1)));
    auto other = cfg;
    other.seed = 100;
    CHECK(one != csv_of(run_experiment(other, 1)));
  }

  TEST_CASE("aggregate identities") {
    const auto report = run_experiment(small_config(), 2);
    REQUIRE(report.rows.size() == 3);
    for (const auto& row : report.rows) {
      CHECK(row.dropped_draws + row.n_effective == 36);
      if (row.n_effective == 0) continue;
      CHECK(row.mse == doctest::Approx(row.variance + row.bias * row.bias).epsilon(1e-12));
      CHECK(row.variance >= -1e-12);
      CHECK(row.bias_ci95 >= 0.0);
    }
    CHECK(report.rows[0].dropped_draws == 0);
  }

  TEST_CASE("failed draws are counted, not averaged") {
    auto cfg = small_config();
    cfg.instance.horizon = 8;
    cfg.design.block_length = 4;
    cfg.estimators = {cfg.estimators[1]};
    cfg.n_draws = 40;
    const auto row = run_experiment(cfg, 1).rows.at(0);
    CHECK(row.dropped_draws > 0);
    CHECK(row.n_effective > 0);
    CHECK(row.dropped_draws + row.n_effective == 120);
  }

  TEST_CASE("header-only csv for an empty report") {
    const auto text = csv_of(ReplicationReport{});
    CHECK(text ==
          "scenario,estimator,N,T,ell,r,b,n_instances,n_draws,gate,mse,bias,bias_ci95,variance,retained_frac,"
          "dropped_draws,seed\n");
  }

  TEST_CASE("emit_results writes a config sidecar") {
    const auto dir = std::filesystem::temp_directory_path() / "cswitch_harness_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "out.csv").string();
    auto cfg = small_config();
    cfg.n_instances = 1;
    cfg.n_draws = 2;
    emit_results(run_experiment(cfg, 1), path);
    std::ifstream csv(path), side(path + ".config.json");
    REQUIRE(csv.good());
    REQUIRE(side.good());
    const auto doc = nlohmann::json::parse(side);
    const auto back = configs_from_json(doc);
    REQUIRE(back.size() == 1);
    CHECK(to_json(back[0]) == to_json(cfg));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("single-unit preset") {
    const auto cfgs = preset_single_unit(512, SingleScenario::stationary);
    REQUIRE(cfgs.size() == 5);
    CHECK(cfgs[0].estimators[0].label == "HT-OPT");
    CHECK(cfgs[0].design.block_length == 188);
    CHECK(cfgs[0].estimators[0].radius == 188);
    CHECK(cfgs[2].estimators[0].burn_in == 94);
    CHECK(cfgs[3].design.block_length == 8);
    CHECK(cfgs[3].estimators[0].radius == 24);
    CHECK(cfgs[4].design.block_length == 64);
    CHECK(cfgs[4].estimators[0].radius == 188);
    for (const auto& c : cfgs) {
      CHECK(c.instance.m == 30);
      CHECK(c.n_instances == 20);
      CHECK(c.n_draws == 50);
      CHECK_NOTHROW(validate(c));
    }
    const auto ns = preset_single_unit(512, SingleScenario::nonstationary);
    CHECK(ns[0].instance.ell_opt == 188);
    CHECK(full_scale({}).n_instances == 100);
    CHECK(full_scale({}).n_draws == 100);
  }

  TEST_CASE("multi-unit presets") {
    const auto eq = preset_multi_unit(Scaling::n_eq_t, 64);
    REQUIRE(eq.size() == 3);
    const auto r = static_cast<std::size_t>(std::ceil(30.0 * std::log(64.0 * 64.0)));
    for (const auto& c : eq) {
      CHECK(c.instance.n_units == 64);
      CHECK(c.instance.horizon == 64);
      CHECK(c.instance.generator == "multi_unit");
      CHECK(c.estimators[0].radius == r);
    }
    CHECK(eq[0].design.clustering == "whole");
    CHECK(eq[1].design.block_length == 64);
    CHECK(eq[2].design.clustering == "line_segments");

    const auto nst = preset_multi_unit(Scaling::n_sqrt_t, 1024);
    CHECK(nst[0].instance.n_units == 32);
    CHECK(nst[0].instance.horizon == 1024);
    const auto tsn = preset_multi_unit(Scaling::t_sqrt_n, 1024);
    CHECK(tsn[0].instance.n_units == 1024);
    CHECK(tsn[0].instance.horizon == 32);
    CHECK_THROWS_AS(preset_multi_unit(Scaling::n_sqrt_t, 1000), ValidationError);
  }

  TEST_CASE("named presets") {
    for (const auto& name : preset_names()) CHECK_FALSE(named_preset(name).empty());
    CHECK(named_preset("mse-single-stationary", {}, 256).size() == 5);
    CHECK(named_preset("mse-single-stationary").size() == 20);
    CHECK_THROWS_AS(named_preset("nope"), ValidationError);
  }
}
