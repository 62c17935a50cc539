#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "deepmod/harness.hpp"

using namespace deepmod;

namespace {

/// Small-but-real settings so the reproduction entry points finish quickly.
ExperimentOptions smoke_options(const std::string& out_subdir) {
    ExperimentOptions opt;
    opt.seeds = {1, 2, 3};
    opt.qlearn.episodes = 1200;
    for (DdpnConfig* d : {&opt.ddpn_full, &opt.ddpn_reduced}) {
        d->bellman_iterations = 20;
        d->epochs_per_iteration = 10;
        d->test_episodes = 10;
    }
    opt.explore.max_episodes = 300;
    opt.out_dir = (std::filesystem::temp_directory_path() / out_subdir).string();
    std::filesystem::remove_all(opt.out_dir);
    return opt;
}

}  // namespace

TEST_CASE("config text parsing") {
    KeyValueConfig cfg = KeyValueConfig::from_text(
        "# comment\n"
        "\n"
        "  seeds = 3,4  \n"
        "qlearning.alpha=0.5\n"
        "ddpn.iterations = 12\n"
        "name=with=equals\n");
    CHECK(cfg.has("seeds"));
    CHECK(cfg.get("seeds", "") == "3,4");
    CHECK(cfg.get_double("qlearning.alpha", 0.0) == 0.5);
    CHECK(cfg.get_int("ddpn.iterations", 0) == 12);
    CHECK(cfg.get("name", "") == "with=equals");
    CHECK(cfg.get("absent", "fallback") == "fallback");
    CHECK(cfg.get_int("absent", 7) == 7);
    CHECK_THROWS_AS(KeyValueConfig::from_text("novalue\n"), std::invalid_argument);
}

TEST_CASE("config drives the experiment options") {
    KeyValueConfig cfg = KeyValueConfig::from_text(
        "seeds=3,4\n"
        "qlearning.alpha=0.5\n"
        "ddpn.iterations=12\n"
        "noise.n=8\n"
        "extraction.layer=2\n"
        "out=elsewhere\n");
    ExperimentOptions opt = options_from_config(cfg);
    REQUIRE(opt.seeds.size() == 2);
    CHECK(opt.seeds[0] == 3);
    CHECK(opt.seeds[1] == 4);
    CHECK(opt.qlearn.alpha == 0.5);
    CHECK(opt.ddpn_full.bellman_iterations == 12);
    CHECK(opt.ddpn_reduced.bellman_iterations == 12);
    CHECK(opt.n_noise == 8);
    CHECK(opt.extraction_layer == 2);
    CHECK(opt.out_dir == "elsewhere");

    ExperimentOptions defaults = options_from_config(KeyValueConfig{});
    REQUIRE(defaults.seeds.size() == 5);
    CHECK(defaults.seeds[0] == 1);
    CHECK(defaults.ddpn_reduced.hidden.size() == 2);
}

TEST_CASE("published reference columns are what the tables say") {
    CHECK(table1_value_iteration_reference()[0] == 5.31);
    CHECK(table1_value_iteration_reference()[14] == 8.99);
    CHECK(table1_q_learning_reference()[10] == 8.1);
    CHECK(table1_ddpn_reference()[15] == 9.85);
    CHECK(table1_reduced_ddpn_reference()[5] == -3.92);
}

TEST_CASE("value csv layout") {
    GridSpec spec = GridSpec::lake_4x4();
    ValueTable zeros = ValueTable::zeros(spec);
    std::string csv = values_csv(spec, {{"a", zeros}, {"b", zeros}}, {{"a", zeros}});
    CHECK(csv.rfind("state,a,b,delta_a\n", 0) == 0);
    int lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 17);
    CHECK(csv.find("\nP,0,0,0\n") != std::string::npos);
}

TEST_CASE("curve svg is deterministic and timestamp-free") {
    CurveSeries s{"method", {{2, -30.0}, {4, 4.0}}};
    std::string one = curves_svg("train", {s}, "test", {s});
    std::string two = curves_svg("train", {s}, "test", {s});
    CHECK(one == two);
    CHECK(one.rfind("<svg", 0) == 0);
    CHECK(one.find("method") != std::string::npos);
    CHECK(one.find("<!--") == std::string::npos);  // no generator/timestamp comments
}

TEST_CASE("gradient check accepts a sane small network") {
    Network net = init_network(
        {{2, 3, Activation::Tanh}, {3, 1, Activation::Identity}}, 12);
    CHECK(gradient_check(net, {0.3, -0.8}, {0.5}) <= 1e-4);
}

TEST_CASE("table reproduction smoke run writes its artifacts") {
    ExperimentOptions opt = smoke_options("deepmod_t1_smoke");
    RunReport rep = reproduce_table1(opt);
    CHECK(rep.experiment == "table1");
    REQUIRE(rep.columns.size() == 4);
    CHECK(rep.columns[1].method == "value_iteration");
    for (const MethodColumn& c : rep.columns) CHECK(c.values.v.size() == 16);
    CHECK_FALSE(rep.checks.empty());
    CHECK(rep.method_seconds.count("ddpn") == 1);
    CHECK(std::filesystem::exists(opt.out_dir + "/values_table1.csv"));
    CHECK(std::filesystem::exists(opt.out_dir + "/trace_ddpn_1.csv"));
    CHECK(std::filesystem::exists(opt.out_dir + "/trace_reduced_ddpn_3.csv"));
    std::filesystem::remove_all(opt.out_dir);
}

TEST_CASE("curve reproduction smoke run writes traces and the figure") {
    ExperimentOptions opt = smoke_options("deepmod_fig5_smoke");
    CurveSummary summary = reproduce_curves(5, opt);
    CHECK(summary.report.experiment == "fig5");
    CHECK(summary.stabilization_median.count("ddpn_noisy") == 1);
    CHECK(summary.stabilization_median.count("reduced_ddpn") == 1);
    CHECK(std::filesystem::exists(opt.out_dir + "/curves_5.svg"));
    CHECK(std::filesystem::exists(opt.out_dir + "/trace_ddpn_noisy_2.csv"));
    CHECK_THROWS_AS(reproduce_curves(4, opt), std::invalid_argument);
    std::filesystem::remove_all(opt.out_dir);
}

TEST_CASE("timing report orders the two training modes") {
    ExperimentOptions opt = smoke_options("deepmod_timing_smoke");
    opt.write_artifacts = false;
    RunReport rep = timing_report(opt);
    REQUIRE(rep.checks.size() == 1);
    CHECK(rep.method_seconds.at("ddpn_noisy") > 0.0);
    CHECK(rep.method_seconds.at("reduced_ddpn") > 0.0);
}
