#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "deepmod/learners.hpp"
#include "deepmod/tabular.hpp"

using namespace deepmod;

namespace {

const std::array<double, 16> kExactValues = {
    5.31441, 5.9049, 6.561,  5.9049, 5.9049, -3.439, 7.29, -3.439,
    6.561,   7.29,   8.1,    -1.0,   -2.71,  8.1,    9.0,  10.0};

TrainingTrace make_trace(const std::vector<std::pair<int, double>>& train_rewards) {
    TrainingTrace t;
    for (auto [it, r] : train_rewards)
        t.records.push_back(TraceRecord{it, Phase::Train, r, 0.1, 0.0});
    return t;
}

}  // namespace

TEST_CASE("trunk presets have the documented shapes") {
    std::vector<LayerSpec> full = value_net_layers(16, default_value_trunk());
    REQUIRE(full.size() == 6);
    CHECK(full[0].fan_in == 16);
    for (int l = 0; l < 3; ++l) CHECK(full[l].activation == Activation::Tanh);
    for (int l = 3; l < 5; ++l) CHECK(full[l].activation == Activation::ReLU);
    CHECK(full[5].activation == Activation::Identity);
    CHECK(full[5].fan_out == 1);

    std::vector<LayerSpec> reduced = value_net_layers(32, reduced_value_trunk());
    REQUIRE(reduced.size() == 3);
    CHECK(reduced[0].fan_in == 32);
    CHECK(reduced[0].activation == Activation::ReLU);
    CHECK(reduced[1].activation == Activation::ReLU);
    CHECK(reduced[2].fan_out == 1);
}

TEST_CASE("stabilization iteration scans the trailing plateau") {
    TrainingTrace t = make_trace({{2, -30.0}, {4, 4.0}, {6, 4.0}, {8, 4.0}});
    CHECK(t.stabilization_iteration(4.0, 202) == 4);

    TrainingTrace all = make_trace({{2, 4.0}, {4, 4.0}});
    CHECK(all.stabilization_iteration(4.0, 202) == 2);

    TrainingTrace never = make_trace({{2, -30.0}, {4, 3.0}});
    CHECK(never.stabilization_iteration(4.0, 202) == 202);

    TrainingTrace dip = make_trace({{2, 4.0}, {4, -5.0}, {6, 4.0}});
    CHECK(dip.stabilization_iteration(4.0, 202) == 6);
}

TEST_CASE("trace csv carries phases, nan test losses and optional seconds") {
    TrainingTrace t;
    t.records.push_back(TraceRecord{2, Phase::Train, -30.0, 0.5, 1.25});
    t.records.push_back(TraceRecord{200, Phase::Test, 4.0,
                                    std::numeric_limits<double>::quiet_NaN(), 0.0});
    std::string with = trace_csv(t, true);
    CHECK(with.rfind("iteration,phase,reward,loss,seconds\n", 0) == 0);
    CHECK(with.find("2,train,-30,0.5,1.25") != std::string::npos);
    CHECK(with.find("200,test,4,nan") != std::string::npos);

    std::string without = trace_csv(t, false);
    CHECK(without.rfind("iteration,phase,reward,loss\n", 0) == 0);
    CHECK(without.find("1.25") == std::string::npos);
}

TEST_CASE("fitted value iteration on clean inputs reproduces the table") {
    GridSpec spec = GridSpec::lake_4x4();
    DdpnConfig cfg;
    cfg.seed = 1;
    TrainedValueNet trained = train_ddpn(spec, cfg, one_hot_source(spec));
    ValueTable values = ddpn_state_values(trained.net, one_hot_source(spec), spec);
    for (int i = 0; i < 16; ++i) {
        INFO("state ", i);
        CHECK(std::abs(values.v[i] - kExactValues[i]) <= 0.5);
    }

    std::vector<double> test_rewards = trained.trace.rewards(Phase::Test);
    REQUIRE(test_rewards.size() == 200);
    for (std::size_t i = test_rewards.size() - 50; i < test_rewards.size(); ++i)
        CHECK(test_rewards[i] == 4.0);

    int train_records = static_cast<int>(trained.trace.rewards(Phase::Train).size());
    CHECK(train_records == cfg.bellman_iterations / cfg.eval_every);
    CHECK(trained.train_seconds > 0.0);
}

TEST_CASE("distillation matches provided values and validates its input") {
    GridSpec spec = GridSpec::lake_4x4();
    ValueTable target = ValueTable::zeros(spec);
    for (int i = 0; i < 16; ++i) target.v[i] = kExactValues[i];

    DdpnConfig cfg;
    cfg.seed = 3;
    cfg.bellman_iterations = 40;
    TrainedValueNet trained = train_ddpn_q_distill(spec, cfg, target, one_hot_source(spec));
    ValueTable values = ddpn_state_values(trained.net, one_hot_source(spec), spec);
    for (int i = 0; i < 16; ++i) CHECK(std::abs(values.v[i] - target.v[i]) <= 0.5);

    ValueTable wrong{std::vector<double>(4, 0.0)};
    CHECK_THROWS_AS(train_ddpn_q_distill(spec, cfg, wrong, one_hot_source(spec)),
                    std::invalid_argument);
    ValueTable infinite = target;
    infinite.v[3] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(train_ddpn_q_distill(spec, cfg, infinite, one_hot_source(spec)),
                    std::invalid_argument);
}

TEST_CASE("runaway value estimates trip the divergence guard") {
    GridSpec spec = GridSpec::lake_4x4();
    ValueTable huge = ValueTable::constant(spec, 500.0);
    DdpnConfig cfg;
    cfg.seed = 2;
    cfg.learning_rate = 0.05;
    cfg.bellman_iterations = 200;
    CHECK_THROWS_AS(train_ddpn_q_distill(spec, cfg, huge, one_hot_source(spec)),
                    std::runtime_error);
}

TEST_CASE("action-value training finds the start state's worth") {
    GridSpec spec = GridSpec::lake_4x4();
    DqnConfig cfg;
    cfg.seed = 1;
    NoiseAugmenter train_noise(20, 11, NoiseMode::Resample);
    TrainedValueNet trained = train_dqn(spec, cfg, noisy_source(spec, train_noise));
    CHECK(trained.net.output_size() == 4);

    NoiseAugmenter eval_noise(20, 12, NoiseMode::FixedPerState);
    DerivedValues dv = dqn_state_values(trained.net, noisy_source(spec, eval_noise), spec);
    CHECK(dv.undefined.empty());
    CHECK(std::abs(dv.values.v[0] - 5.35) <= 1.0);
}
