#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "deepmod/efm.hpp"

using namespace deepmod;

namespace {

const std::array<double, 16> kExactValues = {
    5.31441, 5.9049, 6.561,  5.9049, 5.9049, -3.439, 7.29, -3.439,
    6.561,   7.29,   8.1,    -1.0,   -2.71,  8.1,    9.0,  10.0};

ValueTable exact_table(const GridSpec& spec) {
    ValueTable t = ValueTable::zeros(spec);
    for (int i = 0; i < 16; ++i) t.v[i] = kExactValues[i];
    return t;
}

/// Injective hand-made feature map: state index in binary across the first
/// four bits, everything else -1.
StateFeatureMap synthetic_fmap(const GridSpec& spec) {
    StateFeatureMap m;
    m.checkpoint_id = "synthetic";
    m.layer_index = 3;
    m.injective = true;
    for (int i = 0; i < spec.n_states(); ++i) {
        FeatureVector f{};
        for (int b = 0; b < kFeatureWidth; ++b)
            f.bits[b] = (b < 4 && ((i >> b) & 1)) ? 1 : -1;
        m.by_state.push_back(f);
    }
    return m;
}

Efm full_efm(const GridSpec& spec, const StateFeatureMap& fmap) {
    ExplorationConfig cfg;
    ValueTable guide = exact_table(spec);
    return build_efm(spec, RewardModel::dp_arrival(), fmap, cfg, &guide);
}

Network zero_value_net() {
    return init_network({{kFeatureWidth, 8, Activation::ReLU}, {8, 1, Activation::Identity}},
                        1, /*zero_final=*/true);
}

}  // namespace

TEST_CASE("exploration schedule decays per episode") {
    ExplorationConfig cfg;
    CHECK(exploration_epsilon(cfg, 0) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(exploration_epsilon(cfg, 10) ==
          doctest::Approx(0.813943867507924).epsilon(1e-12));
    CHECK(exploration_epsilon(cfg, 1000) < 0.01);
}

TEST_CASE("guided exploration covers all sixty pairs") {
    GridSpec spec = GridSpec::lake_4x4();
    StateFeatureMap fmap = synthetic_fmap(spec);
    Efm efm = full_efm(spec, fmap);
    CHECK(efm.fully_covered);
    CHECK(efm.missing.empty());
    CHECK(efm.covered.size() == 60);
    CHECK(efm.table.size() == 60);
    CHECK(efm.episodes_used <= 500);
    CHECK(efm.conflicts.empty());
    CHECK(efm.feature_map_id == fmap.checkpoint_id);
}

TEST_CASE("unguided exploration also covers the lake") {
    GridSpec spec = GridSpec::lake_4x4();
    StateFeatureMap fmap = synthetic_fmap(spec);
    ExplorationConfig cfg;
    Efm efm = build_efm(spec, RewardModel::dp_arrival(), fmap, cfg, nullptr);
    CHECK(efm.fully_covered);
    CHECK(efm.table.size() == 60);
}

TEST_CASE("starved exploration reports what is missing") {
    GridSpec spec = GridSpec::lake_4x4();
    StateFeatureMap fmap = synthetic_fmap(spec);
    ExplorationConfig cfg;
    cfg.max_episodes = 1;
    cfg.max_steps = 2;
    Efm efm = build_efm(spec, RewardModel::dp_arrival(), fmap, cfg, nullptr);
    CHECK_FALSE(efm.fully_covered);
    CHECK_FALSE(efm.missing.empty());
    CHECK(efm.table.size() + efm.missing.size() == 60);
}

TEST_CASE("lookups are exact and misses throw") {
    GridSpec spec = GridSpec::lake_4x4();
    StateFeatureMap fmap = synthetic_fmap(spec);
    Efm efm = full_efm(spec, fmap);
    RewardModel dp = RewardModel::dp_arrival();

    for (int i = 0; i < spec.n_states(); ++i) {
        State s{i};
        if (spec.is_goal(s)) continue;
        for (Action a : kAllActions) {
            TransitionOutcome t = step(spec, dp, s, a);
            const EfmEntry& e = efm_lookup(efm, fmap[s], a);
            CHECK(e.next == fmap[t.next]);
            CHECK(e.reward == t.reward);
        }
    }

    Efm empty;
    CHECK_THROWS_AS(efm_lookup(empty, fmap[State{0}], Action::Up), EfmMissError);
    CHECK_THROWS_AS(efm_lookup(empty, fmap[State{0}], Action::Up), std::runtime_error);
}

TEST_CASE("feature-model greedy action maximizes immediate reward under a zero net") {
    GridSpec spec = GridSpec::lake_4x4();
    StateFeatureMap fmap = synthetic_fmap(spec);
    Efm efm = full_efm(spec, fmap);
    Network net = zero_value_net();
    CHECK(efm_greedy_action(efm, net, fmap[State{14}], 0.9) == Action::Right);
    CHECK(efm_greedy_action(efm, net, fmap[State{0}], 0.9) == Action::Up);
    CHECK(efm_greedy_action(efm, net, fmap[State{1}], 0.9) == Action::Up);
}

TEST_CASE("feature-model csv round-trips bit for bit") {
    GridSpec spec = GridSpec::lake_4x4();
    StateFeatureMap fmap = synthetic_fmap(spec);
    Efm efm = full_efm(spec, fmap);
    std::string csv = efm_csv(efm);
    CHECK(csv.rfind("f0", 0) == 0);
    Efm back = efm_from_csv(csv);
    CHECK(back.table.size() == efm.table.size());
    CHECK(efm_csv(back) == csv);
    for (const auto& [key, entry] : efm.table) {
        const EfmEntry& e = efm_lookup(back, key.f, key.a);
        CHECK(e.next == entry.next);
        CHECK(e.reward == entry.reward);
    }
}

TEST_CASE("value training against the feature model tracks the table") {
    GridSpec spec = GridSpec::lake_4x4();
    StateFeatureMap fmap = synthetic_fmap(spec);
    Efm efm = full_efm(spec, fmap);
    DdpnConfig cfg;
    cfg.hidden = reduced_value_trunk();
    cfg.seed = 4;
    TrainedValueNet trained = train_ddpn2(spec, efm, fmap, cfg);
    for (int i = 0; i < 16; ++i) {
        double got = trained.net.predict(feature_input(fmap[State{i}]))[0];
        INFO("state ", i);
        CHECK(std::abs(got - kExactValues[i]) <= 1.2);
    }
    std::vector<double> test_rewards = trained.trace.rewards(Phase::Test);
    REQUIRE(!test_rewards.empty());
    CHECK(test_rewards.back() == 4.0);
}

TEST_CASE("value training requires full coverage") {
    GridSpec spec = GridSpec::lake_4x4();
    StateFeatureMap fmap = synthetic_fmap(spec);
    ExplorationConfig ecfg;
    ecfg.max_episodes = 1;
    ecfg.max_steps = 2;
    Efm partial = build_efm(spec, RewardModel::dp_arrival(), fmap, ecfg, nullptr);
    DdpnConfig cfg;
    cfg.hidden = reduced_value_trunk();
    CHECK_THROWS_AS(train_ddpn2(spec, partial, fmap, cfg), std::invalid_argument);
}

TEST_CASE("the full pipeline is deterministic run to run") {
    GridSpec spec = GridSpec::lake_4x4();
    PipelineConfig cfg;
    CHECK(cfg.use_dqn);     // shipped default: action-value net for stage (i)
    cfg.use_dqn = false;    // exercise the tabular variant; it is much faster
    cfg.master_seed = 6;
    cfg.ddpn1.bellman_iterations = 30;
    cfg.ddpn1.epochs_per_iteration = 10;
    cfg.ddpn1.test_episodes = 10;
    cfg.ddpn2.bellman_iterations = 30;
    cfg.ddpn2.epochs_per_iteration = 10;
    cfg.ddpn2.test_episodes = 10;
    cfg.q_learning.episodes = 1500;

    PipelineArtifacts a = run_deepmod_pipeline(spec, cfg);
    PipelineArtifacts b = run_deepmod_pipeline(spec, cfg);
    CHECK(a.master_seed == 6);
    CHECK_FALSE(a.used_dqn);
    CHECK(value_table_csv(spec, a.stage1_values) == value_table_csv(spec, b.stage1_values));
    CHECK(network_fingerprint(a.ddpn1.net) == network_fingerprint(b.ddpn1.net));
    CHECK(feature_map_csv(spec, a.fmap) == feature_map_csv(spec, b.fmap));
    CHECK(efm_csv(a.efm) == efm_csv(b.efm));
    CHECK(network_fingerprint(a.ddpn2.net) == network_fingerprint(b.ddpn2.net));
    CHECK(trace_csv(a.ddpn2.trace, false) == trace_csv(b.ddpn2.trace, false));
    REQUIRE(a.policy.choice.size() == 16);
    for (int i = 0; i < 16; ++i) CHECK(a.policy.choice[i] == b.policy.choice[i]);
}
