#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <stdexcept>

#include "deepmod/tabular.hpp"

using namespace deepmod;

namespace {

// Exact fixed point of the value recurrence on the 4x4 lake with gamma 0.9,
// computed by hand from the goal backwards (each entry is a finite product of
// 0.9 with the arrival rewards).
const std::array<double, 16> kExactValues = {
    5.31441, 5.9049, 6.561,  5.9049, 5.9049, -3.439, 7.29, -3.439,
    6.561,   7.29,   8.1,    -1.0,   -2.71,  8.1,    9.0,  10.0};

ValueTable exact_table() {
    ValueTable t = ValueTable::zeros(GridSpec::lake_4x4());
    for (int i = 0; i < 16; ++i) t.v[i] = kExactValues[i];
    return t;
}

}  // namespace

TEST_CASE("value iteration reaches the exact fixed point") {
    GridSpec spec = GridSpec::lake_4x4();
    ValueIterationResult r = value_iteration(spec, RewardModel::dp_arrival(), 0.9);
    CHECK(r.converged);
    CHECK(r.residual < 1e-10);
    for (int i = 0; i < 16; ++i)
        CHECK(r.values.v[i] == doctest::Approx(kExactValues[i]).epsilon(1e-9));
    CHECK(r.values[spec.goal] == 10.0);
}

TEST_CASE("value iteration with gamma zero returns arrival rewards") {
    GridSpec spec = GridSpec::lake_4x4();
    RewardModel dp = RewardModel::dp_arrival();
    ValueIterationResult r = value_iteration(spec, dp, 0.0);
    for (int i = 0; i < 16; ++i) {
        State s{i};
        double expect = spec.is_goal(s) ? 10.0 : dp.arrival_reward(spec, s);
        CHECK(r.values.v[i] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("greedy policy from the exact values") {
    GridSpec spec = GridSpec::lake_4x4();
    RewardModel dp = RewardModel::dp_arrival();
    Policy pol = greedy_policy(spec, dp, exact_table(), 0.9);

    // Exhaustive one-step-lookahead oracle with lowest-encoding tie-break.
    for (int i = 0; i < 16; ++i) {
        State s{i};
        if (spec.is_goal(s)) continue;
        Action best = Action::Up;
        double best_score = -1e300;
        for (Action a : kAllActions) {
            TransitionOutcome t = step(spec, dp, s, a);
            double score = t.reward + 0.9 * exact_table()[t.next];
            if (score > best_score) {
                best_score = score;
                best = a;
            }
        }
        CHECK(pol.choice[i] == best);
    }
    CHECK(pol.choice[14] == Action::Right);  // O: straight to the goal
    CHECK(pol.choice[0] == Action::Down);    // A: down ties right, lower code wins
}

TEST_CASE("greedy policy over an all-equal table maximizes immediate reward") {
    GridSpec spec = GridSpec::lake_4x4();
    Policy pol = greedy_policy(spec, RewardModel::dp_arrival(),
                               ValueTable::constant(spec, 0.0), 0.9);
    CHECK(pol.choice[0] == Action::Up);    // every move scores 0, first action wins
    CHECK(pol.choice[1] == Action::Up);    // down would enter a hole
    CHECK(pol.choice[14] == Action::Right);
}

TEST_CASE("q-learning rejects bad exploration settings and empty runs learn nothing") {
    GridSpec spec = GridSpec::lake_4x4();
    QLearningConfig cfg;
    cfg.episodes = 0;
    QTable q = q_learning(spec, RewardModel::dp_arrival(), cfg);
    for (double x : q.q) CHECK(x == 0.0);

    cfg.episodes = 1;
    cfg.epsilon0 = 1.5;
    CHECK_THROWS_AS(q_learning(spec, RewardModel::dp_arrival(), cfg),
                    std::invalid_argument);
    cfg.epsilon0 = 0.0;
    CHECK_THROWS_AS(q_learning(spec, RewardModel::dp_arrival(), cfg),
                    std::invalid_argument);
}

TEST_CASE("full learning rate on a two-cell strip pins the goal action exactly") {
    GridSpec spec = GridSpec::from_map("SG");
    QLearningConfig cfg;
    cfg.alpha = 1.0;
    cfg.gamma = 0.9;
    cfg.episodes = 50;
    cfg.epsilon0 = 1.0;
    cfg.epsilon_decay = 1.0;
    cfg.rng_seed = 7;
    QTable q = q_learning(spec, RewardModel::dp_arrival(), cfg);
    CHECK(q.at(State{0}, Action::Right) == 10.0);
}

TEST_CASE("q-learning on the lake converges to the exact state values") {
    GridSpec spec = GridSpec::lake_4x4();
    QLearningConfig cfg;
    cfg.episodes = 5000;
    cfg.rng_seed = 1;
    QTable q = q_learning(spec, RewardModel::dp_arrival(), cfg);
    DerivedValues dv = state_values_from_q(spec, q);
    CHECK(dv.undefined.empty());
    for (int i = 0; i < 16; ++i) {
        INFO("state ", i);
        CHECK(std::abs(dv.values.v[i] - kExactValues[i]) <= 0.15);
    }
    CHECK(std::abs(dv.values.v[10] - 8.1) <= 0.15);
    CHECK(std::abs(dv.values.v[5] + 3.439) <= 0.15);
}

TEST_CASE("q-learning is bitwise deterministic for a fixed seed") {
    GridSpec spec = GridSpec::lake_4x4();
    QLearningConfig cfg;
    cfg.episodes = 500;
    cfg.rng_seed = 42;
    QTable a = q_learning(spec, RewardModel::dp_arrival(), cfg);
    QTable b = q_learning(spec, RewardModel::dp_arrival(), cfg);
    REQUIRE(a.q.size() == b.q.size());
    for (std::size_t i = 0; i < a.q.size(); ++i) CHECK(a.q[i] == b.q[i]);
}

TEST_CASE("state values derived from an all-zero action-value table") {
    GridSpec spec = GridSpec::lake_4x4();
    QTable q = QTable::zeros(spec);
    DerivedValues dv = state_values_from_q(spec, q);
    CHECK(dv.undefined.empty());
    for (int i = 0; i < 15; ++i) CHECK(dv.values.v[i] == 0.0);
    CHECK(dv.values.v[15] == 10.0);
}

TEST_CASE("value table and action table csv formats") {
    GridSpec spec = GridSpec::lake_4x4();
    std::string vt = value_table_csv(spec, exact_table());
    CHECK(vt.rfind("state,value\n", 0) == 0);
    CHECK(vt.find("\nP,10\n") != std::string::npos);

    QTable q = QTable::zeros(spec);
    std::string qt = q_table_csv(spec, q);
    CHECK(qt.rfind("state,action,q\n", 0) == 0);
    CHECK(qt.find("A,up,0") != std::string::npos);
}
