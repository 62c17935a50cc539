#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "deepmod/gridworld.hpp"

using namespace deepmod;

namespace {
const State A{0}, B{1}, F{5}, O{14}, P{15};
}

TEST_CASE("default lake layout") {
    GridSpec spec = GridSpec::lake_4x4();
    CHECK(spec.width == 4);
    CHECK(spec.height == 4);
    CHECK(spec.n_states() == 16);
    CHECK(spec.start == A);
    CHECK(spec.goal == P);
    CHECK(spec.is_hole(State{5}));
    CHECK(spec.is_hole(State{7}));
    CHECK(spec.is_hole(State{11}));
    CHECK(spec.is_hole(State{12}));
    CHECK_FALSE(spec.is_hole(A));
    CHECK_FALSE(spec.is_hole(P));
    CHECK(spec.label(A) == "A");
    CHECK(spec.label(P) == "P");
    CHECK(spec.row_of(O) == 3);
    CHECK(spec.col_of(O) == 2);
}

TEST_CASE("map text round trip") {
    const std::string map = "S...\n.H.H\n...H\nH..G\n";
    GridSpec parsed = GridSpec::from_map(map);
    GridSpec lake = GridSpec::lake_4x4();
    CHECK(parsed.width == lake.width);
    CHECK(parsed.height == lake.height);
    CHECK(parsed.start == lake.start);
    CHECK(parsed.goal == lake.goal);
    CHECK(parsed.holes == lake.holes);
    CHECK(parsed.to_map() == map);
    CHECK_THROWS_AS(GridSpec::from_map("S..\n.."), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::from_map("....\n....\n....\n...G"), std::invalid_argument);
}

TEST_CASE("single steps with both reward conventions") {
    GridSpec spec = GridSpec::lake_4x4();
    RewardModel dp = RewardModel::dp_arrival();
    RewardModel ep = RewardModel::episode_eval();

    TransitionOutcome t = step(spec, ep, A, Action::Right);
    CHECK(t.next == B);
    CHECK(t.reward == -1.0);
    CHECK_FALSE(t.terminal);

    t = step(spec, ep, O, Action::Down);
    CHECK(t.next == O);
    CHECK(t.reward == -1.0);
    CHECK_FALSE(t.terminal);

    t = step(spec, dp, O, Action::Right);
    CHECK(t.next == P);
    CHECK(t.reward == 10.0);
    CHECK(t.terminal);

    t = step(spec, ep, B, Action::Down);
    CHECK(t.next == F);
    CHECK(t.reward == -11.0);
    CHECK_FALSE(t.terminal);

    t = step(spec, dp, B, Action::Down);
    CHECK(t.reward == -10.0);
    CHECK_FALSE(t.terminal);

    CHECK_THROWS_AS(step(spec, dp, P, Action::Up), std::invalid_argument);
}

TEST_CASE("boundary clamping on all edges") {
    GridSpec spec = GridSpec::lake_4x4();
    RewardModel dp = RewardModel::dp_arrival();
    CHECK(step(spec, dp, A, Action::Up).next == A);
    CHECK(step(spec, dp, A, Action::Left).next == A);
    CHECK(step(spec, dp, State{3}, Action::Right).next == State{3});
    CHECK(step(spec, dp, State{3}, Action::Up).next == State{3});
    CHECK(step(spec, dp, State{12}, Action::Down).next == State{12});
    CHECK(step(spec, dp, State{12}, Action::Left).next == State{12});
}

TEST_CASE("episode reward decomposes into arrival reward plus step penalty") {
    GridSpec spec = GridSpec::lake_4x4();
    RewardModel dp = RewardModel::dp_arrival();
    RewardModel ep = RewardModel::episode_eval();
    for (int i = 0; i < spec.n_states(); ++i) {
        State s{i};
        if (spec.is_goal(s)) continue;
        for (Action a : kAllActions) {
            TransitionOutcome td = step(spec, dp, s, a);
            TransitionOutcome te = step(spec, ep, s, a);
            CHECK(td.next == te.next);
            CHECK(td.terminal == te.terminal);
            CHECK(te.reward == doctest::Approx(td.reward + ep.step_penalty).epsilon(1e-12));
        }
    }
}

TEST_CASE("optimal episode earns exactly 4 in six steps") {
    GridSpec spec = GridSpec::lake_4x4();
    auto pol = [](State s) {
        switch (s.index) {
            case 0:
            case 4:
            case 9: return Action::Down;
            case 8:
            case 13:
            case 14: return Action::Right;
            default: return Action::Up;
        }
    };
    EpisodeResult r = run_episode(spec, RewardModel::episode_eval(), pol);
    CHECK(r.reached_goal);
    CHECK(r.steps == 6);
    CHECK(r.total_reward == 4.0);
}

TEST_CASE("hopeless policy bottoms out at the reward floor") {
    GridSpec spec = GridSpec::lake_4x4();
    EpisodeResult r = run_episode(spec, RewardModel::episode_eval(),
                                  [](State) { return Action::Up; });
    CHECK_FALSE(r.reached_goal);
    CHECK(r.total_reward == -100.0);
    CHECK(r.steps <= 100);
}

TEST_CASE("step limit cuts an episode short") {
    GridSpec spec = GridSpec::lake_4x4();
    EpisodeResult r = run_episode(spec, RewardModel::episode_eval(),
                                  [](State) { return Action::Down; }, 1);
    CHECK(r.steps == 1);
    CHECK(r.total_reward == -1.0);
    CHECK_FALSE(r.reached_goal);
}

TEST_CASE("one-hot encoding") {
    GridSpec spec = GridSpec::lake_4x4();
    std::vector<double> x = encode_one_hot(spec, State{2});
    REQUIRE(x.size() == 16);
    for (int i = 0; i < 16; ++i) CHECK(x[i] == (i == 2 ? 1.0 : 0.0));
}

TEST_CASE("action encoding helpers") {
    CHECK(action_index(Action::Up) == 0);
    CHECK(action_index(Action::Down) == 1);
    CHECK(action_index(Action::Left) == 2);
    CHECK(action_index(Action::Right) == 3);
    CHECK(action_from_int(3) == Action::Right);
    CHECK_THROWS_AS(action_from_int(4), std::invalid_argument);
    CHECK(std::string(action_name(Action::Up)) == "up");
    CHECK(std::string(action_name(Action::Right)) == "right");
}
