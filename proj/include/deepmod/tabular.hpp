#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deepmod/gridworld.hpp"

namespace deepmod {

/// Per-state scalar values, indexed by State::index.
struct ValueTable {
    std::vector<double> v;

    double& operator[](State s) { return v[s.index]; }
    double operator[](State s) const { return v[s.index]; }
    int size() const { return static_cast<int>(v.size()); }

    static ValueTable zeros(const GridSpec& spec) {
        return ValueTable{std::vector<double>(spec.n_states(), 0.0)};
    }
    static ValueTable constant(const GridSpec& spec, double c) {
        return ValueTable{std::vector<double>(spec.n_states(), c)};
    }
};

/// Action values, row-major [state][action].
struct QTable {
    int n_actions = kNumActions;
    std::vector<double> q;

    double& at(State s, Action a) { return q[s.index * n_actions + action_index(a)]; }
    double at(State s, Action a) const { return q[s.index * n_actions + action_index(a)]; }
    double max_over_actions(State s) const;

    static QTable zeros(const GridSpec& spec) {
        return QTable{kNumActions, std::vector<double>(spec.n_states() * kNumActions, 0.0)};
    }
};

/// Deterministic state -> action map. The goal's entry exists but is never
/// consulted (episodes end on arrival there).
struct Policy {
    std::vector<Action> choice;
    Action operator()(State s) const { return choice[s.index]; }
};

struct ValueIterationResult {
    ValueTable values;
    int sweeps = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Exact dynamic programming to the fixed point of
///   V(s) = arrival_reward(s) + gamma * max_a V(next(s, a)),  V(goal) pinned.
/// Holes are ordinary (non-terminal) states that carry their penalty.
/// Non-convergence inside max_sweeps is reported via the result, not thrown.
ValueIterationResult value_iteration(const GridSpec& spec, const RewardModel& model,
                                     double gamma, double tolerance = 1e-6,
                                     int max_sweeps = 1000);

/// One-step lookahead policy: argmax_a [ r(s,a,s') + gamma * V(s') ], ties
/// broken toward the lowest action encoding.
Policy greedy_policy(const GridSpec& spec, const RewardModel& model,
                     const ValueTable& values, double gamma);

struct QLearningConfig {
    double alpha = 0.9;
    double gamma = 0.9;
    int episodes = 5000;
    double epsilon0 = 0.9;
    double epsilon_decay = 0.99;   // per episode
    int max_steps_per_episode = 200;
    std::uint64_t rng_seed = 1;
};

/// Seeded tabular Q-learning with epsilon-greedy exploration
/// (epsilon = epsilon0 * decay^episode). Zero bootstrap on entering the goal;
/// holes penalize and continue. Identical configs give bitwise-identical tables.
QTable q_learning(const GridSpec& spec, const RewardModel& model,
                  const QLearningConfig& config);

struct DerivedValues {
    ValueTable values;
    std::vector<State> undefined;  // states with no (s,a) predecessor; value NaN
};

/// State values read off a Q table: V(s') = max over pairs (s,a) that reach s'
/// of Q(s,a); goal pinned to goal_reward. Predecessor-free states are flagged,
/// never silently zeroed.
DerivedValues state_values_from_q(const GridSpec& spec, const QTable& q,
                                  double goal_value = 10.0);

std::string value_table_csv(const GridSpec& spec, const ValueTable& values);
std::string q_table_csv(const GridSpec& spec, const QTable& q);

}  // namespace deepmod
