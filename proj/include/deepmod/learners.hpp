#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "deepmod/features.hpp"
#include "deepmod/gridworld.hpp"
#include "deepmod/network.hpp"
#include "deepmod/tabular.hpp"

namespace deepmod {

/// Produces the network input for a state. Sources may be stateful (noise
/// resampling); trainers call them in state order, once per state per use.
using InputSource = std::function<std::vector<double>(State)>;

InputSource one_hot_source(const GridSpec& spec);
/// aug is captured by reference and must outlive the source.
InputSource noisy_source(const GridSpec& spec, NoiseAugmenter& aug);
/// Captures the map by value; inputs are the +-1 feature entries.
InputSource feature_source(const StateFeatureMap& map);

struct HiddenLayer {
    int width = 32;
    Activation activation = Activation::Tanh;
};

/// 32(tanh) x3 then 32(relu) x2 — the full value trunk.
std::vector<HiddenLayer> default_value_trunk();
/// 32(relu) x2 — the reduced trunk used on feature inputs.
std::vector<HiddenLayer> reduced_value_trunk();

/// Layer chain for a value head: hidden trunk plus a linear scalar output.
std::vector<LayerSpec> value_net_layers(int input_width,
                                        const std::vector<HiddenLayer>& hidden,
                                        int output_width = 1);

struct DdpnConfig {
    std::vector<HiddenLayer> hidden = default_value_trunk();
    double gamma = 0.9;
    int bellman_iterations = 200;
    int epochs_per_iteration = 50;
    double learning_rate = 1e-3;
    /// Fit batch size per round; 0 means full batch. Single-sample shuffled
    /// steps keep hidden activations state-specific, which the downstream
    /// binarized-feature extraction depends on; full-batch training tends to
    /// collapse deep layers into a value-ordered code that merges states.
    int batch_size = 1;
    int eval_every = 2;
    int test_episodes = 200;
    int max_episode_steps = 100;
    double budget_floor = -100.0;
    bool zero_final_init = true;  // start as the zero function
    std::uint64_t seed = 1;
};

enum class Phase { Train, Test };
const char* phase_name(Phase p);

struct TraceRecord {
    int iteration = 0;
    Phase phase = Phase::Train;
    double reward = 0.0;
    double loss = 0.0;
    double seconds = 0.0;  // since training start; excluded from determinism checks
};

struct TrainingTrace {
    std::vector<TraceRecord> records;

    std::vector<double> rewards(Phase phase) const;
    /// Earliest train-phase iteration from which every later train-phase
    /// reward equals target_reward; cap_iteration when that never happens.
    int stabilization_iteration(double target_reward, int cap_iteration) const;
};

std::string trace_csv(const TrainingTrace& trace, bool include_seconds = true);

struct TrainedValueNet {
    Network net;
    TrainingTrace trace;
    double train_seconds = 0.0;
};

/// Fitted value iteration: each of bellman_iterations rounds rebuilds targets
///   T(s) = arrival_reward(s) + gamma * max_a Vhat(next(s,a)),  T(goal) = +10,
/// from the current network, then fits them for epochs_per_iteration epochs
/// (batched per config.batch_size, shuffled deterministically per round). Every eval_every rounds the one-step greedy policy is
/// rolled out under per-step-penalty scoring and recorded; after training the
/// policy is rebuilt and rolled out test_episodes more times. Stateful input
/// sources are re-queried per round, so noisy inputs genuinely resample.
/// Throws std::runtime_error if any predicted value exceeds 10x goal_reward.
TrainedValueNet train_ddpn(const GridSpec& spec, const DdpnConfig& config,
                           const InputSource& source);

/// Same loop shape, but the regression targets are the provided per-state
/// values on every round (no bootstrapping).
TrainedValueNet train_ddpn_q_distill(const GridSpec& spec, const DdpnConfig& config,
                                     const ValueTable& targets,
                                     const InputSource& source);

struct DqnConfig {
    std::vector<HiddenLayer> hidden = default_value_trunk();
    double gamma = 0.9;
    double learning_rate = 1e-4;
    int episodes = 15000;
    double epsilon0 = 0.9;
    double epsilon_decay = 0.9999;  // per episode, down to epsilon_min
    double epsilon_min = 0.05;
    int max_episode_steps = 100;
    int eval_every = 10;       // episodes between recorded greedy rollouts
    int test_episodes = 200;
    double budget_floor = -100.0;
    std::uint64_t seed = 1;
};

/// Online action-value learning: a 4-output head, one gradient step per
/// transition toward r + gamma * max_a' Qhat(s',a') on the taken action's
/// output only (other outputs keep their current predictions as targets).
/// No replay buffer, no target network. Arrival-only rewards, zero bootstrap
/// at the goal.
TrainedValueNet train_dqn(const GridSpec& spec, const DqnConfig& config,
                          const InputSource& source);

/// Scalar-head predictions per state (goal included, unpinned).
ValueTable ddpn_state_values(const Network& net, const InputSource& source,
                             const GridSpec& spec);

/// State values read off a 4-output head the same way as from a Q table:
/// V(s') = max over predecessor pairs (s,a) of Qhat(s)[a]; no pinning.
DerivedValues dqn_state_values(const Network& net, const InputSource& source,
                               const GridSpec& spec);

/// One-step lookahead against the network's state values. The source is
/// queried once per state per call.
Policy greedy_policy_from_network(const Network& net, const InputSource& source,
                                  const GridSpec& spec, double gamma);

}  // namespace deepmod
