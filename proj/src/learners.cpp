#include "deepmod/learners.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "deepmod/format.hpp"

namespace deepmod {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

InputSource one_hot_source(const GridSpec& spec) {
    return [spec](State s) { return encode_one_hot(spec, s); };
}

InputSource noisy_source(const GridSpec& spec, NoiseAugmenter& aug) {
    return [spec, &aug](State s) { return aug.augment(encode_one_hot(spec, s), s); };
}

InputSource feature_source(const StateFeatureMap& map) {
    return [map](State s) { return feature_input(map[s]); };
}

std::vector<HiddenLayer> default_value_trunk() {
    return {{32, Activation::Tanh}, {32, Activation::Tanh}, {32, Activation::Tanh},
            {32, Activation::ReLU}, {32, Activation::ReLU}};
}

std::vector<HiddenLayer> reduced_value_trunk() {
    return {{32, Activation::ReLU}, {32, Activation::ReLU}};
}

std::vector<LayerSpec> value_net_layers(int input_width,
                                        const std::vector<HiddenLayer>& hidden,
                                        int output_width) {
    std::vector<LayerSpec> specs;
    int in = input_width;
    for (const HiddenLayer& h : hidden) {
        specs.push_back(LayerSpec{in, h.width, h.activation});
        in = h.width;
    }
    specs.push_back(LayerSpec{in, output_width, Activation::Identity});
    return specs;
}

const char* phase_name(Phase p) { return p == Phase::Train ? "train" : "test"; }

std::vector<double> TrainingTrace::rewards(Phase phase) const {
    std::vector<double> out;
    for (const TraceRecord& r : records)
        if (r.phase == phase) out.push_back(r.reward);
    return out;
}

int TrainingTrace::stabilization_iteration(double target_reward,
                                           int cap_iteration) const {
    // Walk train-phase records backwards; the answer is the iteration of the
    // first record of the maximal all-at-target suffix.
    int stable_from = -1;
    for (auto it = records.rbegin(); it != records.rend(); ++it) {
        if (it->phase != Phase::Train) continue;
        if (std::abs(it->reward - target_reward) < 1e-9)
            stable_from = it->iteration;
        else
            break;
    }
    return stable_from == -1 ? cap_iteration : stable_from;
}

std::string trace_csv(const TrainingTrace& trace, bool include_seconds) {
    std::ostringstream out;
    out << (include_seconds ? "iteration,phase,reward,loss,seconds\n"
                            : "iteration,phase,reward,loss\n");
    for (const TraceRecord& r : trace.records) {
        out << r.iteration << ',' << phase_name(r.phase) << ','
            << format_double(r.reward) << ',' << format_double(r.loss);
        if (include_seconds) out << ',' << format_double(r.seconds);
        out << '\n';
    }
    return out.str();
}

ValueTable ddpn_state_values(const Network& net, const InputSource& source,
                             const GridSpec& spec) {
    ValueTable vt = ValueTable::zeros(spec);
    for (int i = 0; i < spec.n_states(); ++i)
        vt.v[i] = net.predict(source(State{i}))[0];
    return vt;
}

Policy greedy_policy_from_network(const Network& net, const InputSource& source,
                                  const GridSpec& spec, double gamma) {
    return greedy_policy(spec, RewardModel::dp_arrival(),
                         ddpn_state_values(net, source, spec), gamma);
}

namespace {

struct FittedIterationSetup {
    const GridSpec& spec;
    const DdpnConfig& config;
    const InputSource& source;
    RewardModel dp = RewardModel::dp_arrival();
    RewardModel eval = RewardModel::episode_eval();
};

void check_divergence(const GridSpec& spec, const RewardModel& dp,
                      const std::vector<double>& preds, int iteration) {
    double bound = 10.0 * std::abs(dp.goal_reward);
    for (int i = 0; i < spec.n_states(); ++i) {
        if (!std::isfinite(preds[i]) || std::abs(preds[i]) > bound) {
            std::ostringstream msg;
            msg << "value iteration diverged at round " << iteration << ": V("
                << spec.label(State{i}) << ") = " << preds[i] << " exceeds |"
                << bound << "|";
            throw std::runtime_error(msg.str());
        }
    }
}

/// Shared trainer for the bootstrapped and the distillation variants; the
/// only difference is how per-round targets are produced.
TrainedValueNet run_fitted_iteration(
    const FittedIterationSetup& setup,
    const std::function<std::vector<double>(const std::vector<double>& preds)>&
        make_targets) {
    const GridSpec& spec = setup.spec;
    const DdpnConfig& cfg = setup.config;
    spec.validate();
    if (cfg.bellman_iterations < 0 || cfg.epochs_per_iteration <= 0)
        throw std::invalid_argument("train: bad iteration/epoch counts");

    int input_width = static_cast<int>(setup.source(spec.start).size());
    Network net = init_network(value_net_layers(input_width, cfg.hidden), cfg.seed,
                               cfg.zero_final_init);
    AdamState adam = AdamState::for_network(net, cfg.learning_rate);

    TrainedValueNet out;
    Clock::time_point t0 = Clock::now();

    for (int it = 1; it <= cfg.bellman_iterations; ++it) {
        // One source query per state per round; noisy sources resample here.
        std::vector<Sample> dataset(spec.n_states());
        std::vector<double> preds(spec.n_states());
        for (int i = 0; i < spec.n_states(); ++i) {
            dataset[i].input = setup.source(State{i});
            preds[i] = net.predict(dataset[i].input)[0];
        }
        check_divergence(spec, setup.dp, preds, it);

        std::vector<double> targets = make_targets(preds);
        for (int i = 0; i < spec.n_states(); ++i) dataset[i].target = {targets[i]};

        std::vector<double> losses =
            fit(net, adam, dataset, cfg.epochs_per_iteration, cfg.batch_size,
                mix_seed(cfg.seed, 50000 + static_cast<std::uint64_t>(it)));
        double mean_loss = 0.0;
        for (double l : losses) mean_loss += l;
        mean_loss /= static_cast<double>(losses.size());

        if (cfg.eval_every > 0 && it % cfg.eval_every == 0) {
            Policy pi = greedy_policy_from_network(net, setup.source, spec, cfg.gamma);
            EpisodeResult ep = run_episode(spec, setup.eval, [&pi](State s) { return pi(s); },
                                           cfg.max_episode_steps, cfg.budget_floor);
            out.trace.records.push_back(TraceRecord{it, Phase::Train, ep.total_reward,
                                                    mean_loss, seconds_since(t0)});
        }
    }
    out.train_seconds = seconds_since(t0);

    for (int t = 1; t <= cfg.test_episodes; ++t) {
        Policy pi = greedy_policy_from_network(net, setup.source, spec, cfg.gamma);
        EpisodeResult ep = run_episode(spec, setup.eval, [&pi](State s) { return pi(s); },
                                       cfg.max_episode_steps, cfg.budget_floor);
        out.trace.records.push_back(
            TraceRecord{t, Phase::Test, ep.total_reward,
                        std::numeric_limits<double>::quiet_NaN(), seconds_since(t0)});
    }
    out.net = std::move(net);
    return out;
}

}  // namespace

TrainedValueNet train_ddpn(const GridSpec& spec, const DdpnConfig& config,
                           const InputSource& source) {
    FittedIterationSetup setup{spec, config, source};
    return run_fitted_iteration(setup, [&](const std::vector<double>& preds) {
        std::vector<double> targets(spec.n_states());
        for (int i = 0; i < spec.n_states(); ++i) {
            State s{i};
            if (spec.is_goal(s)) {
                targets[i] = setup.dp.goal_reward;
                continue;
            }
            double best = -std::numeric_limits<double>::infinity();
            for (Action a : kAllActions) {
                TransitionOutcome t = step(spec, setup.dp, s, a);
                best = std::max(best, preds[t.next.index]);
            }
            targets[i] = setup.dp.arrival_reward(spec, s) + config.gamma * best;
        }
        return targets;
    });
}

TrainedValueNet train_ddpn_q_distill(const GridSpec& spec, const DdpnConfig& config,
                                     const ValueTable& targets,
                                     const InputSource& source) {
    if (targets.size() != spec.n_states())
        throw std::invalid_argument("train_ddpn_q_distill: target table size mismatch");
    for (double v : targets.v)
        if (!std::isfinite(v))
            throw std::invalid_argument("train_ddpn_q_distill: non-finite target value");
    FittedIterationSetup setup{spec, config, source};
    return run_fitted_iteration(setup,
                                [&](const std::vector<double>&) { return targets.v; });
}

TrainedValueNet train_dqn(const GridSpec& spec, const DqnConfig& config,
                          const InputSource& source) {
    spec.validate();
    if (config.epsilon0 <= 0.0 || config.epsilon0 > 1.0)
        throw std::invalid_argument("train_dqn: epsilon0 must be in (0, 1]");

    RewardModel dp = RewardModel::dp_arrival();
    RewardModel eval = RewardModel::episode_eval();
    int input_width = static_cast<int>(source(spec.start).size());
    Network net = init_network(value_net_layers(input_width, config.hidden, kNumActions),
                               config.seed, /*zero_final=*/true);
    AdamState adam = AdamState::for_network(net, config.learning_rate);

    std::mt19937_64 rng(config.seed ^ 0x5bd1e995u);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> die(0, kNumActions - 1);

    TrainedValueNet out;
    Clock::time_point t0 = Clock::now();
    double loss_acc = 0.0;
    long loss_count = 0;

    for (int ep = 0; ep < config.episodes; ++ep) {
        double epsilon = std::max(config.epsilon_min,
                                  config.epsilon0 * std::pow(config.epsilon_decay, ep));
        State s = spec.start;
        for (int t = 0; t < config.max_episode_steps; ++t) {
            std::vector<double> x = source(s);
            ForwardTrace trace = forward(net, x);
            const std::vector<double>& qhat = trace.output();

            Action a;
            if (coin(rng) < epsilon) {
                a = static_cast<Action>(die(rng));
            } else {
                a = Action::Up;
                for (Action cand : kAllActions)
                    if (qhat[action_index(cand)] > qhat[action_index(a)]) a = cand;
            }

            TransitionOutcome tr = step(spec, dp, s, a);
            double bootstrap = 0.0;
            if (!tr.terminal) {
                std::vector<double> qnext = net.predict(source(tr.next));
                bootstrap = *std::max_element(qnext.begin(), qnext.end());
            }
            double td_target = tr.reward + config.gamma * bootstrap;

            // Only the taken action's output carries error.
            std::vector<double> target = qhat;
            target[action_index(a)] = td_target;
            double d = qhat[action_index(a)] - td_target;
            loss_acc += d * d;
            loss_count += 1;

            Gradients g = backward_mse(net, trace, target);
            adam_step(net, adam, g);

            if (tr.terminal) break;
            s = tr.next;
        }

        if (config.eval_every > 0 && (ep + 1) % config.eval_every == 0) {
            // Greedy rollout: argmax of the 4-output head, fresh inputs.
            auto greedy = [&](State st) {
                std::vector<double> q = net.predict(source(st));
                Action best = Action::Up;
                for (Action cand : kAllActions)
                    if (q[action_index(cand)] > q[action_index(best)]) best = cand;
                return best;
            };
            EpisodeResult er = run_episode(spec, eval, greedy, config.max_episode_steps,
                                           config.budget_floor);
            double mean_loss = loss_count > 0 ? loss_acc / loss_count : 0.0;
            out.trace.records.push_back(
                TraceRecord{ep + 1, Phase::Train, er.total_reward, mean_loss,
                            seconds_since(t0)});
            loss_acc = 0.0;
            loss_count = 0;
        }
    }
    out.train_seconds = seconds_since(t0);

    for (int t = 1; t <= config.test_episodes; ++t) {
        auto greedy = [&](State st) {
            std::vector<double> q = net.predict(source(st));
            Action best = Action::Up;
            for (Action cand : kAllActions)
                if (q[action_index(cand)] > q[action_index(best)]) best = cand;
            return best;
        };
        EpisodeResult er = run_episode(spec, eval, greedy, config.max_episode_steps,
                                       config.budget_floor);
        out.trace.records.push_back(
            TraceRecord{t, Phase::Test, er.total_reward,
                        std::numeric_limits<double>::quiet_NaN(), seconds_since(t0)});
    }
    out.net = std::move(net);
    return out;
}

DerivedValues dqn_state_values(const Network& net, const InputSource& source,
                               const GridSpec& spec) {
    // Cache one prediction per state so each state sees a single noise draw.
    std::vector<std::vector<double>> qhat(spec.n_states());
    for (int i = 0; i < spec.n_states(); ++i) qhat[i] = net.predict(source(State{i}));

    DerivedValues out;
    out.values = ValueTable::zeros(spec);
    std::vector<bool> defined(spec.n_states(), false);
    for (int i = 0; i < spec.n_states(); ++i) {
        State s{i};
        if (spec.is_goal(s)) continue;
        for (Action a : kAllActions) {
            TransitionOutcome t = step(spec, RewardModel::dp_arrival(), s, a);
            double cand = qhat[i][action_index(a)];
            if (!defined[t.next.index] || cand > out.values[t.next]) {
                out.values[t.next] = cand;
                defined[t.next.index] = true;
            }
        }
    }
    for (int i = 0; i < spec.n_states(); ++i) {
        if (!defined[i]) {
            out.values.v[i] = std::numeric_limits<double>::quiet_NaN();
            out.undefined.push_back(State{i});
        }
    }
    return out;
}

}  // namespace deepmod
