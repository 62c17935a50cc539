#include "deepmod/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "deepmod/format.hpp"

namespace deepmod {

double QTable::max_over_actions(State s) const {
    double best = q[s.index * n_actions];
    for (int a = 1; a < n_actions; ++a)
        best = std::max(best, q[s.index * n_actions + a]);
    return best;
}

ValueIterationResult value_iteration(const GridSpec& spec, const RewardModel& model,
                                     double gamma, double tolerance, int max_sweeps) {
    spec.validate();
    ValueIterationResult res;
    res.values = ValueTable::zeros(spec);
    res.values[spec.goal] = model.goal_reward;

    for (res.sweeps = 0; res.sweeps < max_sweeps; ++res.sweeps) {
        double delta = 0.0;
        ValueTable next = res.values;
        for (int i = 0; i < spec.n_states(); ++i) {
            State s{i};
            if (spec.is_goal(s)) continue;
            double best = -std::numeric_limits<double>::infinity();
            for (Action a : kAllActions) {
                TransitionOutcome t = step(spec, model, s, a);
                best = std::max(best, res.values[t.next]);
            }
            next[s] = model.arrival_reward(spec, s) + gamma * best;
            delta = std::max(delta, std::abs(next[s] - res.values[s]));
        }
        res.values = next;
        res.residual = delta;
        if (delta < tolerance) {
            res.sweeps += 1;
            res.converged = true;
            break;
        }
    }
    return res;
}

Policy greedy_policy(const GridSpec& spec, const RewardModel& model,
                     const ValueTable& values, double gamma) {
    if (values.size() != spec.n_states())
        throw std::invalid_argument("greedy_policy: value table size mismatch");
    Policy pi;
    pi.choice.assign(spec.n_states(), Action::Up);
    for (int i = 0; i < spec.n_states(); ++i) {
        State s{i};
        if (spec.is_goal(s)) continue;
        double best = -std::numeric_limits<double>::infinity();
        Action best_a = Action::Up;
        for (Action a : kAllActions) {
            TransitionOutcome t = step(spec, model, s, a);
            double score = t.reward + gamma * values[t.next];
            if (score > best) {  // strict: first (lowest-encoded) maximizer wins
                best = score;
                best_a = a;
            }
        }
        pi.choice[i] = best_a;
    }
    return pi;
}

QTable q_learning(const GridSpec& spec, const RewardModel& model,
                  const QLearningConfig& config) {
    spec.validate();
    if (config.epsilon0 <= 0.0 || config.epsilon0 > 1.0)
        throw std::invalid_argument("q_learning: epsilon0 must be in (0, 1]");
    if (config.episodes < 0)
        throw std::invalid_argument("q_learning: negative episode count");

    QTable q = QTable::zeros(spec);
    std::mt19937_64 rng(config.rng_seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> die(0, kNumActions - 1);

    for (int ep = 0; ep < config.episodes; ++ep) {
        double epsilon = config.epsilon0 * std::pow(config.epsilon_decay, ep);
        State s = spec.start;
        for (int t = 0; t < config.max_steps_per_episode; ++t) {
            Action a;
            if (coin(rng) < epsilon) {
                a = static_cast<Action>(die(rng));
            } else {
                a = Action::Up;
                double best = q.at(s, a);
                for (Action cand : kAllActions) {
                    if (q.at(s, cand) > best) {
                        best = q.at(s, cand);
                        a = cand;
                    }
                }
            }
            TransitionOutcome tr = step(spec, model, s, a);
            double bootstrap = tr.terminal ? 0.0 : q.max_over_actions(tr.next);
            double target = tr.reward + config.gamma * bootstrap;
            q.at(s, a) += config.alpha * (target - q.at(s, a));
            if (tr.terminal) break;
            s = tr.next;
        }
    }
    return q;
}

DerivedValues state_values_from_q(const GridSpec& spec, const QTable& q,
                                  double goal_value) {
    DerivedValues out;
    out.values = ValueTable::zeros(spec);
    std::vector<bool> defined(spec.n_states(), false);

    for (int i = 0; i < spec.n_states(); ++i) {
        State s{i};
        if (spec.is_goal(s)) continue;
        for (Action a : kAllActions) {
            TransitionOutcome t = step(spec, RewardModel::dp_arrival(), s, a);
            double cand = q.at(s, a);
            if (!defined[t.next.index] || cand > out.values[t.next]) {
                out.values[t.next] = cand;
                defined[t.next.index] = true;
            }
        }
    }
    out.values[spec.goal] = goal_value;
    defined[spec.goal.index] = true;
    for (int i = 0; i < spec.n_states(); ++i) {
        if (!defined[i]) {
            out.values.v[i] = std::numeric_limits<double>::quiet_NaN();
            out.undefined.push_back(State{i});
        }
    }
    return out;
}

std::string value_table_csv(const GridSpec& spec, const ValueTable& values) {
    std::ostringstream out;
    out << "state,value\n";
    for (int i = 0; i < spec.n_states(); ++i)
        out << spec.label(State{i}) << ',' << format_double(values.v[i]) << '\n';
    return out.str();
}

std::string q_table_csv(const GridSpec& spec, const QTable& q) {
    std::ostringstream out;
    out << "state,action,q\n";
    for (int i = 0; i < spec.n_states(); ++i)
        for (Action a : kAllActions)
            out << spec.label(State{i}) << ',' << action_name(a) << ','
                << format_double(q.at(State{i}, a)) << '\n';
    return out.str();
}

}  // namespace deepmod
