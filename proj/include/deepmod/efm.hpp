#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "deepmod/features.hpp"
#include "deepmod/gridworld.hpp"
#include "deepmod/learners.hpp"
#include "deepmod/tabular.hpp"

namespace deepmod {

struct EfmKey {
    FeatureVector f;
    Action a = Action::Up;
    bool operator==(const EfmKey&) const = default;
};

struct EfmKeyHash {
    std::size_t operator()(const EfmKey& k) const {
        return FeatureVectorHash{}(k.f) * 31 + static_cast<std::size_t>(action_index(k.a));
    }
};

struct EfmEntry {
    FeatureVector next;
    double reward = 0.0;  // arrival-only reward observed on the transition
};

/// Raised when a queried (feature, action) pair was never observed.
struct EfmMissError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Environment model over feature codes: an exact-match lookup table
/// (feature, action) -> (next feature, reward) gathered from episodes.
struct Efm {
    std::unordered_map<EfmKey, EfmEntry, EfmKeyHash> table;
    std::set<std::pair<int, int>> covered;           // (state index, action code)
    std::vector<std::pair<State, Action>> missing;   // empty iff fully covered
    bool fully_covered = false;
    int episodes_used = 0;
    std::string feature_map_id;
    RewardVariant reward_variant = RewardVariant::DpArrival;
    std::vector<std::string> conflicts;  // symptom of a non-injective feature map
};

struct ExplorationConfig {
    double epsilon0 = 0.9;
    double epsilon_decay = 0.99;  // per episode
    double gamma = 0.9;           // for the guided-greedy branch
    int max_episodes = 500;
    int max_steps = 100;
    std::uint64_t seed = 1;
};

double exploration_epsilon(const ExplorationConfig& config, int episode);

/// Collects transitions with epsilon-greedy episodes until every non-terminal
/// (state, action) pair has been observed or max_episodes runs out. With
/// guide_values the exploit branch follows their one-step greedy policy;
/// without, actions are uniform random. Coverage shortfall is reported in the
/// result (missing pairs listed), never silently dropped.
Efm build_efm(const GridSpec& spec, const RewardModel& model,
              const StateFeatureMap& fmap, const ExplorationConfig& config,
              const ValueTable* guide_values = nullptr);

/// Exact-match lookup; unknown keys throw EfmMissError naming the key.
const EfmEntry& efm_lookup(const Efm& efm, const FeatureVector& f, Action a);

/// argmax_a [ reward + gamma * Vhat(next) ] over the four EFM lookups at f,
/// ties to the lowest action encoding.
Action efm_greedy_action(const Efm& efm, const Network& net, const FeatureVector& f,
                         double gamma);

/// Fitted value iteration driven purely by EFM lookups: targets
///   T(f) = arrival(f) + gamma * max_a Vhat(efm[f,a].next)
/// with the goal's feature pinned to +10. Arrival rewards per feature are read
/// off the table's incoming entries. Evaluation rolls the EFM-greedy policy in
/// the real environment under per-step-penalty scoring.
/// Requires a fully covered EFM; lookups during training abort on a miss.
TrainedValueNet train_ddpn2(const GridSpec& spec, const Efm& efm,
                            const StateFeatureMap& fmap, const DdpnConfig& config);

std::string efm_csv(const Efm& efm);
Efm efm_from_csv(const std::string& csv);  // table only; round-trips bit-exactly

struct PipelineConfig {
    bool noisy = true;
    /// Stage (i) estimator. The DQN is the default: its approximation error
    /// nudges equal-value states apart, which the extracted feature codes
    /// need in order to stay distinct per state. Exact tabular Q-learning
    /// reproduces value ties bit-for-bit, so the codes of tied states tend
    /// to collide and the feature model then conflates their transitions.
    bool use_dqn = true;
    int n_noise = 20;
    int extraction_layer = 3;
    std::uint64_t master_seed = 1;
    QLearningConfig q_learning;
    DqnConfig dqn;
    DdpnConfig ddpn1;  // distilled full net
    DdpnConfig ddpn2;  // reduced net over features
    ExplorationConfig exploration;

    PipelineConfig() { ddpn2.hidden = reduced_value_trunk(); }
};

struct PipelineArtifacts {
    std::uint64_t master_seed = 0;
    bool used_dqn = false;
    QTable qtable;            // stage (i) when tabular
    TrainedValueNet dqn;      // stage (i) when use_dqn
    ValueTable stage1_values;
    TrainedValueNet ddpn1;    // stage (ii)
    StateFeatureMap fmap;     // stage (iii)
    Efm efm;                  // stage (iv)
    TrainedValueNet ddpn2;    // stage (v)
    Policy policy;            // stage (vi): EFM-greedy pulled back to states
};

/// The six-stage run: action values -> distilled value net -> feature map ->
/// feature transition table -> feature-space value net -> greedy policy.
/// Every stage seed derives from master_seed, so a fixed master seed fixes
/// every artifact bit-for-bit.
PipelineArtifacts run_deepmod_pipeline(const GridSpec& spec,
                                       const PipelineConfig& config);

}  // namespace deepmod
