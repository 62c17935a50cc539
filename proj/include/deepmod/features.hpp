#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "deepmod/gridworld.hpp"
#include "deepmod/network.hpp"

namespace deepmod {

/// Width of the extraction layer and of every feature vector.
inline constexpr int kFeatureWidth = 32;

/// A binarized hidden-layer activation pattern: 32 entries, each +1 or -1.
struct FeatureVector {
    std::array<std::int8_t, kFeatureWidth> bits{};
    bool operator==(const FeatureVector&) const = default;
};

struct FeatureVectorHash {
    std::size_t operator()(const FeatureVector& f) const;
};

/// Sign-binarize a length-32 activation vector: >0 -> +1, <0 -> -1, and
/// exactly 0 -> +1 (so every input maps to a total, idempotent code).
FeatureVector binarize(const std::vector<double>& activations);

/// The +-1 entries as doubles, ready to feed a network.
std::vector<double> feature_input(const FeatureVector& f);

std::string feature_to_string(const FeatureVector& f);  // e.g. "+-+-..."

/// Resample draws fresh noise bits on every call (training-time behaviour);
/// FixedPerState derives one cached draw per state so repeated queries agree.
enum class NoiseMode { Resample, FixedPerState };

/// Appends n_noise uniform {0,1} features to a state encoding.
class NoiseAugmenter {
public:
    NoiseAugmenter(int n_noise, std::uint64_t seed, NoiseMode mode);

    std::vector<double> augment(const std::vector<double>& encoding, State s);

    int n_noise() const { return n_noise_; }
    NoiseMode mode() const { return mode_; }
    std::uint64_t seed() const { return seed_; }

private:
    int n_noise_;
    std::uint64_t seed_;
    NoiseMode mode_;
    std::mt19937_64 stream_;
    std::unordered_map<int, std::vector<double>> cache_;
};

/// Binarized post-activation of the layer_index-th hidden layer (1-based over
/// hidden layers). The layer must be tanh of width 32; anything else throws
/// std::invalid_argument.
FeatureVector extract_features(const Network& net, const std::vector<double>& input,
                               int layer_index = 3);

/// Feature codes for every state of a grid, with provenance and an injectivity
/// report. Collisions are recorded, not fatal.
struct StateFeatureMap {
    std::vector<FeatureVector> by_state;
    std::string checkpoint_id;
    int layer_index = 3;
    bool has_noise = false;
    std::uint64_t noise_seed = 0;
    bool injective = false;
    std::vector<std::pair<State, State>> collisions;

    const FeatureVector& operator[](State s) const { return by_state[s.index]; }
    int size() const { return static_cast<int>(by_state.size()); }
};

/// Runs extract_features over every state. When aug is non-null the encoding
/// is one-hot plus exactly one seeded noise draw per state, taken in state
/// order, so the same network and seeds always give the same map.
StateFeatureMap build_state_feature_map(const Network& net, const GridSpec& spec,
                                        NoiseAugmenter* aug, int layer_index = 3);

std::string feature_map_csv(const GridSpec& spec, const StateFeatureMap& map);
StateFeatureMap feature_map_from_csv(const GridSpec& spec, const std::string& csv);

}  // namespace deepmod
