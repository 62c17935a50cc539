#include "deepmod/features.hpp"

#include <sstream>
#include <stdexcept>

#include "deepmod/format.hpp"

namespace deepmod {

std::size_t FeatureVectorHash::operator()(const FeatureVector& f) const {
    // The +-1 pattern fits in 32 bits; mix with splitmix64.
    std::uint64_t packed = 0;
    for (int i = 0; i < kFeatureWidth; ++i)
        if (f.bits[i] > 0) packed |= (1ULL << i);
    packed += 0x9e3779b97f4a7c15ULL;
    packed = (packed ^ (packed >> 30)) * 0xbf58476d1ce4e5b9ULL;
    packed = (packed ^ (packed >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(packed ^ (packed >> 31));
}

FeatureVector binarize(const std::vector<double>& activations) {
    if (static_cast<int>(activations.size()) != kFeatureWidth)
        throw std::invalid_argument("binarize: expected " + std::to_string(kFeatureWidth) +
                                    " activations, got " + std::to_string(activations.size()));
    FeatureVector f;
    for (int i = 0; i < kFeatureWidth; ++i)
        f.bits[i] = activations[i] < 0.0 ? -1 : 1;  // zero counts as +1
    return f;
}

std::vector<double> feature_input(const FeatureVector& f) {
    std::vector<double> x(kFeatureWidth);
    for (int i = 0; i < kFeatureWidth; ++i) x[i] = static_cast<double>(f.bits[i]);
    return x;
}

std::string feature_to_string(const FeatureVector& f) {
    std::string s(kFeatureWidth, '+');
    for (int i = 0; i < kFeatureWidth; ++i)
        if (f.bits[i] < 0) s[i] = '-';
    return s;
}

NoiseAugmenter::NoiseAugmenter(int n_noise, std::uint64_t seed, NoiseMode mode)
    : n_noise_(n_noise), seed_(seed), mode_(mode), stream_(seed) {
    if (n_noise < 0) throw std::invalid_argument("NoiseAugmenter: negative n_noise");
}

std::vector<double> NoiseAugmenter::augment(const std::vector<double>& encoding, State s) {
    std::vector<double> out = encoding;
    if (n_noise_ == 0) return out;

    if (mode_ == NoiseMode::FixedPerState) {
        auto it = cache_.find(s.index);
        if (it == cache_.end()) {
            // Per-state derived seed: cached bits do not depend on query order.
            std::mt19937_64 rng(mix_seed(seed_, static_cast<std::uint64_t>(s.index)));
            std::uniform_int_distribution<int> bit(0, 1);
            std::vector<double> noise(n_noise_);
            for (double& b : noise) b = static_cast<double>(bit(rng));
            it = cache_.emplace(s.index, std::move(noise)).first;
        }
        out.insert(out.end(), it->second.begin(), it->second.end());
    } else {
        std::uniform_int_distribution<int> bit(0, 1);
        for (int i = 0; i < n_noise_; ++i)
            out.push_back(static_cast<double>(bit(stream_)));
    }
    return out;
}

FeatureVector extract_features(const Network& net, const std::vector<double>& input,
                               int layer_index) {
    int hidden_layers = static_cast<int>(net.layers.size()) - 1;
    if (layer_index < 1 || layer_index > hidden_layers)
        throw std::invalid_argument("extract_features: layer index " +
                                    std::to_string(layer_index) + " outside 1.." +
                                    std::to_string(hidden_layers));
    const LayerSpec& spec = net.layers[layer_index - 1].spec;
    if (spec.activation != Activation::Tanh)
        throw std::invalid_argument("extract_features: extraction layer must be tanh");
    if (spec.fan_out != kFeatureWidth)
        throw std::invalid_argument("extract_features: extraction layer width " +
                                    std::to_string(spec.fan_out) + " != " +
                                    std::to_string(kFeatureWidth));
    ForwardTrace tr = forward(net, input);
    return binarize(tr.post[layer_index - 1]);
}

StateFeatureMap build_state_feature_map(const Network& net, const GridSpec& spec,
                                        NoiseAugmenter* aug, int layer_index) {
    StateFeatureMap map;
    map.checkpoint_id = network_fingerprint(net);
    map.layer_index = layer_index;
    map.has_noise = aug != nullptr && aug->n_noise() > 0;
    map.noise_seed = aug != nullptr ? aug->seed() : 0;

    for (int i = 0; i < spec.n_states(); ++i) {
        State s{i};
        std::vector<double> x = encode_one_hot(spec, s);
        if (aug != nullptr) x = aug->augment(x, s);  // exactly one draw per state
        map.by_state.push_back(extract_features(net, x, layer_index));
    }

    map.injective = true;
    for (int i = 0; i < map.size(); ++i)
        for (int j = i + 1; j < map.size(); ++j)
            if (map.by_state[i] == map.by_state[j]) {
                map.injective = false;
                map.collisions.emplace_back(State{i}, State{j});
            }
    return map;
}

std::string feature_map_csv(const GridSpec& spec, const StateFeatureMap& map) {
    std::ostringstream out;
    out << "state";
    for (int b = 0; b < kFeatureWidth; ++b) out << ",f" << b;
    out << '\n';
    for (int i = 0; i < spec.n_states(); ++i) {
        out << spec.label(State{i});
        for (int b = 0; b < kFeatureWidth; ++b)
            out << ',' << static_cast<int>(map.by_state[i].bits[b]);
        out << '\n';
    }
    return out.str();
}

StateFeatureMap feature_map_from_csv(const GridSpec& spec, const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("feature_map_from_csv: empty input");

    StateFeatureMap map;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != kFeatureWidth + 1)
            throw std::invalid_argument("feature_map_from_csv: bad row width");
        FeatureVector f;
        for (int b = 0; b < kFeatureWidth; ++b) {
            int v = std::stoi(fields[b + 1]);
            if (v != 1 && v != -1)
                throw std::invalid_argument("feature_map_from_csv: entries must be +-1");
            f.bits[b] = static_cast<std::int8_t>(v);
        }
        map.by_state.push_back(f);
    }
    if (map.size() != spec.n_states())
        throw std::invalid_argument("feature_map_from_csv: row count mismatch");

    map.injective = true;
    for (int i = 0; i < map.size(); ++i)
        for (int j = i + 1; j < map.size(); ++j)
            if (map.by_state[i] == map.by_state[j]) {
                map.injective = false;
                map.collisions.emplace_back(State{i}, State{j});
            }
    return map;
}

}  // namespace deepmod
