#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace deepmod {

enum class Activation { Tanh, ReLU, Identity };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct LayerSpec {
    int fan_in = 0;
    int fan_out = 0;
    Activation activation = Activation::Identity;
};

/// One affine layer. Weights are row-major [fan_out][fan_in]; all storage is
/// double precision and lives in plain vectors.
struct Layer {
    LayerSpec spec;
    std::vector<double> weights;
    std::vector<double> biases;

    double w(int out, int in) const { return weights[out * spec.fan_in + in]; }
    double& w(int out, int in) { return weights[out * spec.fan_in + in]; }
};

struct Network {
    std::vector<Layer> layers;

    int input_size() const { return layers.front().spec.fan_in; }
    int output_size() const { return layers.back().spec.fan_out; }
    std::size_t parameter_count() const;
    /// Forward pass returning only the output vector.
    std::vector<double> predict(const std::vector<double>& input) const;
};

/// Everything the backward pass needs: the input plus pre- and post-activation
/// vectors per layer.
struct ForwardTrace {
    std::vector<double> input;
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> post;

    const std::vector<double>& output() const { return post.back(); }
};

/// Parameter-shaped gradient accumulator.
struct Gradients {
    std::vector<std::vector<double>> d_weights;
    std::vector<std::vector<double>> d_biases;

    static Gradients zeros_like(const Network& net);
    void accumulate(const Gradients& other);
    void scale(double factor);
};

/// Bias-corrected Adam moments, one entry per layer parameter block.
struct AdamState {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon_hat = 1e-8;
    long timestep = 0;
    std::vector<std::vector<double>> m_w, v_w, m_b, v_b;

    static AdamState for_network(const Network& net, double learning_rate);
};

/// Fresh network: weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases
/// zero. zero_final additionally zeroes the last layer's weights so the net
/// starts as the constant-zero function. Same seed, same shapes -> bitwise
/// identical parameters. Throws std::invalid_argument on an inconsistent chain.
Network init_network(const std::vector<LayerSpec>& specs, std::uint64_t seed,
                     bool zero_final = false);

ForwardTrace forward(const Network& net, const std::vector<double>& input);

/// Mean of squared errors over the output dimension (no 1/2 factor).
double mse_loss(const std::vector<double>& output, const std::vector<double>& target);

/// Exact gradients of mse_loss via backprop. ReLU uses subgradient 0 at 0.
Gradients backward_mse(const Network& net, const ForwardTrace& trace,
                       const std::vector<double>& target);

/// One in-place Adam update. Zero gradients leave parameters and moments
/// untouched except for the timestep.
void adam_step(Network& net, AdamState& adam, const Gradients& grads);

struct Sample {
    std::vector<double> input;
    std::vector<double> target;
};

/// Gradient-descent fit against mse_loss. batch_size 0 means full batch;
/// otherwise minibatches with a seeded shuffle per epoch. Gradients are
/// averaged over the batch. Returns mean per-sample loss per epoch, measured
/// before that epoch's updates are applied to each batch.
std::vector<double> fit(Network& net, AdamState& adam,
                        const std::vector<Sample>& dataset, int epochs,
                        int batch_size = 0, std::uint64_t shuffle_seed = 0);

/// Versioned text checkpoint; doubles survive bit-exactly.
void save_network(const Network& net, std::ostream& out);
Network load_network(std::istream& in);
void save_network_file(const Network& net, const std::string& path);
Network load_network_file(const std::string& path);

/// Short stable fingerprint of a network's shapes + parameters, for provenance.
std::string network_fingerprint(const Network& net);

}  // namespace deepmod
