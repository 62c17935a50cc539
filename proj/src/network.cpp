#include "deepmod/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "deepmod/format.hpp"

namespace deepmod {

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Tanh: return "tanh";
        case Activation::ReLU: return "relu";
        case Activation::Identity: return "identity";
    }
    throw std::invalid_argument("activation_name: bad code");
}

Activation activation_from_name(const std::string& name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "relu") return Activation::ReLU;
    if (name == "identity") return Activation::Identity;
    throw std::invalid_argument("activation_from_name: '" + name + "'");
}

namespace {

double activate(Activation a, double x) {
    switch (a) {
        case Activation::Tanh: return std::tanh(x);
        case Activation::ReLU: return x > 0.0 ? x : 0.0;
        case Activation::Identity: return x;
    }
    return x;
}

// Derivative in terms of the pre-activation (and the already-computed output
// for tanh). ReLU takes the 0 subgradient at exactly 0.
double activate_grad(Activation a, double pre, double post) {
    switch (a) {
        case Activation::Tanh: return 1.0 - post * post;
        case Activation::ReLU: return pre > 0.0 ? 1.0 : 0.0;
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

}  // namespace

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers) n += l.weights.size() + l.biases.size();
    return n;
}

std::vector<double> Network::predict(const std::vector<double>& input) const {
    return forward(*this, input).output();
}

Gradients Gradients::zeros_like(const Network& net) {
    Gradients g;
    for (const Layer& l : net.layers) {
        g.d_weights.emplace_back(l.weights.size(), 0.0);
        g.d_biases.emplace_back(l.biases.size(), 0.0);
    }
    return g;
}

void Gradients::accumulate(const Gradients& other) {
    for (std::size_t l = 0; l < d_weights.size(); ++l) {
        for (std::size_t i = 0; i < d_weights[l].size(); ++i)
            d_weights[l][i] += other.d_weights[l][i];
        for (std::size_t i = 0; i < d_biases[l].size(); ++i)
            d_biases[l][i] += other.d_biases[l][i];
    }
}

void Gradients::scale(double factor) {
    for (auto& w : d_weights)
        for (double& x : w) x *= factor;
    for (auto& b : d_biases)
        for (double& x : b) x *= factor;
}

AdamState AdamState::for_network(const Network& net, double learning_rate) {
    AdamState s;
    s.learning_rate = learning_rate;
    for (const Layer& l : net.layers) {
        s.m_w.emplace_back(l.weights.size(), 0.0);
        s.v_w.emplace_back(l.weights.size(), 0.0);
        s.m_b.emplace_back(l.biases.size(), 0.0);
        s.v_b.emplace_back(l.biases.size(), 0.0);
    }
    return s;
}

Network init_network(const std::vector<LayerSpec>& specs, std::uint64_t seed,
                     bool zero_final) {
    if (specs.empty()) throw std::invalid_argument("init_network: no layers");
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (specs[i].fan_in <= 0 || specs[i].fan_out <= 0)
            throw std::invalid_argument("init_network: non-positive layer dims");
        if (i > 0 && specs[i].fan_in != specs[i - 1].fan_out)
            throw std::invalid_argument("init_network: layer chain mismatch at layer " +
                                        std::to_string(i));
    }

    std::mt19937_64 rng(seed);
    Network net;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        Layer l;
        l.spec = specs[i];
        double bound = std::sqrt(6.0 / (l.spec.fan_in + l.spec.fan_out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        l.weights.resize(static_cast<std::size_t>(l.spec.fan_in) * l.spec.fan_out);
        for (double& w : l.weights) w = dist(rng);
        l.biases.assign(l.spec.fan_out, 0.0);
        if (zero_final && i + 1 == specs.size())
            std::fill(l.weights.begin(), l.weights.end(), 0.0);
        net.layers.push_back(std::move(l));
    }
    return net;
}

ForwardTrace forward(const Network& net, const std::vector<double>& input) {
    if (static_cast<int>(input.size()) != net.input_size())
        throw std::invalid_argument("forward: input size " + std::to_string(input.size()) +
                                    " != " + std::to_string(net.input_size()));
    ForwardTrace tr;
    tr.input = input;
    const std::vector<double>* x = &tr.input;
    for (const Layer& l : net.layers) {
        std::vector<double> pre(l.spec.fan_out);
        for (int o = 0; o < l.spec.fan_out; ++o) {
            double acc = l.biases[o];
            const double* wrow = &l.weights[static_cast<std::size_t>(o) * l.spec.fan_in];
            for (int i = 0; i < l.spec.fan_in; ++i) acc += wrow[i] * (*x)[i];
            pre[o] = acc;
        }
        std::vector<double> post(l.spec.fan_out);
        for (int o = 0; o < l.spec.fan_out; ++o) post[o] = activate(l.spec.activation, pre[o]);
        tr.pre.push_back(std::move(pre));
        tr.post.push_back(std::move(post));
        x = &tr.post.back();
    }
    return tr;
}

double mse_loss(const std::vector<double>& output, const std::vector<double>& target) {
    if (output.size() != target.size())
        throw std::invalid_argument("mse_loss: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < output.size(); ++i) {
        double d = output[i] - target[i];
        acc += d * d;
    }
    return acc / static_cast<double>(output.size());
}

Gradients backward_mse(const Network& net, const ForwardTrace& trace,
                       const std::vector<double>& target) {
    if (static_cast<int>(target.size()) != net.output_size())
        throw std::invalid_argument("backward_mse: target size mismatch");

    Gradients g = Gradients::zeros_like(net);
    int n_layers = static_cast<int>(net.layers.size());

    // dL/d(post) of the last layer for mean-squared error.
    std::vector<double> d_post(net.output_size());
    double inv_n = 1.0 / static_cast<double>(net.output_size());
    for (int o = 0; o < net.output_size(); ++o)
        d_post[o] = 2.0 * (trace.output()[o] - target[o]) * inv_n;

    for (int l = n_layers - 1; l >= 0; --l) {
        const Layer& layer = net.layers[l];
        std::vector<double> delta(layer.spec.fan_out);
        for (int o = 0; o < layer.spec.fan_out; ++o)
            delta[o] = d_post[o] * activate_grad(layer.spec.activation,
                                                 trace.pre[l][o], trace.post[l][o]);

        const std::vector<double>& below =
            l == 0 ? trace.input : trace.post[l - 1];
        for (int o = 0; o < layer.spec.fan_out; ++o) {
            double* grow = &g.d_weights[l][static_cast<std::size_t>(o) * layer.spec.fan_in];
            for (int i = 0; i < layer.spec.fan_in; ++i) grow[i] = delta[o] * below[i];
            g.d_biases[l][o] = delta[o];
        }
        if (l > 0) {
            d_post.assign(layer.spec.fan_in, 0.0);
            for (int o = 0; o < layer.spec.fan_out; ++o) {
                const double* wrow =
                    &layer.weights[static_cast<std::size_t>(o) * layer.spec.fan_in];
                for (int i = 0; i < layer.spec.fan_in; ++i)
                    d_post[i] += wrow[i] * delta[o];
            }
        }
    }
    return g;
}

void adam_step(Network& net, AdamState& adam, const Gradients& grads) {
    if (adam.m_w.size() != net.layers.size())
        throw std::invalid_argument("adam_step: state does not match network");
    adam.timestep += 1;
    double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.timestep));
    double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.timestep));

    auto update = [&](std::vector<double>& param, std::vector<double>& m,
                      std::vector<double>& v, const std::vector<double>& g) {
        for (std::size_t i = 0; i < param.size(); ++i) {
            m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * g[i];
            v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * g[i] * g[i];
            double m_hat = m[i] / bc1;
            double v_hat = v[i] / bc2;
            param[i] -= adam.learning_rate * m_hat / (std::sqrt(v_hat) + adam.epsilon_hat);
        }
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        update(net.layers[l].weights, adam.m_w[l], adam.v_w[l], grads.d_weights[l]);
        update(net.layers[l].biases, adam.m_b[l], adam.v_b[l], grads.d_biases[l]);
    }
}

std::vector<double> fit(Network& net, AdamState& adam,
                        const std::vector<Sample>& dataset, int epochs,
                        int batch_size, std::uint64_t shuffle_seed) {
    if (dataset.empty()) throw std::invalid_argument("fit: empty dataset");
    if (batch_size < 0) throw std::invalid_argument("fit: negative batch size");

    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(shuffle_seed);
    std::size_t effective_batch =
        batch_size == 0 ? dataset.size() : static_cast<std::size_t>(batch_size);

    std::vector<double> history;
    history.reserve(epochs);
    for (int e = 0; e < epochs; ++e) {
        if (batch_size != 0) std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t pos = 0;
        while (pos < order.size()) {
            std::size_t end = std::min(pos + effective_batch, order.size());
            Gradients acc = Gradients::zeros_like(net);
            for (std::size_t k = pos; k < end; ++k) {
                const Sample& s = dataset[order[k]];
                ForwardTrace tr = forward(net, s.input);
                epoch_loss += mse_loss(tr.output(), s.target);
                Gradients g = backward_mse(net, tr, s.target);
                acc.accumulate(g);
            }
            acc.scale(1.0 / static_cast<double>(end - pos));
            adam_step(net, adam, acc);
            pos = end;
        }
        history.push_back(epoch_loss / static_cast<double>(dataset.size()));
    }
    return history;
}

void save_network(const Network& net, std::ostream& out) {
    out << "deepmod-net 1\n";
    out << "layers " << net.layers.size() << '\n';
    for (const Layer& l : net.layers)
        out << "layer " << l.spec.fan_in << ' ' << l.spec.fan_out << ' '
            << activation_name(l.spec.activation) << '\n';
    out << "params\n";
    for (const Layer& l : net.layers) {
        for (double w : l.weights) out << format_double(w) << '\n';
        for (double b : l.biases) out << format_double(b) << '\n';
    }
}

Network load_network(std::istream& in) {
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "deepmod-net" || version != 1)
        throw std::invalid_argument("load_network: bad header");
    std::string word;
    std::size_t n_layers = 0;
    if (!(in >> word >> n_layers) || word != "layers")
        throw std::invalid_argument("load_network: bad layer count");

    Network net;
    for (std::size_t i = 0; i < n_layers; ++i) {
        LayerSpec spec;
        std::string act;
        if (!(in >> word >> spec.fan_in >> spec.fan_out >> act) || word != "layer")
            throw std::invalid_argument("load_network: bad layer line");
        spec.activation = activation_from_name(act);
        Layer l;
        l.spec = spec;
        l.weights.resize(static_cast<std::size_t>(spec.fan_in) * spec.fan_out);
        l.biases.resize(spec.fan_out);
        net.layers.push_back(std::move(l));
    }
    if (!(in >> word) || word != "params")
        throw std::invalid_argument("load_network: missing params section");
    for (Layer& l : net.layers) {
        for (double& w : l.weights)
            if (!(in >> w)) throw std::invalid_argument("load_network: short param list");
        for (double& b : l.biases)
            if (!(in >> b)) throw std::invalid_argument("load_network: short param list");
    }
    return net;
}

void save_network_file(const Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("save_network_file: cannot open " + path);
    save_network(net, out);
}

Network load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_network_file: cannot open " + path);
    return load_network(in);
}

std::string network_fingerprint(const Network& net) {
    std::ostringstream buf;
    save_network(net, buf);
    return fnv1a_hex(buf.str());
}

}  // namespace deepmod
