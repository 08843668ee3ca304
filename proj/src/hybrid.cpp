// Copyright 2026 The qcostnas authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qcostnas/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <chrono>
#include <numeric>

#include "qcostnas/rng.hpp"
#include "qcostnas/simkernel.hpp"

namespace qcostnas {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

double activate(Activation a, double x) {
    switch (a) {
        case Activation::Relu: return x > 0.0 ? x : 0.0;
        case Activation::Silu: return x / (1.0 + std::exp(-x));
        case Activation::Tanh: return std::tanh(x);
    }
    return x;
}

double activate_grad(Activation a, double x) {
    switch (a) {
        case Activation::Relu: return x > 0.0 ? 1.0 : 0.0;
        case Activation::Silu: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 + x * (1.0 - s));
        }
        case Activation::Tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
    }
    return 1.0;
}

bool pooling_applies(const ConvSpec& spec, int h, int w) {
    return spec.pooling != Pooling::None && h >= 2 && w >= 2;
}

struct ConvCache {
    InputShape in_shape;
    InputShape conv_shape;  // after conv + activation
    InputShape out_shape;   // after optional pooling
    std::vector<double> input;
    std::vector<double> pre_act;
    std::vector<double> post_act;
    std::vector<int> pool_argmax;      // max pooling only
    std::vector<double> dropout_mask;  // empty in eval mode / when disabled
    std::vector<double> output;
};

struct ForwardCache {
    std::vector<ConvCache> convs;
    std::vector<double> flat;
    std::vector<double> proj_out;
    std::vector<double> squashed;    // tanh(v)
    std::vector<double> angles;      // pi * tanh(v)
    std::vector<double> quantum_in;  // the vector the squash was applied to
    std::vector<double> quantum_out;
    std::vector<double> head_in;
    std::vector<double> scores;
};

std::size_t at3(const InputShape& s, int c, int y, int x) {
    return (static_cast<std::size_t>(c) * s.height + y) * s.width + x;
}

void conv_forward(const ConvLayer& layer, const InputShape& in, std::span<const double> x,
                  InputShape& out, std::vector<double>& z) {
    const ConvSpec& spec = layer.spec;
    if (in.channels != spec.in_ch || in.height < spec.kernel || in.width < spec.kernel)
        throw InvalidArchitectureError("conv layer does not fit its input");
    out.channels = spec.out_ch;
    out.height = (in.height - spec.kernel) / spec.stride + 1;
    out.width = (in.width - spec.kernel) / spec.stride + 1;
    z.assign(static_cast<std::size_t>(out.elements()), 0.0);
    const int k = spec.kernel;
    for (int oc = 0; oc < out.channels; ++oc) {
        for (int oy = 0; oy < out.height; ++oy) {
            for (int ox = 0; ox < out.width; ++ox) {
                double acc = layer.bias[static_cast<std::size_t>(oc)];
                for (int ic = 0; ic < in.channels; ++ic) {
                    const std::size_t w_base =
                        ((static_cast<std::size_t>(oc) * in.channels + ic) * k) * k;
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = oy * spec.stride + ky;
                        const std::size_t x_base = at3(in, ic, iy, ox * spec.stride);
                        for (int kx = 0; kx < k; ++kx)
                            acc += layer.weights[w_base + static_cast<std::size_t>(ky) * k + kx] *
                                   x[x_base + static_cast<std::size_t>(kx)];
                    }
                }
                z[at3(out, oc, oy, ox)] = acc;
            }
        }
    }
}

void conv_backward(const ConvLayer& layer, const ConvCache& cache, std::span<const double> dz,
                   std::vector<double>& dw, std::vector<double>& db, std::vector<double>& dx) {
    const ConvSpec& spec = layer.spec;
    const InputShape& in = cache.in_shape;
    const InputShape& out = cache.conv_shape;
    dx.assign(static_cast<std::size_t>(in.elements()), 0.0);
    const int k = spec.kernel;
    for (int oc = 0; oc < out.channels; ++oc) {
        for (int oy = 0; oy < out.height; ++oy) {
            for (int ox = 0; ox < out.width; ++ox) {
                const double g = dz[at3(out, oc, oy, ox)];
                if (g == 0.0) continue;
                db[static_cast<std::size_t>(oc)] += g;
                for (int ic = 0; ic < in.channels; ++ic) {
                    const std::size_t w_base =
                        ((static_cast<std::size_t>(oc) * in.channels + ic) * k) * k;
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = oy * spec.stride + ky;
                        const std::size_t x_base = at3(in, ic, iy, ox * spec.stride);
                        for (int kx = 0; kx < k; ++kx) {
                            const std::size_t w_idx =
                                w_base + static_cast<std::size_t>(ky) * k + kx;
                            dw[w_idx] += g * cache.input[x_base + static_cast<std::size_t>(kx)];
                            dx[x_base + static_cast<std::size_t>(kx)] +=
                                g * layer.weights[w_idx];
                        }
                    }
                }
            }
        }
    }
}

void dense_forward(const DenseLayer& layer, std::span<const double> x, std::vector<double>& y) {
    if (static_cast<int>(x.size()) != layer.in)
        throw InvalidArchitectureError("dense layer expects " + std::to_string(layer.in) +
                                       " inputs, got " + std::to_string(x.size()));
    y.assign(static_cast<std::size_t>(layer.out), 0.0);
    for (int o = 0; o < layer.out; ++o) {
        double acc = layer.bias[static_cast<std::size_t>(o)];
        const std::size_t base = static_cast<std::size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i)
            acc += layer.weights[base + static_cast<std::size_t>(i)] *
                   x[static_cast<std::size_t>(i)];
        y[static_cast<std::size_t>(o)] = acc;
    }
}

void dense_backward(const DenseLayer& layer, std::span<const double> x,
                    std::span<const double> dy, std::vector<double>& dw, std::vector<double>& db,
                    std::vector<double>& dx) {
    dx.assign(static_cast<std::size_t>(layer.in), 0.0);
    for (int o = 0; o < layer.out; ++o) {
        const double g = dy[static_cast<std::size_t>(o)];
        db[static_cast<std::size_t>(o)] += g;
        const std::size_t base = static_cast<std::size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) {
            dw[base + static_cast<std::size_t>(i)] += g * x[static_cast<std::size_t>(i)];
            dx[static_cast<std::size_t>(i)] +=
                g * layer.weights[base + static_cast<std::size_t>(i)];
        }
    }
}

/// Runs the classical-quantum-head pipeline, filling the cache. Dropout
/// masks are drawn only when `dropout_rng` is non-null.
void forward_pass(const HybridModel& model, std::span<const double> image, ForwardCache& cache,
                  Rng* dropout_rng, double dropout_rate) {
    if (static_cast<int>(image.size()) != model.input.elements())
        throw InvalidArchitectureError("image size does not match the model input");
    cache.convs.clear();
    cache.convs.reserve(model.convs.size());
    InputShape shape = model.input;
    std::vector<double> current(image.begin(), image.end());
    for (const ConvLayer& layer : model.convs) {
        ConvCache cc;
        cc.in_shape = shape;
        cc.input = current;
        conv_forward(layer, shape, current, cc.conv_shape, cc.pre_act);
        cc.post_act.resize(cc.pre_act.size());
        for (std::size_t i = 0; i < cc.pre_act.size(); ++i)
            cc.post_act[i] = activate(layer.spec.activation, cc.pre_act[i]);

        if (pooling_applies(layer.spec, cc.conv_shape.height, cc.conv_shape.width)) {
            cc.out_shape = {cc.conv_shape.channels, cc.conv_shape.height / 2,
                            cc.conv_shape.width / 2};
            cc.output.assign(static_cast<std::size_t>(cc.out_shape.elements()), 0.0);
            if (layer.spec.pooling == Pooling::Max)
                cc.pool_argmax.assign(cc.output.size(), 0);
            for (int c = 0; c < cc.out_shape.channels; ++c) {
                for (int y = 0; y < cc.out_shape.height; ++y) {
                    for (int x = 0; x < cc.out_shape.width; ++x) {
                        double best = -1e300, sum = 0.0;
                        int best_idx = 0;
                        for (int dy = 0; dy < 2; ++dy) {
                            for (int dx = 0; dx < 2; ++dx) {
                                const int idx = static_cast<int>(
                                    at3(cc.conv_shape, c, 2 * y + dy, 2 * x + dx));
                                const double v = cc.post_act[static_cast<std::size_t>(idx)];
                                sum += v;
                                if (v > best) {
                                    best = v;
                                    best_idx = idx;
                                }
                            }
                        }
                        const std::size_t out_idx = at3(cc.out_shape, c, y, x);
                        if (layer.spec.pooling == Pooling::Max) {
                            cc.output[out_idx] = best;
                            cc.pool_argmax[out_idx] = best_idx;
                        } else {
                            cc.output[out_idx] = 0.25 * sum;
                        }
                    }
                }
            }
        } else {
            cc.out_shape = cc.conv_shape;
            cc.output = cc.post_act;
        }

        if (layer.spec.dropout && dropout_rng != nullptr && dropout_rate > 0.0) {
            cc.dropout_mask.resize(cc.output.size());
            const double keep_scale = 1.0 / (1.0 - dropout_rate);
            for (std::size_t i = 0; i < cc.output.size(); ++i) {
                cc.dropout_mask[i] = dropout_rng->bernoulli(dropout_rate) ? 0.0 : keep_scale;
                cc.output[i] *= cc.dropout_mask[i];
            }
        }
        shape = cc.out_shape;
        current = cc.output;
        cache.convs.push_back(std::move(cc));
    }

    cache.flat = std::move(current);

    const std::vector<double>* features = &cache.flat;
    if (model.projection) {
        dense_forward(*model.projection, cache.flat, cache.proj_out);
        features = &cache.proj_out;
    }

    if (model.circuit) {
        cache.quantum_in = *features;
        cache.squashed.resize(cache.quantum_in.size());
        cache.angles.resize(cache.quantum_in.size());
        for (std::size_t i = 0; i < cache.quantum_in.size(); ++i) {
            cache.squashed[i] = std::tanh(cache.quantum_in[i]);
            cache.angles[i] = kPi * cache.squashed[i];
        }
        const Statevector state = run(*model.circuit, model.theta, cache.angles);
        cache.quantum_out = expect_z(state);
        cache.head_in = cache.quantum_out;
    } else {
        cache.head_in = *features;
    }

    if (!model.head) throw InvalidArchitectureError("model has no classification head");
    dense_forward(*model.head, cache.head_in, cache.scores);
}

struct Grads {
    std::vector<std::vector<double>> conv_w;
    std::vector<std::vector<double>> conv_b;
    std::vector<double> proj_w;
    std::vector<double> proj_b;
    std::vector<double> theta;
    std::vector<double> head_w;
    std::vector<double> head_b;

    static Grads zeros_like(const HybridModel& model) {
        Grads g;
        for (const ConvLayer& layer : model.convs) {
            g.conv_w.emplace_back(layer.weights.size(), 0.0);
            g.conv_b.emplace_back(layer.bias.size(), 0.0);
        }
        if (model.projection) {
            g.proj_w.assign(model.projection->weights.size(), 0.0);
            g.proj_b.assign(model.projection->bias.size(), 0.0);
        }
        g.theta.assign(model.theta.size(), 0.0);
        if (model.head) {
            g.head_w.assign(model.head->weights.size(), 0.0);
            g.head_b.assign(model.head->bias.size(), 0.0);
        }
        return g;
    }

    void scale(double factor) {
        const auto apply = [factor](std::vector<double>& v) {
            for (double& x : v) x *= factor;
        };
        for (auto& v : conv_w) apply(v);
        for (auto& v : conv_b) apply(v);
        apply(proj_w);
        apply(proj_b);
        apply(theta);
        apply(head_w);
        apply(head_b);
    }
};

/// Softmax cross-entropy loss for one sample, accumulating gradients.
double backward_pass(const HybridModel& model, const ForwardCache& cache, int label,
                     Grads& grads) {
    const std::vector<double>& scores = cache.scores;
    const double max_score = *std::max_element(scores.begin(), scores.end());
    double norm = 0.0;
    for (double s : scores) norm += std::exp(s - max_score);
    const double log_norm = std::log(norm) + max_score;
    const double loss = log_norm - scores[static_cast<std::size_t>(label)];

    std::vector<double> dscores(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        dscores[i] = std::exp(scores[i] - log_norm);
        if (static_cast<int>(i) == label) dscores[i] -= 1.0;
    }

    std::vector<double> d_head_in;
    dense_backward(*model.head, cache.head_in, dscores, grads.head_w, grads.head_b, d_head_in);

    std::vector<double> d_features;
    if (model.circuit) {
        const QuantumJacobians jac =
            adjoint_jacobians(*model.circuit, model.theta, cache.angles);
        const int n_out = jac.d_params.n_outputs;
        for (int p = 0; p < jac.d_params.n_params; ++p) {
            double acc = 0.0;
            for (int o = 0; o < n_out; ++o)
                acc += d_head_in[static_cast<std::size_t>(o)] * jac.d_params.at(o, p);
            grads.theta[static_cast<std::size_t>(p)] += acc;
        }
        std::vector<double> d_angles(cache.angles.size(), 0.0);
        for (int j = 0; j < jac.d_inputs.n_params; ++j) {
            double acc = 0.0;
            for (int o = 0; o < n_out; ++o)
                acc += d_head_in[static_cast<std::size_t>(o)] * jac.d_inputs.at(o, j);
            d_angles[static_cast<std::size_t>(j)] = acc;
        }
        d_features.resize(d_angles.size());
        for (std::size_t i = 0; i < d_angles.size(); ++i) {
            const double t = cache.squashed[i];
            d_features[i] = d_angles[i] * kPi * (1.0 - t * t);
        }
    } else {
        d_features = std::move(d_head_in);
    }

    std::vector<double> d_flat;
    if (model.projection) {
        dense_backward(*model.projection, cache.flat, d_features, grads.proj_w, grads.proj_b,
                       d_flat);
    } else {
        d_flat = std::move(d_features);
    }

    // conv stack backward
    std::vector<double> d_out = std::move(d_flat);
    for (std::size_t li = model.convs.size(); li-- > 0;) {
        const ConvLayer& layer = model.convs[li];
        const ConvCache& cc = cache.convs[li];
        if (!cc.dropout_mask.empty())
            for (std::size_t i = 0; i < d_out.size(); ++i) d_out[i] *= cc.dropout_mask[i];

        std::vector<double> d_post_act;
        if (pooling_applies(layer.spec, cc.conv_shape.height, cc.conv_shape.width)) {
            d_post_act.assign(cc.post_act.size(), 0.0);
            if (layer.spec.pooling == Pooling::Max) {
                for (std::size_t i = 0; i < d_out.size(); ++i)
                    d_post_act[static_cast<std::size_t>(cc.pool_argmax[i])] += d_out[i];
            } else {
                for (int c = 0; c < cc.out_shape.channels; ++c)
                    for (int y = 0; y < cc.out_shape.height; ++y)
                        for (int x = 0; x < cc.out_shape.width; ++x) {
                            const double g = 0.25 * d_out[at3(cc.out_shape, c, y, x)];
                            for (int dy = 0; dy < 2; ++dy)
                                for (int dx = 0; dx < 2; ++dx)
                                    d_post_act[at3(cc.conv_shape, c, 2 * y + dy, 2 * x + dx)] +=
                                        g;
                        }
            }
        } else {
            d_post_act = std::move(d_out);
        }

        std::vector<double> dz(d_post_act.size());
        for (std::size_t i = 0; i < dz.size(); ++i)
            dz[i] = d_post_act[i] * activate_grad(layer.spec.activation, cc.pre_act[i]);

        std::vector<double> dx;
        conv_backward(layer, cc, dz, grads.conv_w[li], grads.conv_b[li], dx);
        d_out = std::move(dx);
    }
    return loss;
}

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
};

void adam_update(std::vector<double>& weights, const std::vector<double>& grads,
                 AdamState& state, const TrainOptions& opt, double bias1, double bias2) {
    if (state.m.empty()) {
        state.m.assign(weights.size(), 0.0);
        state.v.assign(weights.size(), 0.0);
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        state.m[i] = opt.beta1 * state.m[i] + (1.0 - opt.beta1) * grads[i];
        state.v[i] = opt.beta2 * state.v[i] + (1.0 - opt.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bias1;
        const double v_hat = state.v[i] / bias2;
        weights[i] -= opt.lr * m_hat / (std::sqrt(v_hat) + opt.adam_epsilon);
    }
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

Dataset make_dataset(int n_classes, int samples_per_class, std::uint64_t seed) {
    if (n_classes < 2 || n_classes > 10)
        throw InvalidArgumentError("n_classes must lie in [2, 10]");
    if (samples_per_class < 20)
        throw InvalidArgumentError("need at least 20 samples per class");
    Dataset data;
    data.n_classes = n_classes;
    data.seed = seed;
    Rng rng = Rng(seed).fork(0x646174617365ull);
    const int n_train_per_class = (samples_per_class * 8) / 10;
    for (int c = 0; c < n_classes; ++c) {
        const double alpha = kPi * (c + 0.5) / n_classes;
        const double ca = std::cos(alpha);
        const double sa = std::sin(alpha);
        for (int s = 0; s < samples_per_class; ++s) {
            std::vector<double> img(64);
            for (int y = 0; y < 8; ++y) {
                for (int x = 0; x < 8; ++x) {
                    const double u = (x - 3.5) * ca + (y - 3.5) * sa;
                    const double base = 0.5 + 0.4 * std::cos(kPi * u / 2.0);
                    const double v = base + 0.12 * rng.gaussian();
                    img[static_cast<std::size_t>(8 * y + x)] = std::clamp(v, 0.0, 1.0);
                }
            }
            const std::size_t index = data.images.size();
            data.images.push_back(std::move(img));
            data.labels.push_back(c);
            if (s < n_train_per_class)
                data.train_indices.push_back(index);
            else
                data.val_indices.push_back(index);
        }
    }
    return data;
}

nlohmann::json dataset_to_json(const Dataset& d) {
    return nlohmann::json{
        {"schema_version", 1}, {"n_classes", d.n_classes},   {"height", d.height},
        {"width", d.width},    {"images", d.images},         {"labels", d.labels},
        {"train_indices", d.train_indices},                  {"val_indices", d.val_indices},
        {"seed", d.seed},
    };
}

Dataset dataset_from_json(const nlohmann::json& doc) {
    Dataset d;
    d.n_classes = doc.at("n_classes").get<int>();
    d.height = doc.at("height").get<int>();
    d.width = doc.at("width").get<int>();
    d.images = doc.at("images").get<std::vector<std::vector<double>>>();
    d.labels = doc.at("labels").get<std::vector<int>>();
    d.train_indices = doc.at("train_indices").get<std::vector<std::size_t>>();
    d.val_indices = doc.at("val_indices").get<std::vector<std::size_t>>();
    d.seed = doc.at("seed").get<std::uint64_t>();
    return d;
}

HybridModel HybridModel::build(const HybridSpec& spec, std::uint64_t seed) {
    HybridModel model;
    model.input = spec.input;
    model.n_classes = spec.n_classes;
    if (spec.n_classes < 1) throw InvalidArchitectureError("need at least one class");

    Rng rng = Rng(seed).fork(0x696e6974ull);
    InputShape shape = spec.input;
    for (const ConvSpec& conv : spec.conv_stack) {
        if (conv.in_ch != shape.channels)
            throw InvalidArchitectureError("conv channel chain is inconsistent");
        if (shape.height < conv.kernel || shape.width < conv.kernel)
            throw InvalidArchitectureError("conv kernel does not fit its input");
        ConvLayer layer;
        layer.spec = conv;
        const std::size_t fan_in =
            static_cast<std::size_t>(conv.in_ch) * conv.kernel * conv.kernel;
        layer.weights.resize(fan_in * static_cast<std::size_t>(conv.out_ch));
        const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
        for (double& w : layer.weights) w = std_dev * rng.gaussian();
        layer.bias.assign(static_cast<std::size_t>(conv.out_ch), 0.0);
        model.convs.push_back(std::move(layer));
        shape.channels = conv.out_ch;
        shape.height = (shape.height - conv.kernel) / conv.stride + 1;
        shape.width = (shape.width - conv.kernel) / conv.stride + 1;
        if (pooling_applies(conv, shape.height, shape.width)) {
            shape.height /= 2;
            shape.width /= 2;
        }
    }
    std::int64_t features = shape.elements();

    const auto glorot = [&rng](DenseLayer& layer) {
        layer.weights.resize(static_cast<std::size_t>(layer.in) * layer.out);
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
        for (double& w : layer.weights) w = rng.uniform(-limit, limit);
        layer.bias.assign(static_cast<std::size_t>(layer.out), 0.0);
    };

    if (spec.with_projection) {
        if (!spec.ansatz)
            throw InvalidArchitectureError("projection needs a quantum layer to map into");
        DenseLayer proj;
        proj.in = static_cast<int>(features);
        proj.out = spec.ansatz->n_qubits;
        glorot(proj);
        model.projection = std::move(proj);
        features = spec.ansatz->n_qubits;
    }

    if (spec.ansatz) {
        if (features != spec.ansatz->n_qubits)
            throw InvalidArchitectureError("angle embedding needs one qubit per feature: " +
                                           std::to_string(features) + " features for " +
                                           std::to_string(spec.ansatz->n_qubits) + " qubits");
        model.circuit = embedded_ansatz(*spec.ansatz);
        model.theta.resize(static_cast<std::size_t>(model.circuit->n_params()));
        for (double& t : model.theta) t = rng.uniform(-kPi, kPi);
        features = spec.ansatz->n_qubits;
    }

    DenseLayer head;
    head.in = static_cast<int>(features);
    head.out = spec.n_classes;
    glorot(head);
    model.head = std::move(head);
    return model;
}

std::vector<double> forward(const HybridModel& model, std::span<const double> image) {
    ForwardCache cache;
    forward_pass(model, image, cache, nullptr, 0.0);
    return cache.scores;
}

std::int64_t count_all_parameters(const HybridModel& model) {
    std::int64_t total = 0;
    for (const ConvLayer& layer : model.convs)
        total += static_cast<std::int64_t>(layer.weights.size() + layer.bias.size());
    if (model.projection)
        total += static_cast<std::int64_t>(model.projection->weights.size() +
                                           model.projection->bias.size());
    total += static_cast<std::int64_t>(model.theta.size());
    if (model.head)
        total +=
            static_cast<std::int64_t>(model.head->weights.size() + model.head->bias.size());
    return total;
}

double evaluate_accuracy(const HybridModel& model, const Dataset& dataset,
                         const std::vector<std::size_t>& indices) {
    if (indices.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t idx : indices) {
        const auto scores = forward(model, dataset.images[idx]);
        const std::size_t arg = static_cast<std::size_t>(
            std::max_element(scores.begin(), scores.end()) - scores.begin());
        if (static_cast<int>(arg) == dataset.labels[idx]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(indices.size());
}

TrainResult train(HybridModel& model, const Dataset& dataset, const TrainOptions& options,
                  std::uint64_t seed) {
    if (options.batch_size < 1 || options.epochs < 0)
        throw InvalidArgumentError("bad training options");
    Rng base(seed);
    Rng shuffle_rng = base.fork(0x73687566ull);
    Rng dropout_rng = base.fork(0x64726f70ull);

    std::vector<AdamState> conv_w_states(model.convs.size());
    std::vector<AdamState> conv_b_states(model.convs.size());
    AdamState proj_w_state, proj_b_state, theta_state, head_w_state, head_b_state;

    TrainResult result;
    std::vector<std::size_t> order = dataset.train_indices;
    ForwardCache cache;
    std::int64_t t = 0;

    for (int epoch = 1; epoch <= options.epochs; ++epoch) {
        // Fisher-Yates with the platform-stable generator
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j =
                static_cast<std::size_t>(shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(options.batch_size));
            Grads grads = Grads::zeros_like(model);
            double loss = 0.0;
            for (std::size_t i = start; i < stop; ++i) {
                forward_pass(model, dataset.images[order[i]], cache, &dropout_rng,
                             options.dropout_rate);
                loss += backward_pass(model, cache, dataset.labels[order[i]], grads);
            }
            const double inv = 1.0 / static_cast<double>(stop - start);
            loss *= inv;
            grads.scale(inv);
            if (!std::isfinite(loss)) {
                result.diverged = true;
                result.best_val_accuracy = 0.0;
                return result;
            }
            ++t;
            const double bias1 = 1.0 - std::pow(options.beta1, static_cast<double>(t));
            const double bias2 = 1.0 - std::pow(options.beta2, static_cast<double>(t));
            for (std::size_t li = 0; li < model.convs.size(); ++li) {
                adam_update(model.convs[li].weights, grads.conv_w[li], conv_w_states[li],
                            options, bias1, bias2);
                adam_update(model.convs[li].bias, grads.conv_b[li], conv_b_states[li], options,
                            bias1, bias2);
            }
            if (model.projection) {
                adam_update(model.projection->weights, grads.proj_w, proj_w_state, options,
                            bias1, bias2);
                adam_update(model.projection->bias, grads.proj_b, proj_b_state, options, bias1,
                            bias2);
            }
            adam_update(model.theta, grads.theta, theta_state, options, bias1, bias2);
            if (model.head) {
                adam_update(model.head->weights, grads.head_w, head_w_state, options, bias1,
                            bias2);
                adam_update(model.head->bias, grads.head_b, head_b_state, options, bias1, bias2);
            }
            ++result.steps_executed;
            if (!all_finite(model.theta) ||
                (model.head && !all_finite(model.head->weights))) {
                result.diverged = true;
                result.best_val_accuracy = 0.0;
                return result;
            }
        }
        const double val_acc = evaluate_accuracy(model, dataset, dataset.val_indices);
        result.best_val_accuracy = std::max(result.best_val_accuracy, val_acc);
        if (epoch == options.early_stop_epochs &&
            result.best_val_accuracy < options.early_stop_accuracy)
            break;
    }
    return result;
}

double loss_and_gradients(const HybridModel& model, const Dataset& dataset,
                          std::span<const std::size_t> indices, ModelGradients& out) {
    if (indices.empty()) throw InvalidArgumentError("empty batch");
    Grads grads = Grads::zeros_like(model);
    ForwardCache cache;
    double loss = 0.0;
    for (std::size_t idx : indices) {
        forward_pass(model, dataset.images[idx], cache, nullptr, 0.0);
        loss += backward_pass(model, cache, dataset.labels[idx], grads);
    }
    const double inv = 1.0 / static_cast<double>(indices.size());
    grads.scale(inv);
    out.conv_weights = std::move(grads.conv_w);
    out.conv_bias = std::move(grads.conv_b);
    out.projection_weights = std::move(grads.proj_w);
    out.projection_bias = std::move(grads.proj_b);
    out.theta = std::move(grads.theta);
    out.head_weights = std::move(grads.head_w);
    out.head_bias = std::move(grads.head_b);
    return loss * inv;
}

double measure_reference_throughput(int timed_steps) {
    if (timed_steps < 1) throw InvalidArgumentError("need at least one timed step");
    // reference model: the fixed-mode CNN, classical-only
    HybridSpec spec;
    spec.conv_stack = {ConvSpec{1, 16, 3, 1, Activation::Relu, Pooling::Max, true}};
    spec.with_projection = false;
    spec.n_classes = 10;
    HybridModel model = HybridModel::build(spec, 12345);

    const Dataset data = make_dataset(10, 20, 777);
    std::vector<std::size_t> batch(data.train_indices.begin(), data.train_indices.begin() + 32);

    const std::vector<ClassicalLayerSpec> stack = {spec.conv_stack[0],
                                                   LinearSpec{16 * 3 * 3, 10}};
    const double flops_per_sample =
        static_cast<double>(training_step_flops(stack, spec.input));

    ModelGradients grads;
    std::vector<double> step_seconds;
    const int warmup = 2;
    for (int step = 0; step < warmup + timed_steps; ++step) {
        const auto start = std::chrono::steady_clock::now();
        loss_and_gradients(model, data, batch, grads);
        // one SGD-flavored update so successive steps stay realistic
        for (std::size_t li = 0; li < model.convs.size(); ++li)
            for (std::size_t i = 0; i < model.convs[li].weights.size(); ++i)
                model.convs[li].weights[i] -= 0.01 * grads.conv_weights[li][i];
        for (std::size_t i = 0; i < model.head->weights.size(); ++i)
            model.head->weights[i] -= 0.01 * grads.head_weights[i];
        const auto stop = std::chrono::steady_clock::now();
        if (step >= warmup)
            step_seconds.push_back(std::chrono::duration<double>(stop - start).count());
    }
    std::sort(step_seconds.begin(), step_seconds.end());
    const std::size_t mid = step_seconds.size() / 2;
    const double median_step = step_seconds.size() % 2 == 1
                                   ? step_seconds[mid]
                                   : 0.5 * (step_seconds[mid - 1] + step_seconds[mid]);
    const double per_sample = median_step / static_cast<double>(batch.size());
    if (!(per_sample > 0.0)) throw InvalidArgumentError("timer resolution too coarse");
    return flops_per_sample / per_sample;
}

namespace {

nlohmann::json dense_to_json(const DenseLayer& layer) {
    return {{"in", layer.in}, {"out", layer.out}, {"weights", layer.weights},
            {"bias", layer.bias}};
}

DenseLayer dense_from_json(const nlohmann::json& doc) {
    DenseLayer layer;
    layer.in = doc.at("in").get<int>();
    layer.out = doc.at("out").get<int>();
    layer.weights = doc.at("weights").get<std::vector<double>>();
    layer.bias = doc.at("bias").get<std::vector<double>>();
    return layer;
}

}  // namespace

nlohmann::json model_to_json(const HybridModel& model) {
    nlohmann::json convs = nlohmann::json::array();
    for (const ConvLayer& layer : model.convs) {
        convs.push_back({{"in_ch", layer.spec.in_ch},
                         {"out_ch", layer.spec.out_ch},
                         {"kernel", layer.spec.kernel},
                         {"stride", layer.spec.stride},
                         {"activation", std::string(activation_name(layer.spec.activation))},
                         {"pooling", std::string(pooling_name(layer.spec.pooling))},
                         {"dropout", layer.spec.dropout},
                         {"weights", layer.weights},
                         {"bias", layer.bias}});
    }
    nlohmann::json doc{{"schema_version", 1},
                       {"n_classes", model.n_classes},
                       {"input", {{"channels", model.input.channels},
                                  {"height", model.input.height},
                                  {"width", model.input.width}}},
                       {"convs", convs},
                       {"theta", model.theta}};
    if (model.projection) doc["projection"] = dense_to_json(*model.projection);
    if (model.circuit) doc["circuit"] = to_text(*model.circuit);
    if (model.head) doc["head"] = dense_to_json(*model.head);
    return doc;
}

HybridModel model_from_json(const nlohmann::json& doc) {
    HybridModel model;
    model.n_classes = doc.at("n_classes").get<int>();
    model.input = {doc.at("input").at("channels").get<int>(),
                   doc.at("input").at("height").get<int>(),
                   doc.at("input").at("width").get<int>()};
    for (const auto& c : doc.at("convs")) {
        ConvLayer layer;
        layer.spec.in_ch = c.at("in_ch").get<int>();
        layer.spec.out_ch = c.at("out_ch").get<int>();
        layer.spec.kernel = c.at("kernel").get<int>();
        layer.spec.stride = c.at("stride").get<int>();
        layer.spec.activation = *activation_from_name(c.at("activation").get<std::string>());
        layer.spec.pooling = *pooling_from_name(c.at("pooling").get<std::string>());
        layer.spec.dropout = c.at("dropout").get<bool>();
        layer.weights = c.at("weights").get<std::vector<double>>();
        layer.bias = c.at("bias").get<std::vector<double>>();
        model.convs.push_back(std::move(layer));
    }
    if (doc.contains("projection")) model.projection = dense_from_json(doc.at("projection"));
    if (doc.contains("circuit")) model.circuit = from_text(doc.at("circuit").get<std::string>());
    model.theta = doc.at("theta").get<std::vector<double>>();
    if (doc.contains("head")) model.head = dense_from_json(doc.at("head"));
    return model;
}

}  // namespace qcostnas
