// SPDX-License-Identifier: Apache-2.0
//
// burstsync - expert and learned synchronization estimators for PSK bursts
// Copyright (C) 2026 The burstsync authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "burstsync/nn/model.hpp"

#include <algorithm>
#include <cmath>

#include "burstsync/random.hpp"
#include "kernels.hpp"

namespace burstsync::nn {

std::string to_string(LayerKind k) {
    switch (k) {
        case LayerKind::conv1d: return "conv1d";
        case LayerKind::avg_pool: return "avg_pool";
        case LayerKind::max_pool: return "max_pool";
        case LayerKind::dense: return "dense";
        case LayerKind::relu: return "relu";
        case LayerKind::linear_out: return "linear_out";
    }
    return "?";
}

std::string to_string(Arch a) {
    return a == Arch::cfo ? "cfo" : "timing";
}

Arch parse_arch(const std::string& s) {
    if (s == "cfo") return Arch::cfo;
    if (s == "timing") return Arch::timing;
    throw std::invalid_argument("unknown architecture '" + s + "' (expected cfo or timing)");
}

LayerSpec LayerSpec::conv(int filter_len, int stride, int out_channels) {
    LayerSpec l;
    l.kind = LayerKind::conv1d;
    l.filter_len = filter_len;
    l.stride = stride;
    l.out_channels = out_channels;
    return l;
}

LayerSpec LayerSpec::avg_pool_layer(int p) {
    LayerSpec l;
    l.kind = LayerKind::avg_pool;
    l.pool = p;
    return l;
}

LayerSpec LayerSpec::max_pool_layer(int p) {
    LayerSpec l;
    l.kind = LayerKind::max_pool;
    l.pool = p;
    return l;
}

LayerSpec LayerSpec::dense_layer(int n_out) {
    LayerSpec l;
    l.kind = LayerKind::dense;
    l.out_features = n_out;
    return l;
}

LayerSpec LayerSpec::relu_layer() {
    return LayerSpec{};
}

LayerSpec LayerSpec::linear_out_layer() {
    LayerSpec l;
    l.kind = LayerKind::linear_out;
    l.out_features = 1;
    return l;
}

std::size_t conv_output_width(std::size_t n_in, int filter_len, int stride) {
    if (filter_len < 1 || stride < 1 || static_cast<std::size_t>(filter_len) > n_in) {
        return 0;
    }
    return (n_in - static_cast<std::size_t>(filter_len)) / static_cast<std::size_t>(stride) + 1;
}

std::vector<ResolvedLayer> resolve_chain(const ModelSpec& spec) {
    if (spec.input.length == 0 || spec.input.channels == 0) {
        throw ShapeError("model input shape must be non-empty");
    }
    std::vector<ResolvedLayer> out;
    Shape cur = spec.input;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        const std::string where = "layer " + std::to_string(i) + " (" + to_string(l.kind) + "): ";
        Shape next = cur;
        switch (l.kind) {
            case LayerKind::conv1d: {
                if (l.filter_len < 1 || l.stride < 1 || l.out_channels < 1) {
                    throw ShapeError(where + "filter length, stride and channels must be positive");
                }
                const std::size_t k = conv_output_width(cur.length, l.filter_len, l.stride);
                if (k == 0) {
                    throw ShapeError(where + "filter length " + std::to_string(l.filter_len) +
                                     " exceeds input width " + std::to_string(cur.length));
                }
                next = {k, static_cast<std::size_t>(l.out_channels)};
                break;
            }
            case LayerKind::avg_pool:
            case LayerKind::max_pool: {
                if (l.pool < 1) {
                    throw ShapeError(where + "pool size must be positive");
                }
                const std::size_t k = cur.length / static_cast<std::size_t>(l.pool);
                if (k == 0) {
                    throw ShapeError(where + "pool size exceeds input width");
                }
                next = {k, cur.channels};
                break;
            }
            case LayerKind::dense:
            case LayerKind::linear_out:
                if (l.out_features < 1) {
                    throw ShapeError(where + "output size must be positive");
                }
                if (l.kind == LayerKind::linear_out && l.out_features != 1) {
                    throw ShapeError(where + "linear output layer must produce a scalar");
                }
                next = {1, static_cast<std::size_t>(l.out_features)};
                break;
            case LayerKind::relu:
                break;
        }
        out.push_back({cur, next});
        cur = next;
    }
    return out;
}

std::vector<ResolvedLayer> resolve_shapes(const ModelSpec& spec) {
    auto out = resolve_chain(spec);
    const Shape cur = out.empty() ? spec.input : out.back().out;
    if (cur.size() != 1) {
        throw ShapeError("model output must be a scalar, got (" + std::to_string(cur.length) + "," +
                         std::to_string(cur.channels) + ")");
    }
    return out;
}

ArchHyper default_hyper(Arch arch, std::size_t nsamp) {
    ArchHyper h;
    if (arch == Arch::timing) {
        h.convs = {{8, 4}, {11, 4}, {10, 4}, {28, 2}};
        h.max_pool = {0, 0, 0, 0};
        return h;
    }
    h.avg_pool = 2;
    if (nsamp >= 128) {
        h.convs = {{16, 2}, {8, 2}, {8, 2}};
    } else if (nsamp >= 64) {
        h.convs = {{16, 2}, {4, 1}, {4, 1}};
    } else {
        h.convs = {{8, 1}, {4, 1}, {4, 1}};
    }
    return h;
}

ModelSpec build_model(Arch arch, std::size_t nsamp, const std::optional<ArchHyper>& hyper) {
    ModelSpec spec;
    spec.input = {nsamp, 2};
    spec.input_norm = InputNorm::rms;
    const ArchHyper h = hyper.value_or(default_hyper(arch, nsamp));
    if (arch == Arch::cfo) {
        static constexpr std::size_t allowed[] = {32, 64, 128, 256, 512, 1024};
        if (std::find(std::begin(allowed), std::end(allowed), nsamp) == std::end(allowed)) {
            throw ShapeError("cfo architecture: nsamp must be one of 32, 64, 128, 256, 512, 1024");
        }
        if (h.convs.size() != 3) {
            throw ShapeError("cfo architecture: expected 3 conv hyperparameter pairs");
        }
        spec.label_scale = 50e3;
        spec.layers.push_back(LayerSpec::conv(h.convs[0].filter_len, h.convs[0].stride, kCfoChannels[0]));
        spec.layers.push_back(LayerSpec::relu_layer());
        spec.layers.push_back(LayerSpec::avg_pool_layer(h.avg_pool));
        for (int i = 1; i < 3; ++i) {
            spec.layers.push_back(LayerSpec::conv(h.convs[i].filter_len, h.convs[i].stride, kCfoChannels[i]));
            spec.layers.push_back(LayerSpec::relu_layer());
        }
        spec.layers.push_back(LayerSpec::linear_out_layer());
        resolve_shapes(spec);
        return spec;
    }

    if (nsamp != 2048) {
        throw ShapeError("timing architecture: input length is fixed at 2048");
    }
    if (h.convs.size() != 4) {
        throw ShapeError("timing architecture: expected 4 conv hyperparameter pairs");
    }
    if (!h.max_pool.empty() && h.max_pool.size() != 4) {
        throw ShapeError("timing architecture: max-pool list must have 4 entries");
    }
    spec.label_scale = 500.0;
    std::size_t width = nsamp;
    for (int i = 0; i < 4; ++i) {
        const auto& c = h.convs[static_cast<std::size_t>(i)];
        spec.layers.push_back(LayerSpec::conv(c.filter_len, c.stride, kTimingStageChannels[i]));
        spec.layers.push_back(LayerSpec::relu_layer());
        width = conv_output_width(width, c.filter_len, c.stride);
        const int p = h.max_pool.empty() ? 0 : h.max_pool[static_cast<std::size_t>(i)];
        if (p > 1) {
            spec.layers.push_back(LayerSpec::max_pool_layer(p));
            width /= static_cast<std::size_t>(p);
        }
        if (width != static_cast<std::size_t>(kTimingStageWidths[i])) {
            throw ShapeError("timing architecture: stage " + std::to_string(i + 1) + " width " +
                             std::to_string(width) + " does not match the required " +
                             std::to_string(kTimingStageWidths[i]));
        }
    }
    spec.layers.push_back(LayerSpec::linear_out_layer());
    resolve_shapes(spec);
    return spec;
}

template <class T>
std::size_t Model<T>::parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params) {
        n += p.weights.size() + p.bias.size();
    }
    return n;
}

template <class T>
Model<T> make_model(const ModelSpec& spec) {
    const auto shapes = resolve_shapes(spec);
    Model<T> m;
    m.spec = spec;
    m.params.resize(spec.layers.size());
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        const Shape in = shapes[i].in;
        if (l.kind == LayerKind::conv1d) {
            const auto j = static_cast<std::size_t>(l.filter_len) * in.channels;
            const auto o = static_cast<std::size_t>(l.out_channels);
            m.params[i].weights = Tensor<T>({j, o});
            m.params[i].bias = Tensor<T>({o});
        } else if (l.kind == LayerKind::dense || l.kind == LayerKind::linear_out) {
            const auto o = static_cast<std::size_t>(l.out_features);
            m.params[i].weights = Tensor<T>({in.size(), o});
            m.params[i].bias = Tensor<T>({o});
        }
    }
    return m;
}

template <class T>
Model<T> init_model(const ModelSpec& spec, std::uint64_t seed) {
    Model<T> m = make_model<T>(spec);
    Rng rng(derive_seed(seed, {0x696e6974ULL}));
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        auto& w = m.params[i].weights;
        if (w.size() == 0) {
            continue;
        }
        const double fan_in = static_cast<double>(w.shape[0]);
        const double limit = spec.layers[i].kind == LayerKind::linear_out ? std::sqrt(3.0 / fan_in)
                                                                          : std::sqrt(6.0 / fan_in);
        for (auto& v : w.data) {
            v = static_cast<T>(rng.uniform(-limit, limit));
        }
    }
    return m;
}

template <class To, class From>
Model<To> convert_model(const Model<From>& src) {
    Model<To> m;
    m.spec = src.spec;
    m.params.resize(src.params.size());
    auto conv = [](const Tensor<From>& t) {
        Tensor<To> o;
        o.shape = t.shape;
        o.data.assign(t.data.begin(), t.data.end());
        return o;
    };
    for (std::size_t i = 0; i < src.params.size(); ++i) {
        m.params[i].weights = conv(src.params[i].weights);
        m.params[i].bias = conv(src.params[i].bias);
    }
    return m;
}

template <class T>
Gradients<T> zero_gradients(const Model<T>& m) {
    Gradients<T> g(m.params.size());
    for (std::size_t i = 0; i < m.params.size(); ++i) {
        g[i].weights = Tensor<T>(m.params[i].weights.shape);
        g[i].bias = Tensor<T>(m.params[i].bias.shape);
        if (m.params[i].weights.shape.empty()) {
            g[i].weights.data.clear();
        }
        if (m.params[i].bias.shape.empty()) {
            g[i].bias.data.clear();
        }
    }
    return g;
}

template <class T>
void clear_gradients(Gradients<T>& g) {
    for (auto& p : g) {
        std::fill(p.weights.data.begin(), p.weights.data.end(), T{});
        std::fill(p.bias.data.begin(), p.bias.data.end(), T{});
    }
}

namespace {

template <class T>
void check_finite(std::span<const T> v, std::size_t layer) {
    for (T x : v) {
        if (!std::isfinite(x)) {
            throw NonFiniteError("non-finite activation at layer " + std::to_string(layer));
        }
    }
}

template <class T>
void conv_forward(const LayerSpec& l, Shape in, Shape out, const LayerParams<T>& p, const T* x, T* y) {
    const std::size_t o = out.channels;
    for (std::size_t k = 0; k < out.length; ++k) {
        std::copy(p.bias.data.begin(), p.bias.data.end(), y + k * o);
    }
    const std::size_t j = static_cast<std::size_t>(l.filter_len) * in.channels;
    const std::size_t row = static_cast<std::size_t>(l.stride) * in.channels;
    kernels::gemm_acc<T>(out.length, o, j, x, row, 1, p.weights.data.data(), o, y, o);
}

template <class T>
void pool_forward(const LayerSpec& l, Shape in, Shape out, const T* x, T* y, std::uint32_t* arg) {
    const auto p = static_cast<std::size_t>(l.pool);
    const std::size_t c = in.channels;
    for (std::size_t k = 0; k < out.length; ++k) {
        for (std::size_t ch = 0; ch < c; ++ch) {
            const std::size_t base = k * p * c + ch;
            if (l.kind == LayerKind::avg_pool) {
                T acc{};
                for (std::size_t i = 0; i < p; ++i) {
                    acc += x[base + i * c];
                }
                y[k * c + ch] = acc / static_cast<T>(p);
            } else {
                std::size_t best = base;
                for (std::size_t i = 1; i < p; ++i) {
                    if (x[base + i * c] > x[best]) {
                        best = base + i * c;
                    }
                }
                y[k * c + ch] = x[best];
                arg[k * c + ch] = static_cast<std::uint32_t>(best);
            }
        }
    }
}

template <class T>
void dense_forward(std::size_t n_in, std::size_t n_out, const LayerParams<T>& p, const T* x, T* y) {
    const T* w = p.weights.data.data();
    if (n_out == 1) {
        T acc{};
        for (std::size_t i = 0; i < n_in; ++i) {
            acc += x[i] * w[i];
        }
        y[0] = acc + p.bias.data[0];
        return;
    }
    std::copy(p.bias.data.begin(), p.bias.data.end(), y);
    kernels::gemm_acc<T>(1, n_out, n_in, x, 0, 1, w, n_out, y, n_out);
}

template <class T>
void layer_forward(const LayerSpec& l, const ResolvedLayer& s, const LayerParams<T>& p, const T* x, T* y,
                   std::uint32_t* arg) {
    switch (l.kind) {
        case LayerKind::conv1d: conv_forward(l, s.in, s.out, p, x, y); break;
        case LayerKind::avg_pool:
        case LayerKind::max_pool: pool_forward(l, s.in, s.out, x, y, arg); break;
        case LayerKind::dense:
        case LayerKind::linear_out: dense_forward(s.in.size(), s.out.size(), p, x, y); break;
        case LayerKind::relu:
            for (std::size_t i = 0; i < s.in.size(); ++i) {
                y[i] = x[i] > T{} ? x[i] : T{};
            }
            break;
    }
}

}  // namespace

template <class T>
T forward(const Model<T>& m, std::span<const T> x, Workspace<T>& ws) {
    const auto shapes = resolve_shapes(m.spec);
    if (x.size() != m.spec.input.size()) {
        throw ShapeError("forward: input has " + std::to_string(x.size()) + " values, model expects " +
                         std::to_string(m.spec.input.size()));
    }
    const std::size_t n = m.spec.layers.size();
    ws.acts.resize(n + 1);
    ws.argmax.resize(n);
    ws.acts[0].assign(x.begin(), x.end());
    for (std::size_t i = 0; i < n; ++i) {
        ws.acts[i + 1].resize(shapes[i].out.size());
        if (m.spec.layers[i].kind == LayerKind::max_pool) {
            ws.argmax[i].resize(shapes[i].out.size());
        }
        layer_forward(m.spec.layers[i], shapes[i], m.params[i], ws.acts[i].data(), ws.acts[i + 1].data(),
                      ws.argmax[i].data());
        check_finite<T>(ws.acts[i + 1], i);
    }
    ws.cache_version = m.version;
    ws.valid = true;
    return ws.acts[n][0];
}

template <class T>
void backward(const Model<T>& m, Workspace<T>& ws, T dpred, Gradients<T>& grads, std::vector<T>* dinput) {
    if (!ws.valid || ws.cache_version != m.version) {
        throw StaleCacheError("backward: forward cache does not match the current parameters");
    }
    const auto shapes = resolve_shapes(m.spec);
    const std::size_t n = m.spec.layers.size();
    ws.grads.resize(n + 1);
    ws.wt.resize(n);
    ws.grads[n].assign(1, dpred);
    if (ws.wt_version != m.version) {
        for (std::size_t i = 0; i < n; ++i) {
            if (m.spec.layers[i].kind != LayerKind::conv1d) {
                continue;
            }
            const auto& w = m.params[i].weights;
            const std::size_t rows = w.shape[0];
            const std::size_t cols = w.shape[1];
            ws.wt[i].resize(rows * cols);
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t c = 0; c < cols; ++c) {
                    ws.wt[i][c * rows + r] = w.data[r * cols + c];
                }
            }
        }
        ws.wt_version = m.version;
    }

    for (std::size_t li = n; li-- > 0;) {
        const LayerSpec& l = m.spec.layers[li];
        const Shape in = shapes[li].in;
        const Shape out = shapes[li].out;
        const T* x = ws.acts[li].data();
        const T* dy = ws.grads[li + 1].data();
        const bool need_dx = li > 0 || dinput != nullptr;
        std::vector<T>& dx_buf = ws.grads[li];
        if (need_dx) {
            dx_buf.assign(in.size(), T{});
        }
        T* dx = dx_buf.data();
        auto& g = grads[li];

        switch (l.kind) {
            case LayerKind::conv1d: {
                const std::size_t o = out.channels;
                const std::size_t j = static_cast<std::size_t>(l.filter_len) * in.channels;
                const std::size_t row = static_cast<std::size_t>(l.stride) * in.channels;
                for (std::size_t k = 0; k < out.length; ++k) {
                    for (std::size_t c = 0; c < o; ++c) {
                        g.bias.data[c] += dy[k * o + c];
                    }
                }
                // dW (j x o) += windows^T (j x K) * dy (K x o)
                kernels::gemm_acc<T>(j, o, out.length, x, 1, row, dy, o, g.weights.data.data(), o);
                if (need_dx) {
                    // dx windows (K x j) += dy (K x o) * W^T (o x j); windows overlap.
                    kernels::gemm_acc<T>(out.length, j, o, dy, o, 1, ws.wt[li].data(), j, dx, row);
                }
                break;
            }
            case LayerKind::avg_pool:
                if (need_dx) {
                    const auto p = static_cast<std::size_t>(l.pool);
                    const std::size_t c = in.channels;
                    const T scale = T{1} / static_cast<T>(p);
                    for (std::size_t k = 0; k < out.length; ++k) {
                        for (std::size_t ch = 0; ch < c; ++ch) {
                            const T v = dy[k * c + ch] * scale;
                            for (std::size_t i = 0; i < p; ++i) {
                                dx[(k * p + i) * c + ch] += v;
                            }
                        }
                    }
                }
                break;
            case LayerKind::max_pool:
                if (need_dx) {
                    for (std::size_t i = 0; i < out.size(); ++i) {
                        dx[ws.argmax[li][i]] += dy[i];
                    }
                }
                break;
            case LayerKind::dense:
            case LayerKind::linear_out: {
                const std::size_t ni = in.size();
                const std::size_t no = out.size();
                T* gw = g.weights.data.data();
                const T* w = m.params[li].weights.data.data();
                for (std::size_t c = 0; c < no; ++c) {
                    g.bias.data[c] += dy[c];
                }
                for (std::size_t i = 0; i < ni; ++i) {
                    const T xi = x[i];
                    for (std::size_t c = 0; c < no; ++c) {
                        gw[i * no + c] += xi * dy[c];
                    }
                }
                if (need_dx) {
                    for (std::size_t i = 0; i < ni; ++i) {
                        T acc{};
                        for (std::size_t c = 0; c < no; ++c) {
                            acc += w[i * no + c] * dy[c];
                        }
                        dx[i] = acc;
                    }
                }
                break;
            }
            case LayerKind::relu:
                if (need_dx) {
                    for (std::size_t i = 0; i < in.size(); ++i) {
                        dx[i] = x[i] > T{} ? dy[i] : T{};
                    }
                }
                break;
        }
    }
    if (dinput != nullptr) {
        *dinput = ws.grads[0];
    }
}

template <class T>
T predict_raw(const Model<T>& m, std::span<const T> x) {
    Workspace<T> ws;
    return forward(m, x, ws);
}

template struct Model<float>;
template struct Model<double>;
template Model<float> make_model<float>(const ModelSpec&);
template Model<double> make_model<double>(const ModelSpec&);
template Model<float> init_model<float>(const ModelSpec&, std::uint64_t);
template Model<double> init_model<double>(const ModelSpec&, std::uint64_t);
template Model<double> convert_model<double, float>(const Model<float>&);
template Model<float> convert_model<float, double>(const Model<double>&);
template Model<float> convert_model<float, float>(const Model<float>&);
template Model<double> convert_model<double, double>(const Model<double>&);
template Gradients<float> zero_gradients<float>(const Model<float>&);
template Gradients<double> zero_gradients<double>(const Model<double>&);
template void clear_gradients<float>(Gradients<float>&);
template void clear_gradients<double>(Gradients<double>&);
template float forward<float>(const Model<float>&, std::span<const float>, Workspace<float>&);
template double forward<double>(const Model<double>&, std::span<const double>, Workspace<double>&);
template void backward<float>(const Model<float>&, Workspace<float>&, float, Gradients<float>&,
                              std::vector<float>*);
template void backward<double>(const Model<double>&, Workspace<double>&, double, Gradients<double>&,
                               std::vector<double>*);
template float predict_raw<float>(const Model<float>&, std::span<const float>);
template double predict_raw<double>(const Model<double>&, std::span<const double>);

}  // namespace burstsync::nn
