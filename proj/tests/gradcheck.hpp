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

#pragma once

// Finite-difference gradient check and a straight-loop reference forward
// pass, shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "burstsync/nn/model.hpp"
#include "burstsync/random.hpp"

namespace gradcheck {

using namespace burstsync;
using namespace burstsync::nn;

// Plain nested-loop forward in double, independent of the GEMM kernel.
inline double reference_forward(const Model<double>& m, const std::vector<double>& x_in) {
    std::vector<double> x = x_in;
    Shape s = m.spec.input;
    for (std::size_t li = 0; li < m.spec.layers.size(); ++li) {
        const LayerSpec& l = m.spec.layers[li];
        const auto& w = m.params[li].weights.data;
        const auto& b = m.params[li].bias.data;
        std::vector<double> y;
        Shape o = s;
        switch (l.kind) {
            case LayerKind::conv1d: {
                o = {(s.length - static_cast<std::size_t>(l.filter_len)) / static_cast<std::size_t>(l.stride) + 1,
                     static_cast<std::size_t>(l.out_channels)};
                y.assign(o.size(), 0.0);
                for (std::size_t k = 0; k < o.length; ++k) {
                    for (std::size_t co = 0; co < o.channels; ++co) {
                        double acc = b[co];
                        for (int t = 0; t < l.filter_len; ++t) {
                            for (std::size_t ci = 0; ci < s.channels; ++ci) {
                                const std::size_t row = static_cast<std::size_t>(t) * s.channels + ci;
                                acc += w[row * o.channels + co] *
                                       x[(k * static_cast<std::size_t>(l.stride) + static_cast<std::size_t>(t)) * s.channels + ci];
                            }
                        }
                        y[k * o.channels + co] = acc;
                    }
                }
                break;
            }
            case LayerKind::avg_pool:
            case LayerKind::max_pool: {
                const auto p = static_cast<std::size_t>(l.pool);
                o = {s.length / p, s.channels};
                y.assign(o.size(), 0.0);
                for (std::size_t k = 0; k < o.length; ++k) {
                    for (std::size_t c = 0; c < s.channels; ++c) {
                        double acc = l.kind == LayerKind::avg_pool ? 0.0 : -INFINITY;
                        for (std::size_t i = 0; i < p; ++i) {
                            const double v = x[(k * p + i) * s.channels + c];
                            acc = l.kind == LayerKind::avg_pool ? acc + v / static_cast<double>(p) : std::max(acc, v);
                        }
                        y[k * s.channels + c] = acc;
                    }
                }
                break;
            }
            case LayerKind::dense:
            case LayerKind::linear_out: {
                o = {1, static_cast<std::size_t>(l.out_features)};
                y.assign(o.size(), 0.0);
                for (std::size_t j = 0; j < o.channels; ++j) {
                    double acc = b[j];
                    for (std::size_t i = 0; i < s.size(); ++i) {
                        acc += x[i] * w[i * o.channels + j];
                    }
                    y[j] = acc;
                }
                break;
            }
            case LayerKind::relu:
                y = x;
                for (auto& v : y) {
                    v = std::max(v, 0.0);
                }
                break;
        }
        x = std::move(y);
        s = o;
    }
    return x.at(0);
}

// Randomized model exercising one layer kind, ending in a scalar.
inline ModelSpec random_spec(LayerKind kind, Rng& rng) {
    ModelSpec spec;
    spec.input_norm = InputNorm::none;
    const auto ch = static_cast<std::size_t>(rng.uniform_int(1, 4));
    switch (kind) {
        case LayerKind::conv1d: {
            const int len = static_cast<int>(rng.uniform_int(1, 5));
            const int stride = static_cast<int>(rng.uniform_int(1, 3));
            const auto k = static_cast<std::size_t>(rng.uniform_int(1, 6));
            spec.input = {(k - 1) * static_cast<std::size_t>(stride) + static_cast<std::size_t>(len) +
                              static_cast<std::size_t>(rng.uniform_int(0, stride - 1)),
                          ch};
            spec.layers = {LayerSpec::conv(len, stride, static_cast<int>(rng.uniform_int(1, 5)))};
            break;
        }
        case LayerKind::avg_pool:
        case LayerKind::max_pool: {
            const int p = static_cast<int>(rng.uniform_int(1, 4));
            spec.input = {static_cast<std::size_t>(p * rng.uniform_int(1, 5) + rng.uniform_int(0, p - 1)), ch};
            spec.layers = {kind == LayerKind::avg_pool ? LayerSpec::avg_pool_layer(p) : LayerSpec::max_pool_layer(p)};
            break;
        }
        case LayerKind::dense:
            spec.input = {static_cast<std::size_t>(rng.uniform_int(1, 6)), ch};
            spec.layers = {LayerSpec::dense_layer(static_cast<int>(rng.uniform_int(1, 6)))};
            break;
        case LayerKind::relu:
            spec.input = {static_cast<std::size_t>(rng.uniform_int(1, 8)), ch};
            spec.layers = {LayerSpec::conv(static_cast<int>(rng.uniform_int(1, 2)), 1, 3), LayerSpec::relu_layer()};
            if (spec.input.length < 2) {
                spec.input.length = 2;
            }
            break;
        case LayerKind::linear_out:
            spec.input = {static_cast<std::size_t>(rng.uniform_int(1, 8)), ch};
            break;
    }
    spec.layers.push_back(LayerSpec::linear_out_layer());
    return spec;
}

struct CheckResult {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
};

inline double rel_error(double a, double n) {
    return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-6});
}

// True if every ReLU input and max-pool window stays clear of its kink.
inline bool clear_of_kinks(const Model<double>& m, const Workspace<double>& ws, double margin) {
    const auto shapes = resolve_shapes(m.spec);
    for (std::size_t i = 0; i < m.spec.layers.size(); ++i) {
        const auto& l = m.spec.layers[i];
        const auto& x = ws.acts[i];
        if (l.kind == LayerKind::relu) {
            for (double v : x) {
                if (std::abs(v) < margin) return false;
            }
        } else if (l.kind == LayerKind::max_pool) {
            const auto p = static_cast<std::size_t>(l.pool);
            const std::size_t c = shapes[i].in.channels;
            for (std::size_t k = 0; k < shapes[i].out.length; ++k) {
                for (std::size_t ch = 0; ch < c; ++ch) {
                    std::vector<double> w;
                    for (std::size_t j = 0; j < p; ++j) w.push_back(x[(k * p + j) * c + ch]);
                    std::sort(w.rbegin(), w.rend());
                    if (w.size() > 1 && w[0] - w[1] < margin) return false;
                }
            }
        }
    }
    return true;
}

// Central differences with step h on every parameter and input value.
inline CheckResult check(const Model<double>& model, const std::vector<double>& x, double h = 1e-4) {
    Workspace<double> ws;
    forward(model, std::span<const double>(x), ws);
    Gradients<double> g = zero_gradients(model);
    std::vector<double> dx;
    backward(model, ws, 1.0, g, &dx);

    CheckResult r;
    Model<double> m = model;
    auto eval = [&]() { return predict_raw(m, std::span<const double>(x)); };
    for (std::size_t li = 0; li < m.params.size(); ++li) {
        for (int which = 0; which < 2; ++which) {
            auto& t = which == 0 ? m.params[li].weights.data : m.params[li].bias.data;
            const auto& ga = which == 0 ? g[li].weights.data : g[li].bias.data;
            for (std::size_t i = 0; i < t.size(); ++i) {
                const double keep = t[i];
                t[i] = keep + h;
                const double up = eval();
                t[i] = keep - h;
                const double dn = eval();
                t[i] = keep;
                r.max_rel_error = std::max(r.max_rel_error, rel_error(ga[i], (up - dn) / (2 * h)));
                ++r.checked;
            }
        }
    }
    std::vector<double> xp = x;
    for (std::size_t i = 0; i < xp.size(); ++i) {
        const double keep = xp[i];
        xp[i] = keep + h;
        const double up = predict_raw(model, std::span<const double>(xp));
        xp[i] = keep - h;
        const double dn = predict_raw(model, std::span<const double>(xp));
        xp[i] = keep;
        r.max_rel_error = std::max(r.max_rel_error, rel_error(dx[i], (up - dn) / (2 * h)));
        ++r.checked;
    }
    return r;
}

// Random model of the given kind with parameters and input drawn from
// `seed`, redrawn until no unit sits within `margin` of a kink.
inline std::pair<Model<double>, std::vector<double>> random_case(LayerKind kind, std::uint64_t seed,
                                                                 double margin = 1e-2) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(derive_seed(seed, {attempt}));
        const ModelSpec spec = random_spec(kind, rng);
        Model<double> m = make_model<double>(spec);
        for (auto& p : m.params) {
            for (auto& v : p.weights.data) v = rng.uniform(-1, 1);
            for (auto& v : p.bias.data) v = rng.uniform(-0.5, 0.5);
        }
        std::vector<double> x(spec.input.size());
        for (auto& v : x) v = rng.uniform(-1, 1);
        Workspace<double> ws;
        forward(m, std::span<const double>(x), ws);
        if (clear_of_kinks(m, ws, margin)) {
            return {m, x};
        }
    }
}

inline const std::vector<LayerKind>& all_kinds() {
    static const std::vector<LayerKind> k = {LayerKind::conv1d, LayerKind::avg_pool, LayerKind::max_pool,
                                             LayerKind::dense,  LayerKind::relu,     LayerKind::linear_out};
    return k;
}

}  // namespace gradcheck
