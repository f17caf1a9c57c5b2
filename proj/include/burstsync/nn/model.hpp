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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace burstsync::nn {

// Dense storage with an explicit shape; row-major.
template <class T>
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)), data(element_count(shape), T{}) {}

    static std::size_t element_count(const std::vector<std::size_t>& s) {
        std::size_t n = s.empty() ? 0 : 1;
        for (std::size_t d : s) {
            n *= d;
        }
        return n;
    }
    std::size_t size() const { return data.size(); }
};

enum class LayerKind : std::uint8_t { conv1d = 0, avg_pool = 1, max_pool = 2, dense = 3, relu = 4, linear_out = 5 };

std::string to_string(LayerKind k);

// Feature-map shape (length, channels). Dense outputs are (1, N_o).
struct Shape {
    std::size_t length = 0;
    std::size_t channels = 0;

    std::size_t size() const { return length * channels; }
    bool operator==(const Shape&) const = default;
};

struct LayerSpec {
    LayerKind kind = LayerKind::relu;
    int filter_len = 0;    // conv1d L
    int stride = 1;        // conv1d s
    int out_channels = 0;  // conv1d ch_o
    int pool = 0;          // avg/max pool p
    int out_features = 0;  // dense / linear_out N_o

    static LayerSpec conv(int filter_len, int stride, int out_channels);
    static LayerSpec avg_pool_layer(int p);
    static LayerSpec max_pool_layer(int p);
    static LayerSpec dense_layer(int n_out);
    static LayerSpec relu_layer();
    static LayerSpec linear_out_layer();

    bool has_params() const {
        return kind == LayerKind::conv1d || kind == LayerKind::dense || kind == LayerKind::linear_out;
    }
    bool operator==(const LayerSpec&) const = default;
};

// Valid-convolution output width floor((n - L) / s) + 1, or 0 if L > n.
std::size_t conv_output_width(std::size_t n_in, int filter_len, int stride);

enum class InputNorm : std::uint8_t { none = 0, rms = 1 };

struct ModelSpec {
    Shape input{0, 2};
    std::vector<LayerSpec> layers;
    InputNorm input_norm = InputNorm::rms;
    // Physical label = network output * label_scale.
    double label_scale = 1.0;

    bool operator==(const ModelSpec&) const = default;
};

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input and output shape of every layer; throws ShapeError if the chain
// breaks or the final output is not a scalar.
struct ResolvedLayer {
    Shape in;
    Shape out;
};
std::vector<ResolvedLayer> resolve_shapes(const ModelSpec& spec);
// Same chain check without the scalar-output requirement.
std::vector<ResolvedLayer> resolve_chain(const ModelSpec& spec);

enum class Arch : std::uint8_t { cfo = 0, timing = 1 };
std::string to_string(Arch a);
Arch parse_arch(const std::string& s);

struct ConvHyper {
    int filter_len = 0;
    int stride = 1;
    bool operator==(const ConvHyper&) const = default;
};

// Tunable filter / stride / pool choices. For cfo: three convs plus the
// average-pool size. For timing: four convs and an optional max-pool size
// per stage (0 or 1 = no pooling).
struct ArchHyper {
    std::vector<ConvHyper> convs;
    int avg_pool = 2;
    std::vector<int> max_pool;
};

inline constexpr int kTimingStageWidths[4] = {511, 126, 30, 2};
inline constexpr int kTimingStageChannels[4] = {32, 64, 128, 256};
inline constexpr int kCfoChannels[3] = {32, 128, 256};

ArchHyper default_hyper(Arch arch, std::size_t nsamp);
// cfo: nsamp in {32, ..., 1024}; timing: nsamp must be 2048.
ModelSpec build_model(Arch arch, std::size_t nsamp, const std::optional<ArchHyper>& hyper = std::nullopt);

// Learned parameters; weights/biases are empty for parameter-free layers.
// Conv weights are (L * ch_i, ch_o) with row index l * ch_i + c.
// Dense weights are (N_i, N_o) with N_i the flattened (length, channels) input.
template <class T>
struct LayerParams {
    Tensor<T> weights;
    Tensor<T> bias;
};

template <class T>
struct Model {
    ModelSpec spec;
    std::vector<LayerParams<T>> params;
    // Bumped on every parameter update; forward caches record it.
    std::uint64_t version = 0;

    std::size_t parameter_count() const;
};

// Zero-initialized parameters with the right shapes.
template <class T>
Model<T> make_model(const ModelSpec& spec);

// Fan-in scaled uniform weights (He for hidden layers, LeCun for the
// output layer) and zero biases, drawn from `seed`.
template <class T>
Model<T> init_model(const ModelSpec& spec, std::uint64_t seed);

template <class To, class From>
Model<To> convert_model(const Model<From>& m);

class NonFiniteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class StaleCacheError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Reusable activation and scratch storage for one forward/backward pass.
template <class T>
struct Workspace {
    std::vector<std::vector<T>> acts;        // acts[i] is the input of layer i; acts.back() is the output
    std::vector<std::vector<std::uint32_t>> argmax;  // max-pool routing
    std::vector<std::vector<T>> grads;       // scratch for d(loss)/d(act)
    std::vector<std::vector<T>> wt;          // transposed conv weights for input gradients
    std::uint64_t wt_version = ~std::uint64_t{0};
    std::uint64_t cache_version = ~std::uint64_t{0};
    bool valid = false;
};

template <class T>
using Gradients = std::vector<LayerParams<T>>;

template <class T>
Gradients<T> zero_gradients(const Model<T>& m);
template <class T>
void clear_gradients(Gradients<T>& g);

// Forward pass; activations are kept in `ws` for backward. Throws
// ShapeError on an input size mismatch and NonFiniteError if any
// activation is NaN or infinite.
template <class T>
T forward(const Model<T>& m, std::span<const T> x, Workspace<T>& ws);

// Accumulates d(loss)/d(params) into `grads` given d(loss)/d(prediction).
// If `dinput` is non-null it receives d(loss)/d(input).
template <class T>
void backward(const Model<T>& m, Workspace<T>& ws, T dpred, Gradients<T>& grads,
              std::vector<T>* dinput = nullptr);

// Cache-free forward; safe to call concurrently on a frozen model.
template <class T>
T predict_raw(const Model<T>& m, std::span<const T> x);

}  // namespace burstsync::nn
