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

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "burstsync/datasets.hpp"
#include "burstsync/nn/loss.hpp"
#include "burstsync/nn/model.hpp"

namespace burstsync::nn {

struct TrainConfig {
    Loss loss = Loss::mse;
    double lr_init = 1e-3;
    int epochs = 100;
    int plateau_patience = 10;
    double lr_factor = 0.5;
    std::size_t batch_size = 256;
    std::uint64_t seed = 1;
    // Data-parallel workers. The per-batch gradient is reduced in worker
    // order, so results depend on this value but are reproducible for it.
    int threads = 1;

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

struct EpochRecord {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double lr = 0.0;  // rate used during this epoch
};

// Network-ready examples: inputs laid out (length, 2) with I in channel 0,
// labels divided by the model's label_scale.
template <class T>
struct RegressionSet {
    std::size_t input_size = 0;
    std::vector<T> x;
    std::vector<double> y;

    std::size_t size() const { return y.size(); }
    std::span<const T> input(std::size_t i) const { return {x.data() + i * input_size, input_size}; }
};

// Interleaves I/Q into (length, 2) and applies the input normalization.
template <class T>
void prepare_input(const IqBuffer& iq, InputNorm norm, std::span<T> out);

template <class T>
RegressionSet<T> make_regression_set(const std::vector<datasets::LabeledExample>& examples, const ModelSpec& spec);

// Aborts training when a loss or activation becomes non-finite.
class TrainingFault : public std::runtime_error {
public:
    TrainingFault(const std::string& what, int epoch, std::size_t batch, double lr)
        : std::runtime_error(what), epoch(epoch), batch(batch), lr(lr) {}
    int epoch;
    std::size_t batch;
    double lr;
};

template <class T>
struct TrainResult {
    Model<T> best;
    int best_epoch = 0;
    double best_val_loss = 0.0;
    std::vector<EpochRecord> history;
};

// Mean loss over a set, in normalized label units.
template <class T>
double mean_loss(const Model<T>& m, const RegressionSet<T>& set, Loss loss, int threads = 1);

// Trains from a fresh initialization seeded by cfg.seed.
template <class T>
TrainResult<T> train(const ModelSpec& spec, const RegressionSet<T>& train_set, const RegressionSet<T>& val_set,
                     const TrainConfig& cfg, const std::function<void(const EpochRecord&)>& on_epoch = {});

// Continues from the given parameters.
template <class T>
TrainResult<T> train_from(Model<T> model, const RegressionSet<T>& train_set, const RegressionSet<T>& val_set,
                          const TrainConfig& cfg, const std::function<void(const EpochRecord&)>& on_epoch = {});

// Network outputs for every example of a set, in normalized units.
template <class T>
std::vector<double> predict_set(const Model<T>& m, const RegressionSet<T>& set, int threads = 1);

// Physical-unit estimate for one buffer.
template <class T>
double predict(const Model<T>& m, const IqBuffer& iq);

}  // namespace burstsync::nn
