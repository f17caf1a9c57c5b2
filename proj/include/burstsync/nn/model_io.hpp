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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "burstsync/nn/model.hpp"
#include "burstsync/nn/train.hpp"

namespace burstsync::nn {

// Binary model format, little-endian.
//
//   "CEM1", u32 format version, u8 element bytes (4 or 8)
//   spec:     u32 input length, u32 input channels, u8 input norm,
//             f64 label scale, u32 layer count, then per layer
//             u8 kind and i32 filter_len, stride, out_channels, pool, out_features
//   training: u8 loss, f64 lr_init, i32 epochs, i32 patience, f64 lr_factor,
//             u64 batch size, u64 seed, i32 threads, i32 best epoch,
//             f64 best validation loss, then the dataset cell:
//             str task, str channel, f64 snr_db, u32 block_len,
//             u64 dataset seed, str generator version, u64 train count
//   params:   per layer u64 weight count, weights, u64 bias count, biases
//   u32 CRC-32 of all preceding bytes
//
// str is a u32 byte length followed by the bytes.
inline constexpr char kModelMagic[4] = {'C', 'E', 'M', '1'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

struct DatasetCell {
    std::string task;
    std::string channel;
    double snr_db = 0.0;
    std::uint32_t block_len = 0;
    std::uint64_t seed = 0;
    std::string generator_version;
    std::uint64_t train_count = 0;
    bool operator==(const DatasetCell&) const = default;
};

struct TrainingHeader {
    TrainConfig config;
    int best_epoch = 0;
    double best_val_loss = 0.0;
    DatasetCell cell;
    bool operator==(const TrainingHeader&) const = default;
};

class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class ModelVersionError : public ModelFormatError {
public:
    using ModelFormatError::ModelFormatError;
};

template <class T>
struct SavedModel {
    Model<T> model;
    TrainingHeader training;
};

template <class T>
std::vector<std::uint8_t> encode_model(const Model<T>& m, const TrainingHeader& h);
// Throws ModelFormatError on bad magic, checksum, truncation, element
// precision or parameter-shape mismatch; ModelVersionError on version.
template <class T>
SavedModel<T> decode_model(const std::vector<std::uint8_t>& bytes);

template <class T>
void save_model(const std::filesystem::path& path, const Model<T>& m, const TrainingHeader& h);
template <class T>
SavedModel<T> load_model(const std::filesystem::path& path);

}  // namespace burstsync::nn
