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
#include <string>
#include <vector>

#include "burstsync/burst.hpp"
#include "burstsync/channel.hpp"
#include "burstsync/random.hpp"

namespace burstsync::datasets {

enum class Task : std::uint8_t { cfo = 0, timing = 1 };
enum class Split : std::uint8_t { train = 0, val = 1, test = 2 };

std::string to_string(Task t);
std::string to_string(Split s);
Task parse_task(const std::string& s);

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr const char* kGeneratorVersion = "burstsync-1.0.0";
// Power-delay-profile tag recorded in headers: exponential, ceil(8 sigma)+1 lags.
inline constexpr std::uint8_t kPdpNone = 0;
inline constexpr std::uint8_t kPdpExponential = 1;

// Nuisance values drawn for one example.
struct ExampleMeta {
    double phase_rad = 0.0;
    double cfo_hz = 0.0;
    std::uint32_t pad_samples = 0;
    std::uint32_t fading_taps = 0;
    // Seed of the generator that produced this example; regenerating from it
    // reproduces the example bit-for-bit.
    std::uint64_t example_seed = 0;

    bool operator==(const ExampleMeta&) const = default;
};

struct LabeledExample {
    IqBuffer iq;
    // Hz for the cfo task, samples for the timing task.
    double label = 0.0;
    ExampleMeta meta;
};

struct DatasetHeader {
    Task task = Task::cfo;
    Split split = Split::train;
    channel::ChannelConfig channel;
    std::uint8_t pdp_model = kPdpNone;
    std::uint32_t block_len = 0;
    std::uint64_t example_count = 0;
    std::uint64_t global_seed = 0;
    BurstSpec burst;
    std::uint32_t format_version = kFormatVersion;
    std::string generator_version = kGeneratorVersion;

    void validate() const;
};

struct Dataset {
    DatasetHeader header;
    std::vector<LabeledExample> examples;
};

BurstSpec cfo_burst_spec();
// Timing bursts carry a 64-symbol preamble drawn from preamble_seed and
// 256 data symbols.
BurstSpec timing_burst_spec(std::uint64_t preamble_seed);

// Data symbols synthesized for a cfo example of the given block length.
int cfo_burst_symbols(const BurstSpec& spec, std::size_t block_len);

LabeledExample gen_cfo_example(const BurstSpec& spec, const channel::ChannelConfig& chan,
                               std::size_t block_len, Rng& rng);
LabeledExample gen_timing_example(const BurstSpec& spec, const channel::ChannelConfig& chan, Rng& rng);

// Seed for example `index` of the cell described by the header. Distinct
// (task, block, channel, snr, split, index) tuples give independent streams.
std::uint64_t example_seed(const DatasetHeader& h, std::uint64_t index);
LabeledExample generate_example(const DatasetHeader& h, std::uint64_t index);
Dataset generate_cell(const DatasetHeader& h, int threads = 1);

std::string cell_file_name(Task task, std::uint32_t block_len, const channel::ChannelConfig& chan,
                           Split split);
// "0", "5", "10", "7.5"; "inf" for noiseless.
std::string snr_token(double snr_db);

struct GridConfig {
    Task task = Task::cfo;
    std::vector<std::uint32_t> block_lens = {32, 64, 128, 256, 512, 1024};
    std::vector<double> snrs = {0.0, 5.0, 10.0};
    std::vector<channel::ChannelConfig> channels = {
        channel::awgn(0.0), channel::rayleigh(0.5, 0.0), channel::rayleigh(1.0, 0.0),
        channel::rayleigh(2.0, 0.0)};
    std::uint64_t n_train = 20000;
    std::uint64_t n_val = 2000;
    std::uint64_t n_test = 2000;
    std::uint64_t seed = 1;
    bool force = false;
    int threads = 1;
};

// Header for one grid cell (the channel's snr is taken from `snr_db`).
DatasetHeader cell_header(const GridConfig& g, std::uint32_t block_len,
                          const channel::ChannelConfig& chan, double snr_db, Split split);

class OverwriteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Writes one file per (block_len, channel, snr, split) cell into out_dir.
// Throws OverwriteError if any target exists and force is off; nothing is
// written in that case.
std::vector<std::filesystem::path> generate_grid(const GridConfig& g,
                                                 const std::filesystem::path& out_dir);

}  // namespace burstsync::datasets
