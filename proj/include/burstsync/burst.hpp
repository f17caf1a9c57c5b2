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
#include <vector>

#include "burstsync/sigproc.hpp"

namespace burstsync {

// Waveform parameters shared by dataset synthesis and the expert estimators.
struct BurstSpec {
    int n_data_symbols = 256;
    std::vector<int> preamble_symbols;  // 64 symbols for timing, empty for cfo
    int modulation_order = 4;
    int sps = 4;
    double symbol_rate_hz = 100e3;
    double sample_rate_hz = 400e3;
    double beta = 0.25;
    int span_symbols = 6;

    void validate() const;
    sigproc::PulseShape pulse() const { return sigproc::rrc_taps(beta, span_symbols, sps); }
    // Samples of pulse-filter transient at each end: (taps - 1) / 2.
    int half_transient() const { return span_symbols * sps / 2; }
};

// Default preamble length and the fixed timing-network input length.
inline constexpr int kPreambleSymbols = 64;
inline constexpr int kTimingInputLen = 2048;
// Largest timing offset: 1.25 ms at 400 kHz.
inline constexpr int kMaxTimingPad = 500;
inline constexpr double kMaxCfoHz = 50e3;

// Preamble drawn once from a seeded stream; frozen per dataset.
std::vector<int> make_preamble(std::uint64_t seed, int n_symbols = kPreambleSymbols, int order = 4);

}  // namespace burstsync
