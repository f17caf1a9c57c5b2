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
#include <string>
#include <vector>

#include "burstsync/nn/model.hpp"

namespace burstsync::complexity {

struct OpCount {
    std::uint64_t multiplies = 0;
    std::uint64_t adds = 0;

    std::uint64_t total() const { return multiplies + adds; }
    OpCount& operator+=(const OpCount& o) {
        multiplies += o.multiplies;
        adds += o.adds;
        return *this;
    }
    bool operator==(const OpCount&) const = default;
};

// A named line of a cost breakdown.
struct CostLine {
    std::string name;
    OpCount ops;
};

struct CostReport {
    OpCount total;
    std::vector<CostLine> lines;
};

// Per-layer cost from the input shape:
//   conv1d   mul L*ch_i*ch_o*K        add L*(ch_i+1)*ch_o*K
//   dense    mul N_i*N_o              add (N_i+1)*N_o
//   avg pool add N_o*p  (N_o counted over all output values)
//   relu and max pool are comparisons and cost nothing.
OpCount layer_flops(const nn::LayerSpec& layer, nn::Shape input);

// Sum over layers with one line per layer. Empty models cost 0.
CostReport model_flops(const nn::ModelSpec& spec);

enum class CfoConvention {
    // FFT 5N log2 N, (m-1) complex multiplies per input sample,
    // 2 mul + 1 add per searched bin for magnitude and argmax.
    itemized,
    // FFT 5N log2 N plus 2 flops per bin.
    fft_plus_bins,
};

enum class TimingConvention {
    // Valid lags (n - t + 1), 4 mul + 2 add per complex MAC, magnitude 2 mul + 1 add per lag.
    valid_lags,
    // All n lags, multiplies only, 3 flops per lag for magnitude.
    full_lags_mul_only,
};

CostReport expert_cfo_flops(std::size_t n_input, std::size_t n_fft, int m, CfoConvention conv = CfoConvention::itemized,
                            double sample_rate_hz = 400e3, double search_band_hz = 50e3);

CostReport expert_timing_flops(std::size_t n_samples, std::size_t template_len,
                               TimingConvention conv = TimingConvention::valid_lags);

// Aligned text table and CSV (layer,mul,add,total), both ending in a total row.
std::string format_table(const CostReport& r, const std::string& title);
std::string format_csv(const CostReport& r);

}  // namespace burstsync::complexity
