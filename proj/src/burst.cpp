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

#include "burstsync/burst.hpp"

#include <stdexcept>

#include "burstsync/random.hpp"

namespace burstsync {

void BurstSpec::validate() const {
    if (sps < 1 || span_symbols < 1) {
        throw std::invalid_argument("BurstSpec: sps and span must be positive");
    }
    if (!(symbol_rate_hz > 0.0) || sample_rate_hz != sps * symbol_rate_hz) {
        throw std::invalid_argument("BurstSpec: sample rate must equal sps * symbol rate");
    }
    if (modulation_order != 2 && modulation_order != 4 && modulation_order != 8) {
        throw std::invalid_argument("BurstSpec: modulation order must be 2, 4 or 8");
    }
    if (n_data_symbols < 0) {
        throw std::invalid_argument("BurstSpec: negative data symbol count");
    }
    for (int s : preamble_symbols) {
        if (s < 0 || s >= modulation_order) {
            throw std::invalid_argument("BurstSpec: preamble symbol out of range");
        }
    }
}

std::vector<int> make_preamble(std::uint64_t seed, int n_symbols, int order) {
    Rng rng(derive_seed(seed, {0x7072'6561'6d62'6c65ULL}));
    std::vector<int> out(static_cast<std::size_t>(n_symbols));
    for (int& s : out) {
        s = static_cast<int>(rng.uniform_int(0, order - 1));
    }
    return out;
}

}  // namespace burstsync
