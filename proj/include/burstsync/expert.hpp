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
#include <stdexcept>
#include <vector>

#include "burstsync/burst.hpp"
#include "burstsync/sigproc.hpp"

namespace burstsync::expert {

// Thrown when the input carries no spectral peak (e.g. all zeros).
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CfoExpertConfig {
    int m = 4;
    // 2^17 gives F_s / (m n_fft) ≈ 0.76 Hz at 400 kHz.
    std::size_t n_fft = std::size_t{1} << 17;
    // Search restricted to [-band, +band] in the signal domain.
    double search_band_hz = 50e3;

    void validate() const;
    double resolution_hz(double sample_rate_hz) const;
};

// Smallest power-of-two FFT size reaching the requested signal-domain
// resolution and holding n_input samples.
std::size_t fft_size_for_resolution(double sample_rate_hz, int m, double resolution_hz,
                                    std::size_t n_input);

// m-th power periodogram CFO estimator. Holds its FFT plan, so repeated
// estimates at one size reuse the twiddle tables. Const methods are thread-safe.
class CfoExpert {
public:
    explicit CfoExpert(CfoExpertConfig cfg = {});

    const CfoExpertConfig& config() const { return cfg_; }
    double estimate(const IqBuffer& x) const;

private:
    CfoExpertConfig cfg_;
    sigproc::Fft fft_;
};

double cfo_estimate_expert(const IqBuffer& x, const CfoExpertConfig& cfg);

// Pulse-shaped preamble template: the first preamble_len * sps samples of
// the modulated preamble (starting with the filter ramp-up).
std::vector<cdouble> preamble_template(std::span<const int> preamble_symbols, const BurstSpec& spec);

// Matched-filter timing estimator; returns the lag maximizing |correlation|,
// smallest lag on ties.
class TimingExpert {
public:
    TimingExpert(std::span<const int> preamble_symbols, const BurstSpec& spec);

    std::size_t template_size() const { return template_.size(); }
    std::size_t estimate(const IqBuffer& x) const;

private:
    std::vector<cdouble> template_;
};

std::size_t timing_estimate_expert(const IqBuffer& x, std::span<const int> preamble_symbols,
                                   const BurstSpec& spec);

}  // namespace burstsync::expert
