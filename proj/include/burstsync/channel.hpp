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
#include <limits>
#include <string>
#include <vector>

#include "burstsync/random.hpp"
#include "burstsync/sigproc.hpp"

namespace burstsync::channel {

enum class FadingKind : std::uint8_t { awgn = 0, rayleigh = 1 };

// Impairment recipe for one dataset cell.
struct ChannelConfig {
    // Per-sample SNR in dB, referenced to the data-bearing portion.
    // +infinity disables noise.
    double snr_db = std::numeric_limits<double>::infinity();
    FadingKind fading = FadingKind::awgn;
    // Mean delay spread in samples, only meaningful for rayleigh.
    double sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    bool noiseless() const { return snr_db == std::numeric_limits<double>::infinity(); }
};

ChannelConfig awgn(double snr_db);
ChannelConfig rayleigh(double sigma, double snr_db);

// File-name token: "awgn", "fading_0.5", "fading_1", "fading_2".
std::string channel_name(const ChannelConfig& c);
// Inverse of channel_name; snr is left at its default.
ChannelConfig parse_channel_name(const std::string& name);

// One quasi-static multipath draw. `profile` is the normalized exponential
// power-delay profile (sums to 1); `taps` are the random complex gains whose
// expected total power is 1.
struct FadingRealization {
    std::vector<cdouble> taps;
    std::vector<double> profile;
    double sigma = 0.0;
};

// Number of lags for the exponential profile: ceil(8 sigma) + 1, with
// trailing lags whose power underflows to zero dropped.
std::size_t rayleigh_tap_count(double sigma);
std::vector<double> exponential_profile(double sigma);

IqBuffer apply_cfo(const IqBuffer& x, double offset_hz);
IqBuffer apply_phase(const IqBuffer& x, double phi);

// Mean power of samples[begin, end).
double mean_power(const IqBuffer& x, std::size_t begin, std::size_t end);

// Adds complex AWGN with variance reference_power / 10^(snr/10) to every sample.
IqBuffer awgn_with_reference(const IqBuffer& x, double snr_db, double reference_power, Rng& rng);
// As above, with the reference power measured over the whole buffer.
IqBuffer awgn(const IqBuffer& x, double snr_db, Rng& rng);

FadingRealization rayleigh_taps(double sigma, Rng& rng);

// Causal convolution truncated to the input length:
// out[k] = Σ_l h[l] x[k - l].
IqBuffer apply_channel(const IqBuffer& x, const FadingRealization& h);

}  // namespace burstsync::channel
