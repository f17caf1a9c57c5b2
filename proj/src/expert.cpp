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

#include "burstsync/expert.hpp"

#include <cmath>
#include <string>

namespace burstsync::expert {

void CfoExpertConfig::validate() const {
    if (m < 1) {
        throw std::invalid_argument("CfoExpertConfig: modulation order must be positive");
    }
    if (!sigproc::is_power_of_two(n_fft)) {
        throw std::invalid_argument("CfoExpertConfig: n_fft must be a power of two");
    }
    if (!(search_band_hz > 0.0)) {
        throw std::invalid_argument("CfoExpertConfig: search band must be positive");
    }
}

double CfoExpertConfig::resolution_hz(double sample_rate_hz) const {
    return sample_rate_hz / (static_cast<double>(m) * static_cast<double>(n_fft));
}

std::size_t fft_size_for_resolution(double sample_rate_hz, int m, double resolution_hz,
                                    std::size_t n_input) {
    std::size_t n = 1;
    while (n < n_input || sample_rate_hz / (m * static_cast<double>(n)) > resolution_hz) {
        n <<= 1;
    }
    return n;
}

CfoExpert::CfoExpert(CfoExpertConfig cfg) : cfg_(cfg), fft_((cfg.validate(), cfg.n_fft)) {}

double CfoExpert::estimate(const IqBuffer& x) const {
    if (x.empty()) {
        throw std::invalid_argument("cfo_estimate_expert: empty input");
    }
    const std::size_t n = cfg_.n_fft;
    if (x.size() > n) {
        throw std::invalid_argument("cfo_estimate_expert: input longer than n_fft (" +
                                    std::to_string(x.size()) + " > " + std::to_string(n) + ")");
    }
    std::vector<cdouble> buf(n, cdouble{});
    for (std::size_t k = 0; k < x.size(); ++k) {
        cdouble p = x.samples[k];
        cdouble acc = p;
        for (int i = 1; i < cfg_.m; ++i) {
            acc *= p;
        }
        buf[k] = acc;
    }
    fft_.transform(buf);

    const double bin_hz = x.sample_rate_hz / static_cast<double>(n);
    const double m = static_cast<double>(cfg_.m);
    double best_mag = 0.0;
    double best_f = 0.0;
    bool found = false;
    for (std::size_t j = 0; j < n; ++j) {
        const double signed_bin =
            j < n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
        const double f = signed_bin * bin_hz / m;
        if (std::abs(f) > cfg_.search_band_hz) {
            continue;
        }
        const double mag = std::norm(buf[j]);
        if (!found || mag > best_mag ||
            (mag == best_mag &&
             (std::abs(f) < std::abs(best_f) || (std::abs(f) == std::abs(best_f) && f < best_f)))) {
            best_mag = mag;
            best_f = f;
            found = true;
        }
    }
    if (!found || best_mag == 0.0) {
        throw DegenerateInputError("cfo_estimate_expert: no spectral peak (all-zero input?)");
    }
    return best_f;
}

double cfo_estimate_expert(const IqBuffer& x, const CfoExpertConfig& cfg) {
    return CfoExpert(cfg).estimate(x);
}

std::vector<cdouble> preamble_template(std::span<const int> preamble_symbols, const BurstSpec& spec) {
    if (preamble_symbols.empty()) {
        throw std::invalid_argument("preamble_template: empty preamble");
    }
    const IqBuffer shaped =
        sigproc::modulate_psk(preamble_symbols, spec.modulation_order, spec.pulse(), spec.sample_rate_hz);
    const std::size_t len = preamble_symbols.size() * static_cast<std::size_t>(spec.sps);
    return {shaped.samples.begin(), shaped.samples.begin() + static_cast<std::ptrdiff_t>(len)};
}

TimingExpert::TimingExpert(std::span<const int> preamble_symbols, const BurstSpec& spec)
    : template_(preamble_template(preamble_symbols, spec)) {}

std::size_t TimingExpert::estimate(const IqBuffer& x) const {
    if (template_.size() > x.size()) {
        throw std::invalid_argument("timing_estimate_expert: template longer than input");
    }
    const std::vector<double> corr = sigproc::cross_correlate(x, template_);
    std::size_t best = 0;
    for (std::size_t i = 1; i < corr.size(); ++i) {
        if (corr[i] > corr[best]) {
            best = i;
        }
    }
    return best;
}

std::size_t timing_estimate_expert(const IqBuffer& x, std::span<const int> preamble_symbols,
                                   const BurstSpec& spec) {
    return TimingExpert(preamble_symbols, spec).estimate(x);
}

}  // namespace burstsync::expert
