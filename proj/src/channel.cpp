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

#include "burstsync/channel.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace burstsync::channel {

void ChannelConfig::validate() const {
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
        throw std::invalid_argument("ChannelConfig: snr_db must be finite or +inf (noiseless)");
    }
    if (fading == FadingKind::rayleigh && !(sigma > 0.0 && std::isfinite(sigma))) {
        throw std::invalid_argument("ChannelConfig: rayleigh fading needs sigma > 0");
    }
}

ChannelConfig awgn(double snr_db) {
    ChannelConfig c;
    c.snr_db = snr_db;
    return c;
}

ChannelConfig rayleigh(double sigma, double snr_db) {
    ChannelConfig c;
    c.snr_db = snr_db;
    c.fading = FadingKind::rayleigh;
    c.sigma = sigma;
    return c;
}

namespace {
std::string shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}
}  // namespace

std::string channel_name(const ChannelConfig& c) {
    if (c.fading == FadingKind::awgn) {
        return "awgn";
    }
    return "fading_" + shortest(c.sigma);
}

ChannelConfig parse_channel_name(const std::string& name) {
    if (name == "awgn") {
        return ChannelConfig{};
    }
    const std::string prefix = "fading_";
    if (name.rfind(prefix, 0) == 0) {
        double sigma = 0.0;
        const char* first = name.data() + prefix.size();
        const char* last = name.data() + name.size();
        auto res = std::from_chars(first, last, sigma);
        if (res.ec == std::errc{} && res.ptr == last && sigma > 0.0) {
            ChannelConfig c;
            c.fading = FadingKind::rayleigh;
            c.sigma = sigma;
            return c;
        }
    }
    throw std::invalid_argument("unknown channel '" + name + "' (expected awgn or fading_<sigma>)");
}

std::size_t rayleigh_tap_count(double sigma) {
    return exponential_profile(sigma).size();
}

std::vector<double> exponential_profile(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("rayleigh: mean delay spread must be positive");
    }
    const auto n = static_cast<std::size_t>(std::ceil(8.0 * sigma)) + 1;
    std::vector<double> p;
    p.reserve(n);
    for (std::size_t l = 0; l < n; ++l) {
        const double v = std::exp(-static_cast<double>(l) / sigma);
        if (v == 0.0) {
            break;
        }
        p.push_back(v);
    }
    double total = 0.0;
    for (double v : p) {
        total += v;
    }
    for (double& v : p) {
        v /= total;
    }
    return p;
}

IqBuffer apply_cfo(const IqBuffer& x, double offset_hz) {
    if (!(std::abs(offset_hz) < x.sample_rate_hz / 2.0)) {
        throw std::invalid_argument("apply_cfo: offset must lie strictly inside ±Nyquist");
    }
    IqBuffer out = x;
    if (offset_hz == 0.0) {
        return out;
    }
    const double w = 2.0 * std::numbers::pi * offset_hz / x.sample_rate_hz;
    for (std::size_t k = 0; k < out.samples.size(); ++k) {
        // Phase is computed per sample rather than by recursive rotation so
        // that composition holds to rounding error at every index.
        out.samples[k] *= std::polar(1.0, w * static_cast<double>(k));
    }
    return out;
}

IqBuffer apply_phase(const IqBuffer& x, double phi) {
    IqBuffer out = x;
    if (phi == 0.0) {
        return out;
    }
    const cdouble rot = std::polar(1.0, phi);
    for (auto& s : out.samples) {
        s *= rot;
    }
    return out;
}

double mean_power(const IqBuffer& x, std::size_t begin, std::size_t end) {
    if (begin >= end || end > x.samples.size()) {
        throw std::invalid_argument("mean_power: empty or out-of-range window");
    }
    double acc = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
        acc += std::norm(x.samples[k]);
    }
    return acc / static_cast<double>(end - begin);
}

IqBuffer awgn_with_reference(const IqBuffer& x, double snr_db, double reference_power, Rng& rng) {
    if (x.empty()) {
        throw std::invalid_argument("awgn: empty input");
    }
    IqBuffer out = x;
    if (snr_db == std::numeric_limits<double>::infinity()) {
        return out;
    }
    const double noise_power = reference_power / std::pow(10.0, snr_db / 10.0);
    const double scale = std::sqrt(noise_power);
    for (auto& s : out.samples) {
        s += scale * rng.complex_normal();
    }
    return out;
}

IqBuffer awgn(const IqBuffer& x, double snr_db, Rng& rng) {
    if (x.empty()) {
        throw std::invalid_argument("awgn: empty input");
    }
    return awgn_with_reference(x, snr_db, mean_power(x, 0, x.size()), rng);
}

FadingRealization rayleigh_taps(double sigma, Rng& rng) {
    FadingRealization h;
    h.sigma = sigma;
    h.profile = exponential_profile(sigma);
    h.taps.resize(h.profile.size());
    for (std::size_t l = 0; l < h.taps.size(); ++l) {
        h.taps[l] = std::sqrt(h.profile[l]) * rng.complex_normal();
    }
    return h;
}

IqBuffer apply_channel(const IqBuffer& x, const FadingRealization& h) {
    if (x.empty()) {
        throw std::invalid_argument("apply_channel: empty input");
    }
    if (h.taps.empty()) {
        throw std::invalid_argument("apply_channel: empty channel");
    }
    IqBuffer out;
    out.sample_rate_hz = x.sample_rate_hz;
    out.samples.assign(x.size(), cdouble{});
    for (std::size_t k = 0; k < x.size(); ++k) {
        cdouble acc{};
        const std::size_t lmax = std::min(h.taps.size() - 1, k);
        for (std::size_t l = 0; l <= lmax; ++l) {
            acc += h.taps[l] * x.samples[k - l];
        }
        out.samples[k] = acc;
    }
    return out;
}

}  // namespace burstsync::channel
