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

#include "burstsync/sigproc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace burstsync::sigproc {

namespace {
constexpr double pi = std::numbers::pi;
}

double rrc_impulse(double t, double beta) {
    if (t == 0.0) {
        return 1.0 - beta + 4.0 * beta / pi;
    }
    if (beta > 0.0 && std::abs(std::abs(t) * 4.0 * beta - 1.0) < 1e-12) {
        const double a = pi / (4.0 * beta);
        return beta / std::numbers::sqrt2 *
               ((1.0 + 2.0 / pi) * std::sin(a) + (1.0 - 2.0 / pi) * std::cos(a));
    }
    const double x = 4.0 * beta * t;
    return (std::sin(pi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(pi * t * (1.0 + beta))) /
           (pi * t * (1.0 - x * x));
}

PulseShape rrc_taps(double beta, int span_symbols, int samples_per_symbol) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw std::invalid_argument("rrc_taps: roll-off must lie in [0, 1]");
    }
    if (span_symbols < 1 || samples_per_symbol < 1) {
        throw std::invalid_argument("rrc_taps: span and samples per symbol must be positive");
    }
    PulseShape p;
    p.beta = beta;
    p.span_symbols = span_symbols;
    p.samples_per_symbol = samples_per_symbol;
    const int n = span_symbols * samples_per_symbol + 1;
    const int half = n / 2;
    p.taps.resize(static_cast<std::size_t>(n));
    // Evaluate one side and mirror so symmetry is exact.
    for (int i = 0; i <= half; ++i) {
        const double t = static_cast<double>(i - half) / samples_per_symbol;
        const double v = rrc_impulse(t, beta);
        p.taps[static_cast<std::size_t>(i)] = v;
        p.taps[static_cast<std::size_t>(n - 1 - i)] = v;
    }
    double energy = 0.0;
    for (double v : p.taps) {
        energy += v * v;
    }
    const double scale = 1.0 / std::sqrt(energy);
    for (double& v : p.taps) {
        v *= scale;
    }
    return p;
}

cdouble psk_point(int k, int order) {
    const double phase = 2.0 * pi * k / order + pi / order;
    return std::polar(1.0, phase);
}

IqBuffer modulate_psk(std::span<const int> symbols, int order, const PulseShape& pulse,
                      double sample_rate_hz) {
    if (order != 2 && order != 4 && order != 8) {
        throw std::invalid_argument("modulate_psk: order must be 2, 4 or 8");
    }
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
        throw std::invalid_argument("modulate_psk: sample rate must be finite and positive");
    }
    if (pulse.taps.empty()) {
        throw std::invalid_argument("modulate_psk: empty pulse");
    }
    const auto sps = static_cast<std::size_t>(pulse.samples_per_symbol);
    const std::size_t ntaps = pulse.taps.size();
    IqBuffer out;
    out.sample_rate_hz = sample_rate_hz;
    if (symbols.empty()) {
        return out;
    }
    out.samples.assign(symbols.size() * sps + ntaps - 1, cdouble{});
    for (std::size_t n = 0; n < symbols.size(); ++n) {
        const int k = symbols[n];
        if (k < 0 || k >= order) {
            throw std::invalid_argument("modulate_psk: symbol index " + std::to_string(k) +
                                        " out of range");
        }
        const cdouble a = psk_point(k, order);
        cdouble* dst = out.samples.data() + n * sps;
        for (std::size_t i = 0; i < ntaps; ++i) {
            dst[i] += a * pulse.taps[i];
        }
    }
    return out;
}

bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

Fft::Fft(std::size_t n) : n_(n) {
    if (!is_power_of_two(n)) {
        throw std::invalid_argument("Fft: size must be a power of two, got " + std::to_string(n));
    }
    int bits = 0;
    while ((std::size_t{1} << bits) < n) {
        ++bits;
    }
    bitrev_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (int b = 0; b < bits; ++b) {
            r |= ((i >> b) & 1U) << (bits - 1 - b);
        }
        bitrev_[i] = r;
    }
    twiddle_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        twiddle_[k] = std::polar(1.0, -2.0 * pi * static_cast<double>(k) / static_cast<double>(n));
    }
}

void Fft::transform(std::span<cdouble> data) const {
    if (data.size() != n_) {
        throw std::invalid_argument("Fft::transform: buffer size does not match plan");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t r = bitrev_[i];
        if (i < r) {
            std::swap(data[i], data[r]);
        }
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t step = n_ / len;
        for (std::size_t start = 0; start < n_; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                const cdouble w = twiddle_[j * step];
                const cdouble u = data[start + j];
                const cdouble v = data[start + j + half] * w;
                data[start + j] = u + v;
                data[start + j + half] = u - v;
            }
        }
    }
}

std::vector<cdouble> dft(std::span<const cdouble> x, std::size_t n_fft) {
    if (!is_power_of_two(n_fft)) {
        throw std::invalid_argument("dft: n_fft must be a power of two");
    }
    if (n_fft < x.size()) {
        throw std::invalid_argument("dft: n_fft smaller than the input");
    }
    std::vector<cdouble> buf(n_fft, cdouble{});
    std::copy(x.begin(), x.end(), buf.begin());
    Fft(n_fft).transform(buf);
    return buf;
}

std::vector<double> cross_correlate(const IqBuffer& x, std::span<const cdouble> tmpl) {
    if (tmpl.empty()) {
        throw std::invalid_argument("cross_correlate: empty template");
    }
    if (tmpl.size() > x.size()) {
        throw std::invalid_argument("cross_correlate: template longer than signal");
    }
    const std::size_t lags = x.size() - tmpl.size() + 1;
    std::vector<cdouble> conj_t(tmpl.size());
    for (std::size_t k = 0; k < tmpl.size(); ++k) {
        conj_t[k] = std::conj(tmpl[k]);
    }
    std::vector<double> out(lags);
    for (std::size_t tau = 0; tau < lags; ++tau) {
        const cdouble* xs = x.samples.data() + tau;
        double re = 0.0;
        double im = 0.0;
        for (std::size_t k = 0; k < conj_t.size(); ++k) {
            const cdouble a = conj_t[k];
            const cdouble b = xs[k];
            re += a.real() * b.real() - a.imag() * b.imag();
            im += a.real() * b.imag() + a.imag() * b.real();
        }
        out[tau] = std::hypot(re, im);
    }
    return out;
}

}  // namespace burstsync::sigproc
