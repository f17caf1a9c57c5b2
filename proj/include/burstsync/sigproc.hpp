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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace burstsync {

using cdouble = std::complex<double>;

// Complex baseband samples plus their sample rate.
struct IqBuffer {
    std::vector<cdouble> samples;
    double sample_rate_hz = 1.0;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

namespace sigproc {

// Root-raised-cosine pulse, unit energy, odd length span*sps + 1.
struct PulseShape {
    double beta = 0.25;
    int span_symbols = 6;
    int samples_per_symbol = 4;
    std::vector<double> taps;
};

PulseShape rrc_taps(double beta, int span_symbols, int samples_per_symbol);

// Unnormalized closed-form RRC impulse response at t (in symbol periods),
// singular points resolved by their analytic limits.
double rrc_impulse(double t, double beta);

// Unit-magnitude PSK point for symbol index k: exp(j(2πk/m + π/m)).
cdouble psk_point(int k, int order);

// Maps symbols to PSK points, upsamples by zero insertion and filters with
// the pulse. The full convolution is kept, so the output has
// n_symbols * sps + taps - 1 samples; symbol n peaks at n * sps + (taps - 1) / 2.
IqBuffer modulate_psk(std::span<const int> symbols, int order, const PulseShape& pulse,
                      double sample_rate_hz);

// Iterative radix-2 FFT (decimation in time) with a precomputed bit-reversal
// permutation and twiddle table. Forward transform, no scaling.
class Fft {
public:
    explicit Fft(std::size_t n);

    std::size_t size() const { return n_; }
    void transform(std::span<cdouble> data) const;

private:
    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<cdouble> twiddle_;
};

bool is_power_of_two(std::size_t n);

// n_fft-point DFT of x zero-padded to n_fft. n_fft must be a power of two
// no smaller than x.
std::vector<cdouble> dft(std::span<const cdouble> x, std::size_t n_fft);

// |Σ_k conj(template[k]) x[τ + k]| for every valid lag τ.
std::vector<double> cross_correlate(const IqBuffer& x, std::span<const cdouble> tmpl);

}  // namespace sigproc
}  // namespace burstsync
