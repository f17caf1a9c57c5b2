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
#include <cstdint>
#include <initializer_list>
#include <random>

namespace burstsync {

// Seeded generator handle threaded through every stochastic operation.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The distributions are implemented here rather than taken from
// <random> because the library distributions are implementation-defined,
// which would break dataset regeneration across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform();
    // Uniform on [lo, hi).
    double uniform(double lo, double hi);
    // Uniform integer on [lo, hi] inclusive; rejection sampling, no modulo bias.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    // Standard normal.
    double normal();
    // Circularly-symmetric complex Gaussian with E|z|^2 = 1.
    std::complex<double> complex_normal();

private:
    std::mt19937_64 engine_;
};

// splitmix64 finalizer; good avalanche, used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent stream seed from a base seed and a list of tags.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

// Bit pattern of a double, for use as a seed tag.
std::uint64_t double_bits(double v);

}  // namespace burstsync
