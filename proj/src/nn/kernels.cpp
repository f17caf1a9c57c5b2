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

#include "kernels.hpp"

namespace burstsync::nn::kernels {

namespace {

// Register tile: MR rows of C by NR columns, accumulated over the whole
// reduction before touching memory.
template <class T, int MR, int NR>
inline void tile(std::size_t K, const T* A, std::size_t a_rs, std::size_t a_cs, const T* B,
                 std::size_t ldb, T* C, std::size_t ldc) {
    T acc[MR][NR] = {};
    for (std::size_t k = 0; k < K; ++k) {
        const T* b = B + k * ldb;
        for (int r = 0; r < MR; ++r) {
            const T a = A[r * a_rs + k * a_cs];
            for (int n = 0; n < NR; ++n) {
                acc[r][n] += a * b[n];
            }
        }
    }
    for (int r = 0; r < MR; ++r) {
        T* c = C + r * ldc;
        for (int n = 0; n < NR; ++n) {
            c[n] += acc[r][n];
        }
    }
}

template <class T, int MR>
inline void tile_narrow(std::size_t width, std::size_t K, const T* A, std::size_t a_rs, std::size_t a_cs,
                        const T* B, std::size_t ldb, T* C, std::size_t ldc) {
    for (int r = 0; r < MR; ++r) {
        for (std::size_t n = 0; n < width; ++n) {
            T acc{};
            for (std::size_t k = 0; k < K; ++k) {
                acc += A[r * a_rs + k * a_cs] * B[k * ldb + n];
            }
            C[r * ldc + n] += acc;
        }
    }
}

template <class T, int MR>
void row_block(std::size_t N, std::size_t K, const T* A, std::size_t a_rs, std::size_t a_cs, const T* B,
               std::size_t ldb, T* C, std::size_t ldc) {
    constexpr int NR = 64 / static_cast<int>(sizeof(T)) * 2;  // two 512-bit vectors
    std::size_t n = 0;
    for (; n + NR <= N; n += NR) {
        tile<T, MR, NR>(K, A, a_rs, a_cs, B + n, ldb, C + n, ldc);
    }
    for (; n + NR / 2 <= N; n += NR / 2) {
        tile<T, MR, NR / 2>(K, A, a_rs, a_cs, B + n, ldb, C + n, ldc);
    }
    if (n < N) {
        tile_narrow<T, MR>(N - n, K, A, a_rs, a_cs, B + n, ldb, C + n, ldc);
    }
}

}  // namespace

template <class T>
void gemm_acc(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t a_rs, std::size_t a_cs,
              const T* B, std::size_t ldb, T* C, std::size_t ldc) {
    constexpr int MR = 4;
    std::size_t m = 0;
    for (; m + MR <= M; m += MR) {
        row_block<T, MR>(N, K, A + m * a_rs, a_rs, a_cs, B, ldb, C + m * ldc, ldc);
    }
    for (; m < M; ++m) {
        row_block<T, 1>(N, K, A + m * a_rs, a_rs, a_cs, B, ldb, C + m * ldc, ldc);
    }
}

template void gemm_acc<float>(std::size_t, std::size_t, std::size_t, const float*, std::size_t, std::size_t,
                              const float*, std::size_t, float*, std::size_t);
template void gemm_acc<double>(std::size_t, std::size_t, std::size_t, const double*, std::size_t, std::size_t,
                               const double*, std::size_t, double*, std::size_t);

}  // namespace burstsync::nn::kernels
