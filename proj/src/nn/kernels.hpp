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

namespace burstsync::nn::kernels {

// C[m][n] += Σ_k A[m * a_rs + k * a_cs] * B[k * ldb + n]
// for m < M, n < N, k < K. Rows of C may overlap (ldc < N); they are
// accumulated in row order.
template <class T>
void gemm_acc(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t a_rs,
              std::size_t a_cs, const T* B, std::size_t ldb, T* C, std::size_t ldc);

}  // namespace burstsync::nn::kernels
