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

#include "burstsync/nn/model.hpp"

namespace burstsync::nn {

template <class T>
struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t step = 0;
    Gradients<T> m;  // first moments, shaped like the parameters
    Gradients<T> v;  // second moments
};

template <class T>
AdamState<T> make_adam_state(const Model<T>& model);

// One bias-corrected Adam update; bumps model.version.
template <class T>
void adam_step(Model<T>& model, const Gradients<T>& grads, AdamState<T>& state, double lr);

}  // namespace burstsync::nn
