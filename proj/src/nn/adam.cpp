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

#include "burstsync/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace burstsync::nn {

template <class T>
AdamState<T> make_adam_state(const Model<T>& model) {
    AdamState<T> s;
    s.m = zero_gradients(model);
    s.v = zero_gradients(model);
    return s;
}

namespace {

template <class T>
void update(Tensor<T>& p, const Tensor<T>& g, Tensor<T>& m, Tensor<T>& v, double b1, double b2, double step_size,
            double eps_hat) {
    if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size()) {
        throw std::invalid_argument("adam_step: gradient or moment shape does not match parameters");
    }
    const T c1 = static_cast<T>(1.0 - b1);
    const T c2 = static_cast<T>(1.0 - b2);
    const T tb1 = static_cast<T>(b1);
    const T tb2 = static_cast<T>(b2);
    const T ss = static_cast<T>(step_size);
    const T eh = static_cast<T>(eps_hat);
    T* pd = p.data.data();
    const T* gd = g.data.data();
    T* md = m.data.data();
    T* vd = v.data.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
        md[i] = tb1 * md[i] + c1 * gd[i];
        vd[i] = tb2 * vd[i] + c2 * gd[i] * gd[i];
        pd[i] -= ss * md[i] / (std::sqrt(vd[i]) + eh);
    }
}

}  // namespace

template <class T>
void adam_step(Model<T>& model, const Gradients<T>& grads, AdamState<T>& state, double lr) {
    if (grads.size() != model.params.size() || state.m.size() != model.params.size()) {
        throw std::invalid_argument("adam_step: layer count mismatch");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);
    // p -= lr * m_hat / (sqrt(v_hat) + eps), rewritten over the raw moments.
    const double step_size = lr * std::sqrt(bc2) / bc1;
    const double eps_hat = state.eps * std::sqrt(bc2);
    for (std::size_t i = 0; i < model.params.size(); ++i) {
        update(model.params[i].weights, grads[i].weights, state.m[i].weights, state.v[i].weights, state.beta1,
               state.beta2, step_size, eps_hat);
        update(model.params[i].bias, grads[i].bias, state.m[i].bias, state.v[i].bias, state.beta1, state.beta2,
               step_size, eps_hat);
    }
    ++model.version;
}

template AdamState<float> make_adam_state<float>(const Model<float>&);
template AdamState<double> make_adam_state<double>(const Model<double>&);
template void adam_step<float>(Model<float>&, const Gradients<float>&, AdamState<float>&, double);
template void adam_step<double>(Model<double>&, const Gradients<double>&, AdamState<double>&, double);

}  // namespace burstsync::nn
