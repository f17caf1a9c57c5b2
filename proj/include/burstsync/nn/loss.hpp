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
#include <string>

namespace burstsync::nn {

enum class Loss : std::uint8_t { mse = 0, mae = 1, logcosh = 2, huber = 3 };

std::string to_string(Loss l);
Loss parse_loss(const std::string& s);

struct LossValue {
    double value = 0.0;
    double grad = 0.0;  // d(value)/d(prediction)
};

// Per-element loss of residual e = y - y_hat.
LossValue loss_mse(double y, double y_hat);
LossValue loss_mae(double y, double y_hat);
// log(cosh(e)) evaluated as |e| + log1p(exp(-2|e|)) - log 2, stable for large |e|.
LossValue loss_logcosh(double y, double y_hat);
// 0.5 e^2 for |e| <= 1, |e| - 0.5 beyond.
LossValue loss_huber(double y, double y_hat);

LossValue evaluate_loss(Loss l, double y, double y_hat);

}  // namespace burstsync::nn
