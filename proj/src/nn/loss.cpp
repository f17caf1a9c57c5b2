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

#include "burstsync/nn/loss.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace burstsync::nn {

std::string to_string(Loss l) {
    switch (l) {
        case Loss::mse: return "mse";
        case Loss::mae: return "mae";
        case Loss::logcosh: return "logcosh";
        case Loss::huber: return "huber";
    }
    return "?";
}

Loss parse_loss(const std::string& s) {
    if (s == "mse") return Loss::mse;
    if (s == "mae") return Loss::mae;
    if (s == "logcosh") return Loss::logcosh;
    if (s == "huber") return Loss::huber;
    throw std::invalid_argument("unknown loss '" + s + "' (expected mse, mae, logcosh or huber)");
}

namespace {
double sign(double e) {
    return e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0);
}
}  // namespace

LossValue loss_mse(double y, double y_hat) {
    const double e = y - y_hat;
    return {e * e, -2.0 * e};
}

LossValue loss_mae(double y, double y_hat) {
    const double e = y - y_hat;
    return {std::abs(e), -sign(e)};
}

LossValue loss_logcosh(double y, double y_hat) {
    const double e = y - y_hat;
    const double a = std::abs(e);
    return {a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2, -std::tanh(e)};
}

LossValue loss_huber(double y, double y_hat) {
    const double e = y - y_hat;
    const double a = std::abs(e);
    if (a <= 1.0) {
        return {0.5 * e * e, -e};
    }
    return {a - 0.5, -sign(e)};
}

LossValue evaluate_loss(Loss l, double y, double y_hat) {
    switch (l) {
        case Loss::mse: return loss_mse(y, y_hat);
        case Loss::mae: return loss_mae(y, y_hat);
        case Loss::logcosh: return loss_logcosh(y, y_hat);
        case Loss::huber: return loss_huber(y, y_hat);
    }
    throw std::invalid_argument("evaluate_loss: unknown loss");
}

}  // namespace burstsync::nn
