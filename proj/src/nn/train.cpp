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

#include "burstsync/nn/train.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "burstsync/nn/adam.hpp"
#include "burstsync/parallel.hpp"
#include "burstsync/random.hpp"

namespace burstsync::nn {

void TrainConfig::validate() const {
    if (!(lr_init > 0.0) || !std::isfinite(lr_init)) {
        throw std::invalid_argument("TrainConfig: lr_init must be positive");
    }
    if (!(lr_factor > 0.0 && lr_factor < 1.0)) {
        throw std::invalid_argument("TrainConfig: lr_factor must lie in (0, 1)");
    }
    if (epochs < 1) {
        throw std::invalid_argument("TrainConfig: epochs must be positive");
    }
    if (plateau_patience < 1) {
        throw std::invalid_argument("TrainConfig: plateau_patience must be positive");
    }
    if (batch_size < 1) {
        throw std::invalid_argument("TrainConfig: batch_size must be positive");
    }
    if (threads < 1) {
        throw std::invalid_argument("TrainConfig: threads must be positive");
    }
}

template <class T>
void prepare_input(const IqBuffer& iq, InputNorm norm, std::span<T> out) {
    if (out.size() != 2 * iq.size()) {
        throw ShapeError("prepare_input: buffer has " + std::to_string(iq.size()) + " samples, model expects " +
                         std::to_string(out.size() / 2));
    }
    double scale = 1.0;
    if (norm == InputNorm::rms) {
        double p = 0.0;
        for (const auto& s : iq.samples) {
            p += std::norm(s);
        }
        p /= static_cast<double>(std::max<std::size_t>(iq.size(), 1));
        scale = p > 0.0 ? 1.0 / std::sqrt(p) : 1.0;
    }
    for (std::size_t k = 0; k < iq.size(); ++k) {
        out[2 * k] = static_cast<T>(iq.samples[k].real() * scale);
        out[2 * k + 1] = static_cast<T>(iq.samples[k].imag() * scale);
    }
}

template <class T>
RegressionSet<T> make_regression_set(const std::vector<datasets::LabeledExample>& examples, const ModelSpec& spec) {
    RegressionSet<T> s;
    s.input_size = spec.input.size();
    s.x.resize(examples.size() * s.input_size);
    s.y.resize(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
        prepare_input<T>(examples[i].iq, spec.input_norm, std::span<T>(s.x.data() + i * s.input_size, s.input_size));
        s.y[i] = examples[i].label / spec.label_scale;
    }
    return s;
}

template <class T>
std::vector<double> predict_set(const Model<T>& m, const RegressionSet<T>& set, int threads) {
    std::vector<double> out(set.size());
    const int w = std::max(1, threads);
    std::vector<Workspace<T>> ws(static_cast<std::size_t>(w));
    parallel_for(set.size(), w, [&](std::size_t worker, std::size_t i) {
        out[i] = static_cast<double>(forward(m, set.input(i), ws[worker]));
    });
    return out;
}

template <class T>
double mean_loss(const Model<T>& m, const RegressionSet<T>& set, Loss loss, int threads) {
    if (set.size() == 0) {
        throw std::invalid_argument("mean_loss: empty set");
    }
    const auto pred = predict_set(m, set, threads);
    double acc = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        acc += evaluate_loss(loss, set.y[i], pred[i]).value;
    }
    return acc / static_cast<double>(set.size());
}

template <class T>
double predict(const Model<T>& m, const IqBuffer& iq) {
    std::vector<T> x(m.spec.input.size());
    prepare_input<T>(iq, m.spec.input_norm, x);
    return static_cast<double>(predict_raw(m, std::span<const T>(x))) * m.spec.label_scale;
}

namespace {

template <class T>
void add_into(Gradients<T>& dst, const Gradients<T>& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) {
        for (std::size_t j = 0; j < dst[i].weights.size(); ++j) {
            dst[i].weights.data[j] += src[i].weights.data[j];
        }
        for (std::size_t j = 0; j < dst[i].bias.size(); ++j) {
            dst[i].bias.data[j] += src[i].bias.data[j];
        }
    }
}

}  // namespace

template <class T>
TrainResult<T> train_from(Model<T> model, const RegressionSet<T>& train_set, const RegressionSet<T>& val_set,
                          const TrainConfig& cfg, const std::function<void(const EpochRecord&)>& on_epoch) {
    cfg.validate();
    if (train_set.size() == 0 || val_set.size() == 0) {
        throw std::invalid_argument("train: training and validation sets must be non-empty");
    }
    if (train_set.input_size != model.spec.input.size() || val_set.input_size != model.spec.input.size()) {
        throw ShapeError("train: dataset block length does not match the model input");
    }

    const auto workers = static_cast<std::size_t>(cfg.threads);
    std::vector<Workspace<T>> ws(workers);
    std::vector<Gradients<T>> wgrads(workers, zero_gradients(model));
    std::vector<double> wloss(workers);
    Gradients<T> grads = zero_gradients(model);
    AdamState<T> adam = make_adam_state(model);

    TrainResult<T> result;
    result.best = model;
    result.best_val_loss = std::numeric_limits<double>::infinity();
    double lr = cfg.lr_init;
    int since_best = 0;

    std::vector<std::size_t> order(train_set.size());
    const std::size_t n_batches = (train_set.size() + cfg.batch_size - 1) / cfg.batch_size;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(cfg.seed, {0x73687566ULL, static_cast<std::uint64_t>(epoch)}));
        for (std::size_t i = order.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(order[i - 1], order[j]);
        }

        double epoch_loss = 0.0;
        for (std::size_t b = 0; b < n_batches; ++b) {
            const std::size_t begin = b * cfg.batch_size;
            const std::size_t count = std::min(cfg.batch_size, order.size() - begin);
            const T inv = static_cast<T>(1.0 / static_cast<double>(count));
            for (auto& g : wgrads) {
                clear_gradients(g);
            }
            std::fill(wloss.begin(), wloss.end(), 0.0);
            try {
                // Contiguous shards; worker w owns [w*count/W, (w+1)*count/W).
                parallel_for(workers, cfg.threads, [&](std::size_t, std::size_t w) {
                    const std::size_t lo = begin + w * count / workers;
                    const std::size_t hi = begin + (w + 1) * count / workers;
                    for (std::size_t k = lo; k < hi; ++k) {
                        const std::size_t idx = order[k];
                        const T pred = forward(model, train_set.input(idx), ws[w]);
                        const LossValue lv = evaluate_loss(cfg.loss, train_set.y[idx], static_cast<double>(pred));
                        if (!std::isfinite(lv.value)) {
                            throw NonFiniteError("non-finite loss");
                        }
                        wloss[w] += lv.value;
                        backward(model, ws[w], static_cast<T>(lv.grad) * inv, wgrads[w]);
                    }
                });
            } catch (const NonFiniteError& e) {
                throw TrainingFault(std::string("training fault: ") + e.what() + " at epoch " +
                                        std::to_string(epoch) + ", batch " + std::to_string(b) + ", lr " +
                                        std::to_string(lr),
                                    epoch, b, lr);
            }
            clear_gradients(grads);
            for (std::size_t w = 0; w < workers; ++w) {
                add_into(grads, wgrads[w]);
                epoch_loss += wloss[w];
            }
            adam_step(model, grads, adam, lr);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = epoch_loss / static_cast<double>(train_set.size());
        rec.lr = lr;
        try {
            rec.val_loss = mean_loss(model, val_set, cfg.loss, cfg.threads);
        } catch (const NonFiniteError& e) {
            throw TrainingFault(std::string("training fault: ") + e.what() + " during validation at epoch " +
                                    std::to_string(epoch),
                                epoch, n_batches, lr);
        }
        if (!std::isfinite(rec.val_loss) || !std::isfinite(rec.train_loss)) {
            throw TrainingFault("training fault: non-finite loss at epoch " + std::to_string(epoch), epoch,
                                n_batches, lr);
        }
        result.history.push_back(rec);
        if (rec.val_loss < result.best_val_loss) {
            result.best_val_loss = rec.val_loss;
            result.best_epoch = epoch;
            result.best = model;
            since_best = 0;
        } else if (++since_best >= cfg.plateau_patience) {
            lr *= cfg.lr_factor;
            since_best = 0;
        }
        if (on_epoch) {
            on_epoch(rec);
        }
    }
    return result;
}

template <class T>
TrainResult<T> train(const ModelSpec& spec, const RegressionSet<T>& train_set, const RegressionSet<T>& val_set,
                     const TrainConfig& cfg, const std::function<void(const EpochRecord&)>& on_epoch) {
    return train_from(init_model<T>(spec, derive_seed(cfg.seed, {0x6d6f64656cULL})), train_set, val_set, cfg,
                      on_epoch);
}

#define BURSTSYNC_INSTANTIATE(T)                                                                              \
    template void prepare_input<T>(const IqBuffer&, InputNorm, std::span<T>);                                 \
    template RegressionSet<T> make_regression_set<T>(const std::vector<datasets::LabeledExample>&,            \
                                                     const ModelSpec&);                                       \
    template std::vector<double> predict_set<T>(const Model<T>&, const RegressionSet<T>&, int);               \
    template double mean_loss<T>(const Model<T>&, const RegressionSet<T>&, Loss, int);                        \
    template double predict<T>(const Model<T>&, const IqBuffer&);                                             \
    template TrainResult<T> train_from<T>(Model<T>, const RegressionSet<T>&, const RegressionSet<T>&,         \
                                          const TrainConfig&, const std::function<void(const EpochRecord&)>&); \
    template TrainResult<T> train<T>(const ModelSpec&, const RegressionSet<T>&, const RegressionSet<T>&,      \
                                     const TrainConfig&, const std::function<void(const EpochRecord&)>&);

BURSTSYNC_INSTANTIATE(float)
BURSTSYNC_INSTANTIATE(double)

}  // namespace burstsync::nn
