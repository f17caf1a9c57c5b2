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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>

#include "burstsync/nn/adam.hpp"
#include "burstsync/nn/loss.hpp"
#include "burstsync/nn/model.hpp"
#include "burstsync/nn/model_io.hpp"
#include "burstsync/nn/train.hpp"
#include "gradcheck.hpp"
#include "test_util.hpp"

using namespace burstsync;
using namespace burstsync::nn;
namespace fs = std::filesystem;

#ifndef BURSTSYNC_FIXTURE_DIR
#error "BURSTSYNC_FIXTURE_DIR must be defined"
#endif

namespace {

std::vector<std::size_t> conv_widths(const ModelSpec& s) {
    std::vector<std::size_t> w;
    const auto shapes = resolve_shapes(s);
    for (std::size_t i = 0; i < s.layers.size(); ++i) {
        if (s.layers[i].kind == LayerKind::conv1d) {
            w.push_back(shapes[i].out.length);
        }
    }
    return w;
}

template <class T>
void fill_random(Model<T>& m, std::uint64_t seed, double scale = 1.0) {
    Rng rng(seed);
    for (auto& p : m.params) {
        for (auto& v : p.weights.data) v = static_cast<T>(rng.uniform(-scale, scale));
        for (auto& v : p.bias.data) v = static_cast<T>(rng.uniform(-scale, scale));
    }
}

}  // namespace

TEST(BuildModel, TimingWidthsMatchTable) {
    const ModelSpec s = build_model(Arch::timing, 2048);
    EXPECT_EQ(conv_widths(s), (std::vector<std::size_t>{511, 126, 30, 2}));
    const auto shapes = resolve_shapes(s);
    EXPECT_EQ(shapes.back().out, (Shape{1, 1}));
    std::vector<std::size_t> channels;
    for (std::size_t i = 0; i < s.layers.size(); ++i) {
        if (s.layers[i].kind == LayerKind::conv1d) channels.push_back(shapes[i].out.channels);
    }
    EXPECT_EQ(channels, (std::vector<std::size_t>{32, 64, 128, 256}));
}

TEST(BuildModel, CfoArchitectureAllSizes) {
    for (std::size_t n : {32, 64, 128, 256, 512, 1024}) {
        const ModelSpec s = build_model(Arch::cfo, n);
        const auto shapes = resolve_shapes(s);
        EXPECT_EQ(shapes.back().out.size(), 1u) << n;
        std::vector<LayerKind> kinds;
        for (const auto& l : s.layers) kinds.push_back(l.kind);
        EXPECT_EQ(kinds, (std::vector<LayerKind>{LayerKind::conv1d, LayerKind::relu, LayerKind::avg_pool,
                                                 LayerKind::conv1d, LayerKind::relu, LayerKind::conv1d,
                                                 LayerKind::relu, LayerKind::linear_out}));
        EXPECT_EQ(shapes[0].out.channels, 32u);
        EXPECT_EQ(shapes[3].out.channels, 128u);
        EXPECT_EQ(shapes[5].out.channels, 256u);
        EXPECT_EQ(s.label_scale, 50e3);
    }
}

TEST(BuildModel, RejectsBrokenOverrides) {
    ArchHyper h = default_hyper(Arch::timing, 2048);
    h.convs[0] = {9, 4};  // floor((2048 - 9) / 4) + 1 = 510
    EXPECT_THROW(build_model(Arch::timing, 2048, h), ShapeError);
    EXPECT_THROW(build_model(Arch::timing, 1024), ShapeError);
    EXPECT_THROW(build_model(Arch::cfo, 100), ShapeError);
    ArchHyper c = default_hyper(Arch::cfo, 32);
    c.convs[2] = {64, 1};
    EXPECT_THROW(build_model(Arch::cfo, 32, c), ShapeError);
}

TEST(BuildModel, TimingMaxPoolOverrideKeepsWidths) {
    ArchHyper h;
    h.convs = {{8, 2}, {11, 2}, {10, 2}, {28, 1}};
    h.max_pool = {2, 2, 2, 2};
    // 2048 -> 1021 -> 510 ... the chain must hit 511 after pooling; it does not.
    EXPECT_THROW(build_model(Arch::timing, 2048, h), ShapeError);
    h.convs = {{4, 2}, {4, 2}, {4, 2}, {2, 1}};
    h.max_pool = {2, 2, 2, 16};
    // 2048 -> 1023 -> 511; 511 -> 254 -> 127 (not 126): rejected.
    EXPECT_THROW(build_model(Arch::timing, 2048, h), ShapeError);
    h.convs = {{4, 2}, {6, 2}, {8, 2}, {2, 1}};
    h.max_pool = {2, 2, 2, 15};
    // 1023/2=511; (511-6)/2+1=253/2=126; (126-8)/2+1=60/2=30; 29/15=1 -> rejected at stage 4 (needs 2).
    EXPECT_THROW(build_model(Arch::timing, 2048, h), ShapeError);
    h.max_pool = {2, 2, 2, 14};
    EXPECT_NO_THROW(build_model(Arch::timing, 2048, h));
}

TEST(Shapes, ConvWidthFormulaHoldsForRandomSpecs) {
    Rng rng(1);
    for (int t = 0; t < 200; ++t) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(1, 300));
        const int len = static_cast<int>(rng.uniform_int(1, 20));
        const int stride = static_cast<int>(rng.uniform_int(1, 5));
        ModelSpec s;
        s.input = {n, 2};
        s.layers = {LayerSpec::conv(len, stride, 3), LayerSpec::linear_out_layer()};
        if (static_cast<std::size_t>(len) > n) {
            EXPECT_THROW(resolve_shapes(s), ShapeError);
            continue;
        }
        const auto shapes = resolve_shapes(s);
        EXPECT_EQ(shapes[0].out.length, (n - static_cast<std::size_t>(len)) / static_cast<std::size_t>(stride) + 1);
        Model<double> m = make_model<double>(s);
        fill_random(m, static_cast<std::uint64_t>(t));
        Workspace<double> ws;
        std::vector<double> x(s.input.size(), 0.5);
        forward(m, std::span<const double>(x), ws);
        EXPECT_EQ(ws.acts[1].size(), shapes[0].out.size());
    }
}

TEST(Forward, ZeroParametersGiveZero) {
    const ModelSpec s = build_model(Arch::cfo, 64);
    const Model<float> m = make_model<float>(s);
    std::vector<float> x(s.input.size());
    Rng rng(2);
    for (auto& v : x) v = static_cast<float>(rng.normal());
    EXPECT_EQ(predict_raw(m, std::span<const float>(x)), 0.0f);
}

TEST(Forward, UnitFilterPassesChannelThrough) {
    ModelSpec s;
    s.input = {5, 2};
    s.layers = {LayerSpec::conv(1, 1, 1)};
    EXPECT_THROW(make_model<double>(s), ShapeError);  // output is not scalar
    const std::vector<double> x = {1, 9, -2, 9, 3, 9, -4, 9, 5, 9};
    const auto shapes = resolve_chain(s);
    EXPECT_EQ(shapes[0].out, (Shape{5, 1}));
    // Follow with a linear read-out of sample 2 to observe the conv output.
    s.layers.push_back(LayerSpec::linear_out_layer());
    Model<double> m2 = make_model<double>(s);
    m2.params[0].weights.data = {1.0, 0.0};
    for (int k = 0; k < 5; ++k) {
        std::fill(m2.params[1].weights.data.begin(), m2.params[1].weights.data.end(), 0.0);
        m2.params[1].weights.data[static_cast<std::size_t>(k)] = 1.0;
        EXPECT_EQ(predict_raw(m2, std::span<const double>(x)), x[static_cast<std::size_t>(2 * k)]);
    }
}

TEST(Forward, MatchesReferenceOnTinyRandomModels) {
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        ModelSpec s;
        s.input = {static_cast<std::size_t>(rng.uniform_int(4, 8)), 2};
        s.layers = {LayerSpec::conv(static_cast<int>(rng.uniform_int(1, 3)), static_cast<int>(rng.uniform_int(1, 2)),
                                    static_cast<int>(rng.uniform_int(1, 8))),
                    LayerSpec::relu_layer(), LayerSpec::linear_out_layer()};
        Model<double> m = make_model<double>(s);
        fill_random(m, static_cast<std::uint64_t>(100 + t));
        std::vector<double> x(s.input.size());
        for (auto& v : x) v = rng.uniform(-1, 1);
        EXPECT_NEAR(predict_raw(m, std::span<const double>(x)), gradcheck::reference_forward(m, x), 1e-6);
    }
}

TEST(Forward, FullArchitecturesMatchReference) {
    for (auto [arch, n] : {std::pair{Arch::cfo, std::size_t{256}}, std::pair{Arch::timing, std::size_t{2048}}}) {
        const ModelSpec s = build_model(arch, n);
        Model<double> m = init_model<double>(s, 5);
        std::vector<double> x(s.input.size());
        Rng rng(6);
        for (auto& v : x) v = rng.normal();
        const double ref = gradcheck::reference_forward(m, x);
        EXPECT_NEAR(predict_raw(m, std::span<const double>(x)), ref, 1e-9 * std::max(1.0, std::abs(ref)));
        const Model<float> mf = convert_model<float>(m);
        std::vector<float> xf(x.begin(), x.end());
        EXPECT_NEAR(predict_raw(mf, std::span<const float>(xf)), ref, 1e-3 * std::max(1.0, std::abs(ref)));
    }
}

TEST(Forward, NonFiniteActivationRaises) {
    const ModelSpec s = build_model(Arch::cfo, 32);
    Model<float> m = init_model<float>(s, 1);
    m.params[0].bias.data[0] = std::numeric_limits<float>::quiet_NaN();
    std::vector<float> x(s.input.size(), 0.1f);
    EXPECT_THROW(predict_raw(m, std::span<const float>(x)), NonFiniteError);
    std::vector<float> short_x(10);
    EXPECT_THROW(predict_raw(m, std::span<const float>(short_x)), ShapeError);
}

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
    const ModelSpec s = build_model(Arch::cfo, 64);
    Model<double> m = init_model<double>(s, 2);
    std::vector<double> x(s.input.size(), 0.3);
    Workspace<double> ws;
    forward(m, std::span<const double>(x), ws);
    auto g = zero_gradients(m);
    backward(m, ws, 0.0, g);
    for (const auto& p : g) {
        for (double v : p.weights.data) EXPECT_EQ(v, 0.0);
        for (double v : p.bias.data) EXPECT_EQ(v, 0.0);
    }
}

TEST(Backward, ReluBlocksGradientAtNegativePreactivation) {
    ModelSpec s;
    s.input = {1, 1};
    s.layers = {LayerSpec::dense_layer(1), LayerSpec::relu_layer(), LayerSpec::linear_out_layer()};
    Model<double> m = make_model<double>(s);
    m.params[0].weights.data = {1.0};
    m.params[0].bias.data = {-5.0};
    m.params[2].weights.data = {2.0};
    const std::vector<double> x = {1.0};
    Workspace<double> ws;
    forward(m, std::span<const double>(x), ws);
    auto g = zero_gradients(m);
    std::vector<double> dx;
    backward(m, ws, 1.0, g, &dx);
    EXPECT_EQ(g[0].weights.data[0], 0.0);
    EXPECT_EQ(g[0].bias.data[0], 0.0);
    EXPECT_EQ(dx[0], 0.0);
    EXPECT_EQ(g[2].bias.data[0], 1.0);
}

TEST(Backward, StaleCacheRejected) {
    const ModelSpec s = build_model(Arch::cfo, 32);
    Model<double> m = init_model<double>(s, 3);
    auto g = zero_gradients(m);
    Workspace<double> ws;
    EXPECT_THROW(backward(m, ws, 1.0, g), StaleCacheError);
    std::vector<double> x(s.input.size(), 0.2);
    forward(m, std::span<const double>(x), ws);
    AdamState<double> st = make_adam_state(m);
    adam_step(m, g, st, 1e-3);
    EXPECT_THROW(backward(m, ws, 1.0, g), StaleCacheError);
}

class GradientOracle : public ::testing::TestWithParam<LayerKind> {};

TEST_P(GradientOracle, FiniteDifferencesOver100RandomShapes) {
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        const auto [m, x] = gradcheck::random_case(GetParam(), derive_seed(17, {static_cast<std::uint64_t>(GetParam()), t}));
        const auto r = gradcheck::check(m, x);
        worst = std::max(worst, r.max_rel_error);
    }
    EXPECT_LT(worst, 1e-4) << to_string(GetParam());
}

INSTANTIATE_TEST_SUITE_P(AllLayerKinds, GradientOracle, ::testing::ValuesIn(gradcheck::all_kinds()),
                         [](const auto& info) { return to_string(info.param); });

TEST(Backward, FullCfoNetworkFiniteDifferenceSpotCheck) {
    const ModelSpec s = build_model(Arch::cfo, 64);
    Model<double> m = init_model<double>(s, 8);
    std::vector<double> x(s.input.size());
    Rng rng(9);
    for (auto& v : x) v = rng.normal();
    Workspace<double> ws;
    forward(m, std::span<const double>(x), ws);
    auto g = zero_gradients(m);
    backward(m, ws, 1.0, g);
    // A sample of conv2 and conv3 weights.
    for (std::size_t li : {3u, 5u}) {
        for (std::size_t i = 0; i < m.params[li].weights.size(); i += 97) {
            Model<double> mp = m;
            mp.params[li].weights.data[i] += 1e-5;
            Model<double> mm = m;
            mm.params[li].weights.data[i] -= 1e-5;
            const double fd = (predict_raw(mp, std::span<const double>(x)) - predict_raw(mm, std::span<const double>(x))) / 2e-5;
            EXPECT_LT(gradcheck::rel_error(g[li].weights.data[i], fd), 1e-4);
        }
    }
}

TEST(Loss, ZeroResidualGivesZero) {
    for (Loss l : {Loss::mse, Loss::mae, Loss::logcosh, Loss::huber}) {
        const auto v = evaluate_loss(l, 0.7, 0.7);
        EXPECT_EQ(v.value, 0.0) << to_string(l);
        EXPECT_EQ(v.grad, 0.0) << to_string(l);
    }
}

TEST(Loss, DirectSubstitution) {
    EXPECT_EQ(loss_mse(3.0, 0.0).value, 9.0);
    EXPECT_EQ(loss_mae(3.0, 0.0).value, 3.0);
    EXPECT_EQ(loss_huber(3.0, 0.0).value, 2.5);
    EXPECT_EQ(loss_mse(3.0, 0.0).grad, -6.0);
    EXPECT_EQ(loss_mae(3.0, 0.0).grad, -1.0);
}

TEST(Loss, LogCoshAsymptote) {
    const long double expected = 10.0L - std::log(2.0L);
    EXPECT_NEAR(loss_logcosh(10.0, 0.0).value, static_cast<double>(expected), 1e-6);
    EXPECT_NEAR(loss_logcosh(0.5, 0.0).value, std::log(std::cosh(0.5)), 1e-15);
    EXPECT_TRUE(std::isfinite(loss_logcosh(1e6, 0.0).value));
}

TEST(Loss, SymmetryHuberMseAgreementAndDerivatives) {
    Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        const double y = rng.uniform(-3, 3);
        const double p = rng.uniform(-3, 3);
        for (Loss l : {Loss::mse, Loss::mae, Loss::logcosh, Loss::huber}) {
            EXPECT_EQ(evaluate_loss(l, y, p).value, evaluate_loss(l, p, y).value);
            const double h = 1e-6;
            const double fd = (evaluate_loss(l, y, p + h).value - evaluate_loss(l, y, p - h).value) / (2 * h);
            if (std::abs(y - p) > 1e-3 && std::abs(std::abs(y - p) - 1.0) > 1e-3) {
                EXPECT_NEAR(evaluate_loss(l, y, p).grad, fd, 1e-5) << to_string(l);
            }
        }
        const double e = y - p;
        if (std::abs(e) < 1.0) {
            EXPECT_EQ(loss_huber(y, p).value, 0.5 * loss_mse(y, p).value);
        }
    }
    // Continuity at the knee.
    EXPECT_NEAR(loss_huber(1.0 + 1e-12, 0.0).value, loss_huber(1.0 - 1e-12, 0.0).value, 1e-11);
    EXPECT_EQ(parse_loss("huber"), Loss::huber);
    EXPECT_THROW(parse_loss("l2"), std::invalid_argument);
}

namespace {

Model<double> scalar_model(double w) {
    ModelSpec s;
    s.input = {1, 1};
    s.input_norm = InputNorm::none;
    s.layers = {LayerSpec::linear_out_layer()};
    Model<double> m = make_model<double>(s);
    m.params[0].weights.data = {w};
    return m;
}

}  // namespace

TEST(Adam, ZeroGradientLeavesParameters) {
    Model<double> m = scalar_model(0.3);
    auto st = make_adam_state(m);
    auto g = zero_gradients(m);
    adam_step(m, g, st, 0.1);
    EXPECT_EQ(m.params[0].weights.data[0], 0.3);
    EXPECT_EQ(st.step, 1u);
}

TEST(Adam, ConstantGradientStepsApproachLr) {
    Model<double> m = scalar_model(0.0);
    auto st = make_adam_state(m);
    auto g = zero_gradients(m);
    g[0].weights.data[0] = 2.5;
    double prev = 0.0;
    for (int i = 0; i < 200; ++i) {
        adam_step(m, g, st, 0.01);
        const double now = m.params[0].weights.data[0];
        EXPECT_LT(now, prev);
        EXPECT_NEAR(prev - now, 0.01, 1e-6);
        prev = now;
    }
}

TEST(Adam, ThreeStepHandTrace) {
    Model<double> m = scalar_model(1.0);
    auto st = make_adam_state(m);
    auto g = zero_gradients(m);
    g[0].weights.data[0] = 1.0;
    // m_t = 1 - 0.9^t, v_t = 1 - 0.999^t, so m_hat = v_hat = 1 and each
    // step is lr / (1 + eps).
    double expected = 1.0;
    for (int t = 1; t <= 3; ++t) {
        adam_step(m, g, st, 0.1);
        const double mt = 1.0 - std::pow(0.9, t);
        const double vt = 1.0 - std::pow(0.999, t);
        const double mhat = mt / (1.0 - std::pow(0.9, t));
        const double vhat = vt / (1.0 - std::pow(0.999, t));
        expected -= 0.1 * mhat / (std::sqrt(vhat) + 1e-8);
        EXPECT_NEAR(m.params[0].weights.data[0], expected, 1e-9) << t;
    }
    EXPECT_NEAR(m.params[0].weights.data[0], 1.0 - 0.3 / (1.0 + 1e-8), 1e-9);
}

TEST(Adam, UpdatesArePerParameterIndependent) {
    ModelSpec s;
    s.input = {5, 1};
    s.layers = {LayerSpec::linear_out_layer()};
    Model<double> a = make_model<double>(s);
    fill_random(a, 1);
    Model<double> b = a;
    std::reverse(b.params[0].weights.data.begin(), b.params[0].weights.data.end());
    auto sa = make_adam_state(a);
    auto sb = make_adam_state(b);
    Rng rng(2);
    for (int step = 0; step < 5; ++step) {
        auto ga = zero_gradients(a);
        for (auto& v : ga[0].weights.data) v = rng.normal();
        auto gb = ga;
        std::reverse(gb[0].weights.data.begin(), gb[0].weights.data.end());
        adam_step(a, ga, sa, 0.05);
        adam_step(b, gb, sb, 0.05);
    }
    auto rev = b.params[0].weights.data;
    std::reverse(rev.begin(), rev.end());
    EXPECT_EQ(rev, a.params[0].weights.data);
}

namespace {

RegressionSet<float> toy_set(std::size_t n, std::size_t dim, std::uint64_t seed, bool zero_labels) {
    RegressionSet<float> s;
    s.input_size = dim;
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double v = rng.uniform(-1, 1);
            s.x.push_back(static_cast<float>(v));
            sum += v;
        }
        s.y.push_back(zero_labels ? 0.0 : sum);
    }
    return s;
}

ModelSpec dense_spec(std::size_t dim) {
    ModelSpec s;
    s.input = {dim, 1};
    s.input_norm = InputNorm::none;
    s.layers = {LayerSpec::linear_out_layer()};
    return s;
}

}  // namespace

TEST(Train, ConstantZeroLabelsConverge) {
    ModelSpec s;
    s.input = {4, 2};
    s.input_norm = InputNorm::none;
    s.layers = {LayerSpec::conv(2, 1, 4), LayerSpec::relu_layer(), LayerSpec::linear_out_layer()};
    const auto tr = toy_set(1024, 8, 1, true);
    const auto va = toy_set(128, 8, 2, true);
    TrainConfig cfg;
    cfg.batch_size = 8;
    cfg.seed = 3;
    const auto r = train(s, tr, va, cfg);
    ASSERT_EQ(r.history.size(), 100u);
    EXPECT_LT(r.best_val_loss, 1e-6);
}

TEST(Train, LinearToyImprovesHundredfold) {
    const auto tr = toy_set(1024, 6, 4, false);
    const auto va = toy_set(128, 6, 5, false);
    TrainConfig cfg;
    cfg.batch_size = 8;
    cfg.seed = 6;
    const auto r = train(dense_spec(6), tr, va, cfg);
    EXPECT_GE(r.history.front().val_loss / r.best_val_loss, 100.0);
    EXPECT_EQ(mean_loss(r.best, va, Loss::mse), r.best_val_loss);
}

TEST(Train, SameSeedBitIdenticalHistoryAndParameters) {
    const auto tr = toy_set(300, 6, 7, false);
    const auto va = toy_set(60, 6, 8, false);
    TrainConfig cfg;
    cfg.epochs = 15;
    cfg.batch_size = 16;
    const auto a = train(dense_spec(6), tr, va, cfg);
    const auto b = train(dense_spec(6), tr, va, cfg);
    ASSERT_EQ(a.history.size(), b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        EXPECT_EQ(a.history[i].train_loss, b.history[i].train_loss);
        EXPECT_EQ(a.history[i].val_loss, b.history[i].val_loss);
        EXPECT_EQ(a.history[i].lr, b.history[i].lr);
    }
    EXPECT_EQ(a.best.params[0].weights.data, b.best.params[0].weights.data);
}

TEST(Train, ThreadedModeIsReproducible) {
    ModelSpec s;
    s.input = {4, 2};
    s.input_norm = InputNorm::none;
    s.layers = {LayerSpec::conv(2, 1, 4), LayerSpec::relu_layer(), LayerSpec::linear_out_layer()};
    const auto tr = toy_set(200, 8, 9, false);
    const auto va = toy_set(50, 8, 10, false);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 32;
    cfg.threads = 3;
    const auto a = train(s, tr, va, cfg);
    const auto b = train(s, tr, va, cfg);
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        EXPECT_EQ(a.history[i].val_loss, b.history[i].val_loss);
    }
    cfg.threads = 1;
    const auto c = train(s, tr, va, cfg);
    // Different reduction grouping, same mathematics.
    EXPECT_NEAR(c.history.back().val_loss, a.history.back().val_loss, 1e-4 * (1.0 + a.history.back().val_loss));
}

TEST(Train, PlateauScheduleHalvesAfterPatienceAndKeepsBest) {
    // Labels are pure noise, so the validation loss plateaus quickly.
    auto tr = toy_set(64, 3, 11, false);
    auto va = toy_set(64, 3, 12, false);
    Rng rng(13);
    for (auto& y : tr.y) y = rng.normal();
    for (auto& y : va.y) y = rng.normal();
    TrainConfig cfg;
    cfg.epochs = 60;
    cfg.batch_size = 8;
    cfg.lr_init = 0.05;
    cfg.plateau_patience = 3;
    const auto r = train(dense_spec(3), tr, va, cfg);
    double best = INFINITY;
    int since = 0;
    double lr = cfg.lr_init;
    int best_epoch = 0;
    int halvings = 0;
    for (const auto& rec : r.history) {
        EXPECT_EQ(rec.lr, lr) << "epoch " << rec.epoch;
        if (rec.val_loss < best) {
            best = rec.val_loss;
            best_epoch = rec.epoch;
            since = 0;
        } else if (++since >= cfg.plateau_patience) {
            lr *= cfg.lr_factor;
            since = 0;
            ++halvings;
        }
    }
    EXPECT_GT(halvings, 0);
    EXPECT_EQ(r.best_epoch, best_epoch);
    EXPECT_EQ(r.best_val_loss, best);
}

TEST(Train, NonFiniteLossReportsFault) {
    auto tr = toy_set(64, 3, 14, false);
    const auto va = toy_set(16, 3, 15, false);
    tr.x[5] = std::numeric_limits<float>::infinity();
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 8;
    try {
        train(dense_spec(3), tr, va, cfg);
        FAIL() << "expected TrainingFault";
    } catch (const TrainingFault& f) {
        EXPECT_EQ(f.epoch, 1);
        EXPECT_EQ(f.lr, cfg.lr_init);
        EXPECT_LT(f.batch, 8u);
    }
}

TEST(Train, ConfigValidation) {
    TrainConfig c;
    c.lr_init = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.lr_factor = 1.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.batch_size = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Train, InputPreparationLayoutAndNormalization) {
    IqBuffer iq;
    iq.samples = {{3, 4}, {0, 0}, {-3, 4}, {0, 0}};
    std::vector<double> out(8);
    prepare_input<double>(iq, InputNorm::rms, out);
    // mean power 12.5
    const double s = 1.0 / std::sqrt(12.5);
    EXPECT_EQ(out, (std::vector<double>{3 * s, 4 * s, 0, 0, -3 * s, 4 * s, 0, 0}));
    prepare_input<double>(iq, InputNorm::none, out);
    EXPECT_EQ(out[0], 3.0);
    EXPECT_EQ(out[1], 4.0);
}

namespace {

std::vector<std::uint8_t> slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

TrainingHeader sample_header() {
    TrainingHeader h;
    h.config.loss = Loss::logcosh;
    h.config.seed = 99;
    h.best_epoch = 12;
    h.best_val_loss = 0.0123;
    h.cell = {"cfo", "fading_2", 5.0, 256, 1, "burstsync-1.0.0", 20000};
    return h;
}

}  // namespace

TEST(ModelIo, RoundTripIsBitExact) {
    test_util::TempDir dir;
    const ModelSpec s = build_model(Arch::cfo, 128);
    const Model<float> m = init_model<float>(s, 4);
    const auto h = sample_header();
    save_model(dir.path() / "m.cem", m, h);
    const auto back = load_model<float>(dir.path() / "m.cem");
    EXPECT_EQ(back.model.spec, s);
    EXPECT_EQ(back.training, h);
    for (std::size_t i = 0; i < m.params.size(); ++i) {
        EXPECT_EQ(back.model.params[i].weights.data, m.params[i].weights.data);
        EXPECT_EQ(back.model.params[i].bias.data, m.params[i].bias.data);
    }
    std::vector<float> x(s.input.size());
    Rng rng(5);
    for (auto& v : x) v = static_cast<float>(rng.normal());
    EXPECT_EQ(predict_raw(back.model, std::span<const float>(x)), predict_raw(m, std::span<const float>(x)));
    save_model(dir.path() / "m2.cem", back.model, back.training);
    EXPECT_EQ(slurp(dir.path() / "m.cem"), slurp(dir.path() / "m2.cem"));
}

TEST(ModelIo, CorruptionAndMismatchAreRejected) {
    test_util::TempDir dir;
    const Model<float> m = init_model<float>(build_model(Arch::cfo, 32), 4);
    const auto bytes = encode_model(m, sample_header());
    auto bad = bytes;
    bad[bad.size() / 2] ^= 0x40;
    EXPECT_THROW(decode_model<float>(bad), ModelFormatError);
    bad = bytes;
    bad.resize(bad.size() - 9);
    EXPECT_THROW(decode_model<float>(bad), ModelFormatError);
    bad = bytes;
    bad[0] = 'Z';
    EXPECT_THROW(decode_model<float>(bad), ModelFormatError);
    bad = bytes;
    bad[4] = 2;
    EXPECT_THROW(decode_model<float>(bad), ModelVersionError);
    EXPECT_THROW(decode_model<double>(bytes), ModelFormatError);
    EXPECT_THROW(load_model<float>(dir.path() / "missing.cem"), std::runtime_error);
}

TEST(ModelIo, GoldenFixtureFromIndependentWriter) {
    const fs::path dir = BURSTSYNC_FIXTURE_DIR;
    const auto saved = load_model<float>(dir / "tiny_model.cem");
    EXPECT_EQ(saved.training.config.seed, 42u);
    EXPECT_EQ(saved.training.best_epoch, 17);
    EXPECT_EQ(saved.training.cell.channel, "awgn");
    EXPECT_EQ(saved.training.cell.train_count, 20000u);
    EXPECT_EQ(saved.model.spec.label_scale, 50e3);
    EXPECT_EQ(encode_model(saved.model, saved.training), slurp(dir / "tiny_model.cem"));

    std::ifstream f(dir / "tiny_model_expected.txt");
    std::string line;
    std::getline(f, line);
    IqBuffer iq;
    iq.sample_rate_hz = 400e3;
    for (int i = 0; i < 6; ++i) {
        double re = 0;
        double im = 0;
        f >> re >> im;
        iq.samples.emplace_back(re, im);
    }
    double expected = 0;
    f >> expected;
    EXPECT_NEAR(predict(saved.model, iq), expected, 1e-5 * std::abs(expected));
}
