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

#include "burstsync/complexity.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "burstsync/sigproc.hpp"

namespace burstsync::complexity {

using nn::LayerKind;

OpCount layer_flops(const nn::LayerSpec& l, nn::Shape in) {
    OpCount c;
    switch (l.kind) {
        case LayerKind::conv1d: {
            const std::uint64_t k = nn::conv_output_width(in.length, l.filter_len, l.stride);
            if (k == 0) {
                throw nn::ShapeError("layer_flops: conv filter longer than its input");
            }
            const std::uint64_t len = static_cast<std::uint64_t>(l.filter_len);
            const std::uint64_t ci = in.channels;
            const std::uint64_t co = static_cast<std::uint64_t>(l.out_channels);
            c.multiplies = len * ci * co * k;
            c.adds = len * (ci + 1) * co * k;
            break;
        }
        case LayerKind::dense:
        case LayerKind::linear_out: {
            const std::uint64_t ni = in.size();
            const std::uint64_t no = static_cast<std::uint64_t>(l.out_features);
            c.multiplies = ni * no;
            c.adds = (ni + 1) * no;
            break;
        }
        case LayerKind::avg_pool: {
            if (l.pool < 1) {
                throw nn::ShapeError("layer_flops: pool size must be positive");
            }
            const std::uint64_t no = (in.length / static_cast<std::size_t>(l.pool)) * in.channels;
            c.adds = no * static_cast<std::uint64_t>(l.pool);
            break;
        }
        case LayerKind::max_pool:
        case LayerKind::relu:
            break;
    }
    return c;
}

namespace {

std::string describe(const nn::LayerSpec& l, const nn::ResolvedLayer& s) {
    std::ostringstream o;
    o << nn::to_string(l.kind);
    switch (l.kind) {
        case LayerKind::conv1d:
            o << " L=" << l.filter_len << " s=" << l.stride << " ch " << s.in.channels << "->" << s.out.channels
              << " K=" << s.out.length;
            break;
        case LayerKind::avg_pool:
        case LayerKind::max_pool: o << " p=" << l.pool << " -> (" << s.out.length << "," << s.out.channels << ")"; break;
        case LayerKind::dense:
        case LayerKind::linear_out: o << " " << s.in.size() << "->" << s.out.size(); break;
        case LayerKind::relu: o << " (" << s.out.length << "," << s.out.channels << ")"; break;
    }
    return o.str();
}

}  // namespace

CostReport model_flops(const nn::ModelSpec& spec) {
    CostReport r;
    if (spec.layers.empty()) {
        return r;
    }
    const auto shapes = nn::resolve_chain(spec);
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        CostLine line{describe(spec.layers[i], shapes[i]), layer_flops(spec.layers[i], shapes[i].in)};
        r.total += line.ops;
        r.lines.push_back(std::move(line));
    }
    return r;
}

namespace {

OpCount fft_cost(std::size_t n_fft) {
    if (!sigproc::is_power_of_two(n_fft)) {
        throw std::invalid_argument("expert_cfo_flops: n_fft must be a power of two");
    }
    // Radix-2: (N/2) log2 N butterflies of one complex multiply and two
    // complex adds, i.e. 2 N log2 N multiplies and 3 N log2 N adds.
    const std::uint64_t n = n_fft;
    const std::uint64_t lg = static_cast<std::uint64_t>(std::countr_zero(n_fft));
    return {2 * n * lg, 3 * n * lg};
}

std::uint64_t searched_bins(std::size_t n_fft, int m, double fs, double band) {
    const double limit = band * m;
    std::uint64_t bins = 0;
    const auto n = static_cast<std::int64_t>(n_fft);
    for (std::int64_t j = 0; j < n; ++j) {
        const std::int64_t sj = j < n / 2 ? j : j - n;
        if (std::abs(static_cast<double>(sj) * fs / static_cast<double>(n)) <= limit) {
            ++bins;
        }
    }
    return bins;
}

}  // namespace

CostReport expert_cfo_flops(std::size_t n_input, std::size_t n_fft, int m, CfoConvention conv, double fs,
                            double band) {
    if (m < 1) {
        throw std::invalid_argument("expert_cfo_flops: power m must be positive");
    }
    if (n_input > n_fft) {
        throw std::invalid_argument("expert_cfo_flops: input longer than the FFT");
    }
    CostReport r;
    r.lines.push_back({"fft", fft_cost(n_fft)});
    if (conv == CfoConvention::itemized) {
        const std::uint64_t cm = static_cast<std::uint64_t>(m - 1) * n_input;
        r.lines.push_back({"mth_power", {4 * cm, 2 * cm}});
        const std::uint64_t bins = searched_bins(n_fft, m, fs, band);
        r.lines.push_back({"magnitude_argmax", {2 * bins, bins}});
    } else {
        r.lines.push_back({"bins", {n_fft, n_fft}});
    }
    for (const auto& l : r.lines) {
        r.total += l.ops;
    }
    return r;
}

CostReport expert_timing_flops(std::size_t n_samples, std::size_t template_len, TimingConvention conv) {
    if (template_len == 0 || template_len > n_samples) {
        throw std::invalid_argument("expert_timing_flops: template must be non-empty and no longer than the input");
    }
    CostReport r;
    const std::uint64_t t = template_len;
    if (conv == TimingConvention::valid_lags) {
        const std::uint64_t lags = n_samples - template_len + 1;
        r.lines.push_back({"correlation", {4 * lags * t, 2 * lags * t}});
        r.lines.push_back({"magnitude", {2 * lags, lags}});
    } else {
        const std::uint64_t lags = n_samples;
        r.lines.push_back({"correlation", {4 * lags * t, 0}});
        r.lines.push_back({"magnitude", {2 * lags, lags}});
    }
    for (const auto& l : r.lines) {
        r.total += l.ops;
    }
    return r;
}

std::string format_table(const CostReport& r, const std::string& title) {
    std::size_t w = 5;
    for (const auto& l : r.lines) {
        w = std::max(w, l.name.size());
    }
    std::ostringstream o;
    o << title << "\n";
    o << std::left << std::setw(static_cast<int>(w)) << "layer" << std::right << std::setw(14) << "mul"
      << std::setw(14) << "add" << std::setw(14) << "total" << "\n";
    auto row = [&](const std::string& name, const OpCount& c) {
        o << std::left << std::setw(static_cast<int>(w)) << name << std::right << std::setw(14) << c.multiplies
          << std::setw(14) << c.adds << std::setw(14) << c.total() << "\n";
    };
    for (const auto& l : r.lines) {
        row(l.name, l.ops);
    }
    row("total", r.total);
    o << "(" << std::fixed << std::setprecision(4) << static_cast<double>(r.total.total()) / 1e6
      << " MFlop; relu and max-pool comparisons not counted)\n";
    return o.str();
}

std::string format_csv(const CostReport& r) {
    std::ostringstream o;
    o << "layer,mul,add,total\n";
    auto quoted = [](const std::string& s) {
        return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
    };
    for (const auto& l : r.lines) {
        o << quoted(l.name) << "," << l.ops.multiplies << "," << l.ops.adds << "," << l.ops.total() << "\n";
    }
    o << "total," << r.total.multiplies << "," << r.total.adds << "," << r.total.total() << "\n";
    return o.str();
}

}  // namespace burstsync::complexity
