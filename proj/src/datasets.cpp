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

#include "burstsync/datasets.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "burstsync/dataset_io.hpp"
#include "burstsync/parallel.hpp"
#include "burstsync/sigproc.hpp"

namespace burstsync::datasets {

namespace fs = std::filesystem;

std::string to_string(Task t) {
    return t == Task::cfo ? "cfo" : "timing";
}

std::string to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

Task parse_task(const std::string& s) {
    if (s == "cfo") return Task::cfo;
    if (s == "timing") return Task::timing;
    throw std::invalid_argument("unknown task '" + s + "' (expected cfo or timing)");
}

void DatasetHeader::validate() const {
    if (example_count == 0) {
        throw std::invalid_argument("DatasetHeader: example_count must be positive");
    }
    if (block_len == 0) {
        throw std::invalid_argument("DatasetHeader: block_len must be positive");
    }
    channel.validate();
    burst.validate();
    if (task == Task::timing) {
        if (burst.preamble_symbols.size() != static_cast<std::size_t>(kPreambleSymbols)) {
            throw std::invalid_argument("DatasetHeader: timing task needs a 64-symbol preamble");
        }
        if (block_len != static_cast<std::uint32_t>(kTimingInputLen)) {
            throw std::invalid_argument("DatasetHeader: timing examples are 2048 samples");
        }
    }
}

BurstSpec cfo_burst_spec() {
    BurstSpec s;
    s.n_data_symbols = 0;
    return s;
}

BurstSpec timing_burst_spec(std::uint64_t preamble_seed) {
    BurstSpec s;
    s.n_data_symbols = 256;
    s.preamble_symbols = make_preamble(preamble_seed, kPreambleSymbols, s.modulation_order);
    return s;
}

int cfo_burst_symbols(const BurstSpec& spec, std::size_t block_len) {
    if (spec.n_data_symbols > 0) {
        return spec.n_data_symbols;
    }
    const auto sps = static_cast<std::size_t>(spec.sps);
    return static_cast<int>((block_len + sps - 1) / sps) + spec.span_symbols;
}

namespace {

std::vector<int> random_symbols(std::size_t n, int order, Rng& rng) {
    std::vector<int> s(n);
    for (int& v : s) {
        v = static_cast<int>(rng.uniform_int(0, order - 1));
    }
    return s;
}

// Rounds samples to float32 so in-memory examples equal their stored form.
void quantize(IqBuffer& x) {
    for (auto& s : x.samples) {
        s = {static_cast<double>(static_cast<float>(s.real())),
             static_cast<double>(static_cast<float>(s.imag()))};
    }
}

double draw_cfo(Rng& rng) {
    double f = rng.uniform(-kMaxCfoHz, kMaxCfoHz);
    while (f == -kMaxCfoHz) {
        f = rng.uniform(-kMaxCfoHz, kMaxCfoHz);
    }
    return f;
}

}  // namespace

LabeledExample gen_cfo_example(const BurstSpec& spec, const channel::ChannelConfig& chan,
                               std::size_t block_len, Rng& rng) {
    spec.validate();
    chan.validate();
    if (block_len < 32) {
        throw std::invalid_argument("gen_cfo_example: block_len must be at least 32");
    }
    const int n_sym = cfo_burst_symbols(spec, block_len);
    const auto transient = static_cast<std::size_t>(2 * spec.half_transient());
    if (static_cast<std::size_t>(n_sym) * static_cast<std::size_t>(spec.sps) < block_len) {
        throw std::invalid_argument("gen_cfo_example: block_len exceeds the synthesized burst");
    }

    const std::vector<int> symbols = random_symbols(static_cast<std::size_t>(n_sym),
                                                    spec.modulation_order, rng);
    IqBuffer x = sigproc::modulate_psk(symbols, spec.modulation_order, spec.pulse(), spec.sample_rate_hz);

    LabeledExample ex;
    if (chan.fading == channel::FadingKind::rayleigh) {
        const auto h = channel::rayleigh_taps(chan.sigma, rng);
        x = channel::apply_channel(x, h);
        ex.meta.fading_taps = static_cast<std::uint32_t>(h.taps.size());
    }
    const double cfo = draw_cfo(rng);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    x = channel::apply_phase(channel::apply_cfo(x, cfo), phase);

    IqBuffer block;
    block.sample_rate_hz = x.sample_rate_hz;
    block.samples.assign(x.samples.begin() + static_cast<std::ptrdiff_t>(transient),
                         x.samples.begin() + static_cast<std::ptrdiff_t>(transient + block_len));
    if (!chan.noiseless()) {
        const double p = channel::mean_power(block, 0, block.size());
        block = channel::awgn_with_reference(block, chan.snr_db, p, rng);
    }
    quantize(block);

    ex.iq = std::move(block);
    ex.label = cfo;
    ex.meta.cfo_hz = cfo;
    ex.meta.phase_rad = phase;
    return ex;
}

LabeledExample gen_timing_example(const BurstSpec& spec, const channel::ChannelConfig& chan, Rng& rng) {
    spec.validate();
    chan.validate();
    if (spec.preamble_symbols.size() != static_cast<std::size_t>(kPreambleSymbols)) {
        throw std::invalid_argument("gen_timing_example: preamble must have 64 symbols");
    }
    const auto pad = static_cast<std::size_t>(rng.uniform_int(0, kMaxTimingPad));

    std::vector<int> symbols = spec.preamble_symbols;
    const std::vector<int> data = random_symbols(static_cast<std::size_t>(spec.n_data_symbols),
                                                 spec.modulation_order, rng);
    symbols.insert(symbols.end(), data.begin(), data.end());
    const IqBuffer w = sigproc::modulate_psk(symbols, spec.modulation_order, spec.pulse(), spec.sample_rate_hz);

    constexpr auto total = static_cast<std::size_t>(kTimingInputLen);
    IqBuffer x;
    x.sample_rate_hz = spec.sample_rate_hz;
    x.samples.assign(total, cdouble{});
    const std::size_t burst_end = std::min(total, pad + w.size());
    std::copy(w.samples.begin(), w.samples.begin() + static_cast<std::ptrdiff_t>(burst_end - pad),
              x.samples.begin() + static_cast<std::ptrdiff_t>(pad));

    LabeledExample ex;
    if (chan.fading == channel::FadingKind::rayleigh) {
        const auto h = channel::rayleigh_taps(chan.sigma, rng);
        x = channel::apply_channel(x, h);
        ex.meta.fading_taps = static_cast<std::uint32_t>(h.taps.size());
    }
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    x = channel::apply_phase(x, phase);
    if (!chan.noiseless()) {
        // Pad and tail noise share the variance referenced to the burst.
        const double p = channel::mean_power(x, pad, burst_end);
        x = channel::awgn_with_reference(x, chan.snr_db, p, rng);
    }
    quantize(x);

    ex.iq = std::move(x);
    ex.label = static_cast<double>(pad);
    ex.meta.pad_samples = static_cast<std::uint32_t>(pad);
    ex.meta.phase_rad = phase;
    return ex;
}

std::uint64_t example_seed(const DatasetHeader& h, std::uint64_t index) {
    return derive_seed(h.global_seed,
                       {static_cast<std::uint64_t>(h.task), h.block_len, double_bits(h.channel.snr_db),
                        static_cast<std::uint64_t>(h.channel.fading),
                        double_bits(h.channel.fading == channel::FadingKind::rayleigh ? h.channel.sigma : 0.0),
                        static_cast<std::uint64_t>(h.split), index});
}

LabeledExample generate_example(const DatasetHeader& h, std::uint64_t index) {
    const std::uint64_t seed = example_seed(h, index);
    Rng rng(seed);
    LabeledExample ex = h.task == Task::cfo ? gen_cfo_example(h.burst, h.channel, h.block_len, rng)
                                            : gen_timing_example(h.burst, h.channel, rng);
    ex.meta.example_seed = seed;
    return ex;
}

Dataset generate_cell(const DatasetHeader& h, int threads) {
    h.validate();
    Dataset d;
    d.header = h;
    d.examples.resize(h.example_count);
    parallel_for(static_cast<std::size_t>(h.example_count), threads,
                 [&](std::size_t, std::size_t i) { d.examples[i] = generate_example(h, i); });
    return d;
}

std::string snr_token(double snr_db) {
    if (snr_db == std::numeric_limits<double>::infinity()) {
        return "inf";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, snr_db);
    return std::string(buf, res.ptr);
}

std::string cell_file_name(Task task, std::uint32_t block_len, const channel::ChannelConfig& chan,
                           Split split) {
    return to_string(task) + "_" + channel::channel_name(chan) + "_" + snr_token(chan.snr_db) + "_n" +
           std::to_string(block_len) + "_" + to_string(split) + ".ceb";
}

DatasetHeader cell_header(const GridConfig& g, std::uint32_t block_len,
                          const channel::ChannelConfig& chan, double snr_db, Split split) {
    DatasetHeader h;
    h.task = g.task;
    h.split = split;
    h.channel = chan;
    h.channel.snr_db = snr_db;
    h.channel.seed = g.seed;
    h.pdp_model = chan.fading == channel::FadingKind::rayleigh ? kPdpExponential : kPdpNone;
    h.global_seed = g.seed;
    if (g.task == Task::cfo) {
        h.block_len = block_len;
        h.burst = cfo_burst_spec();
        h.burst.n_data_symbols = cfo_burst_symbols(h.burst, block_len);
    } else {
        h.block_len = static_cast<std::uint32_t>(kTimingInputLen);
        h.burst = timing_burst_spec(g.seed);
    }
    switch (split) {
        case Split::train: h.example_count = g.n_train; break;
        case Split::val: h.example_count = g.n_val; break;
        case Split::test: h.example_count = g.n_test; break;
    }
    return h;
}

std::vector<fs::path> generate_grid(const GridConfig& g, const fs::path& out_dir) {
    if (g.n_train == 0 || g.n_val == 0 || g.n_test == 0) {
        throw std::invalid_argument("generate_grid: split sizes must be positive");
    }
    std::vector<std::uint32_t> lens = g.block_lens;
    if (g.task == Task::timing) {
        lens = {static_cast<std::uint32_t>(kTimingInputLen)};
    }
    std::vector<std::pair<DatasetHeader, fs::path>> cells;
    for (std::uint32_t len : lens) {
        for (const auto& chan : g.channels) {
            for (double snr : g.snrs) {
                for (Split split : {Split::train, Split::val, Split::test}) {
                    DatasetHeader h = cell_header(g, len, chan, snr, split);
                    h.validate();
                    cells.emplace_back(h, out_dir / cell_file_name(g.task, h.block_len, h.channel, split));
                }
            }
        }
    }
    if (!g.force) {
        for (const auto& [h, path] : cells) {
            if (fs::exists(path)) {
                throw OverwriteError("refusing to overwrite " + path.string() + " (use force)");
            }
        }
    }
    fs::create_directories(out_dir);

    // Cells are independent; each file has a single writer.
    parallel_for(cells.size(), g.threads, [&](std::size_t, std::size_t i) {
        write_dataset(cells[i].second, generate_cell(cells[i].first, 1));
    });
    std::vector<fs::path> out;
    for (const auto& c : cells) {
        out.push_back(c.second);
    }
    return out;
}

}  // namespace burstsync::datasets
