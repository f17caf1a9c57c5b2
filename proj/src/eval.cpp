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

#include "burstsync/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <regex>
#include <set>
#include <sstream>

#include "burstsync/dataset_io.hpp"
#include "burstsync/nn/model_io.hpp"
#include "burstsync/nn/train.hpp"
#include "burstsync/parallel.hpp"

namespace burstsync::eval {

namespace fs = std::filesystem;

namespace {

// Neumaier compensated sum.
class Sum {
public:
    void add(double v) {
        const double t = s_ + v;
        if (std::abs(s_) >= std::abs(v)) {
            c_ += (s_ - t) + v;
        } else {
            c_ += (v - t) + s_;
        }
        s_ = t;
    }
    double value() const { return s_ + c_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

std::string fmt(double v) {
    if (v == std::numeric_limits<double>::infinity()) {
        return "inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    if (s == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw CsvError("not a number: '" + s + "'");
    }
    return v;
}

std::uint32_t parse_u32(const std::string& s) {
    std::uint32_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw CsvError("not a block length: '" + s + "'");
    }
    return v;
}

const char* unit(datasets::Task t) {
    return t == datasets::Task::cfo ? "Hz" : "samples";
}

}  // namespace

ErrorStats summarize(std::vector<double> residuals, std::size_t faults) {
    ErrorStats s;
    s.count = residuals.size();
    s.faults = faults;
    if (residuals.empty()) {
        s.residuals = std::move(residuals);
        return s;
    }
    std::vector<double> sorted = residuals;
    std::sort(sorted.begin(), sorted.end());
    Sum sum;
    Sum abs_sum;
    for (double e : sorted) {
        sum.add(e);
        abs_sum.add(std::abs(e));
    }
    const double n = static_cast<double>(sorted.size());
    s.mean_error = sum.value() / n;
    s.mean_abs_error = abs_sum.value() / n;
    Sum sq;
    for (double e : sorted) {
        const double d = e - s.mean_error;
        sq.add(d * d);
    }
    s.std_error = std::sqrt(sq.value() / n);
    s.residuals = std::move(residuals);
    return s;
}

ErrorStats evaluate_estimator(const Estimator& est, const std::vector<datasets::LabeledExample>& test, int threads) {
    if (test.empty()) {
        throw std::invalid_argument("evaluate_estimator: empty test set");
    }
    std::vector<double> res(test.size());
    std::vector<char> ok(test.size(), 0);
    parallel_for(test.size(), threads, [&](std::size_t, std::size_t i) {
        try {
            const double v = est(test[i].iq);
            if (std::isfinite(v)) {
                res[i] = v - test[i].label;
                ok[i] = 1;
            }
        } catch (const std::exception&) {
        }
    });
    std::vector<double> kept;
    kept.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (ok[i]) {
            kept.push_back(res[i]);
        }
    }
    const std::size_t faults = test.size() - kept.size();
    if (static_cast<double>(faults) > kMaxFaultRate * static_cast<double>(test.size()) || kept.empty()) {
        throw FaultRateError("estimator faulted on " + std::to_string(faults) + " of " +
                             std::to_string(test.size()) + " examples");
    }
    return summarize(std::move(kept), faults);
}

void write_residuals(const fs::path& path, const ErrorStats& s) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    f << "# residual = estimate - label; count=" << s.count << " faults=" << s.faults << "\n";
    for (double e : s.residuals) {
        f << fmt(e) << "\n";
    }
}

std::vector<double> read_residuals(const fs::path& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::vector<double> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        out.push_back(parse_double(line));
    }
    return out;
}

std::string emit_csv(const SweepTable& t) {
    std::ostringstream o;
    o << "# task=" << datasets::to_string(t.task) << " channel=" << t.channel << " snr=" << fmt(t.snr_db)
      << " unit=" << unit(t.task) << " stat=population_std\n";
    o << "len,ml,expert\n";
    for (const auto& r : t.rows) {
        o << r.len << "," << (r.ml ? fmt(*r.ml) : "") << "," << fmt(r.expert) << "\n";
    }
    return o.str();
}

SweepTable parse_csv(const std::string& text) {
    SweepTable t;
    std::istringstream in(text);
    std::string line;
    bool have_meta = false;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            std::istringstream ws(line.substr(1));
            std::string tok;
            while (ws >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) {
                    continue;
                }
                const std::string k = tok.substr(0, eq);
                const std::string v = tok.substr(eq + 1);
                if (k == "task") {
                    t.task = datasets::parse_task(v);
                    have_meta = true;
                } else if (k == "channel") {
                    t.channel = v;
                } else if (k == "snr") {
                    t.snr_db = parse_double(v);
                }
            }
            continue;
        }
        if (!have_header) {
            if (line != "len,ml,expert") {
                throw CsvError("expected header 'len,ml,expert', got '" + line + "'");
            }
            have_header = true;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
            throw CsvError("expected 3 fields in row '" + line + "'");
        }
        SweepRow r;
        r.len = parse_u32(line.substr(0, c1));
        const std::string ml = line.substr(c1 + 1, c2 - c1 - 1);
        if (!ml.empty()) {
            r.ml = parse_double(ml);
        }
        r.expert = parse_double(line.substr(c2 + 1));
        t.rows.push_back(r);
    }
    if (!have_header) {
        throw CsvError("missing 'len,ml,expert' header");
    }
    if (!have_meta) {
        throw CsvError("missing '# task=...' comment line");
    }
    return t;
}

std::string sweep_file_name(datasets::Task task, const std::string& channel, double snr_db) {
    return datasets::to_string(task) + "_" + channel + "_" + datasets::snr_token(snr_db) + ".csv";
}

std::string to_string(const CellKey& k) {
    return datasets::to_string(k.task) + "/" + k.channel + "/snr " + datasets::snr_token(k.snr_db) + "/n" +
           std::to_string(k.len);
}

std::string model_file_name(const CellKey& k) {
    return datasets::to_string(k.task) + "_" + k.channel + "_" + datasets::snr_token(k.snr_db) + "_n" +
           std::to_string(k.len) + ".cem";
}

ModelRegistry scan_models(const fs::path& dir) {
    ModelRegistry reg;
    static const std::regex pat(R"((cfo|timing)_(awgn|fading_[0-9.]+)_([0-9.]+|inf)_n([0-9]+)\.cem)");
    if (!fs::is_directory(dir)) {
        return reg;
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        std::smatch m;
        if (!std::regex_match(name, m, pat)) {
            continue;
        }
        CellKey k{datasets::parse_task(m[1]), m[2], parse_double(m[3]), parse_u32(m[4])};
        reg[k] = entry.path();
    }
    return reg;
}

std::vector<SweepTable> run_sweep(const SweepConfig& cfg, const ModelRegistry& models) {
    const bool timing = cfg.task == datasets::Task::timing;
    std::vector<std::uint32_t> lens = cfg.block_lens;
    if (timing) {
        lens = {static_cast<std::uint32_t>(kTimingInputLen)};
    }
    if (!cfg.expert_only) {
        std::vector<CellKey> missing;
        for (const auto& ch : cfg.channels) {
            for (double snr : cfg.snrs) {
                for (auto len : lens) {
                    CellKey k{cfg.task, ch, snr, len};
                    if (!models.contains(k)) {
                        missing.push_back(k);
                    }
                }
            }
        }
        if (!missing.empty()) {
            std::string msg = "no trained model for " + std::to_string(missing.size()) + " cell(s):";
            for (const auto& k : missing) {
                msg += " " + to_string(k);
            }
            throw CellGapError(msg, missing);
        }
    }

    fs::create_directories(cfg.out_dir);
    const fs::path res_dir = cfg.out_dir / "residuals";
    fs::create_directories(res_dir);
    std::vector<SweepTable> out;
    for (const auto& ch : cfg.channels) {
        for (double snr : cfg.snrs) {
            SweepTable table;
            table.task = cfg.task;
            table.channel = ch;
            table.snr_db = snr;
            channel::ChannelConfig chan = channel::parse_channel_name(ch);
            chan.snr_db = snr;
            for (auto len : lens) {
                const auto path = cfg.data_dir / datasets::cell_file_name(cfg.task, len, chan, datasets::Split::test);
                const datasets::Dataset test = datasets::read_dataset(path);
                const CellKey key{cfg.task, ch, snr, len};
                const std::string stem = model_file_name(key).substr(0, model_file_name(key).size() - 4);

                Estimator expert_est;
                std::optional<expert::CfoExpert> cfo_expert;
                std::optional<expert::TimingExpert> timing_expert;
                if (timing) {
                    timing_expert.emplace(test.header.burst.preamble_symbols, test.header.burst);
                    expert_est = [&](const IqBuffer& x) { return static_cast<double>(timing_expert->estimate(x)); };
                } else {
                    cfo_expert.emplace(cfg.cfo_expert);
                    expert_est = [&](const IqBuffer& x) { return cfo_expert->estimate(x); };
                }
                const ErrorStats es = evaluate_estimator(expert_est, test.examples, cfg.threads);
                write_residuals(res_dir / (stem + "_expert.txt"), es);

                SweepRow row;
                row.len = len;
                row.expert = es.std_error;
                if (!cfg.expert_only) {
                    const auto saved = nn::load_model<float>(models.at(key));
                    if (saved.model.spec.input.length != len) {
                        throw std::invalid_argument("model for " + to_string(key) + " expects " +
                                                    std::to_string(saved.model.spec.input.length) + " samples");
                    }
                    const Estimator ml_est = [&](const IqBuffer& x) { return nn::predict(saved.model, x); };
                    const ErrorStats ms = evaluate_estimator(ml_est, test.examples, cfg.threads);
                    write_residuals(res_dir / (stem + "_ml.txt"), ms);
                    row.ml = ms.std_error;
                }
                table.rows.push_back(row);
            }
            std::ofstream f(cfg.out_dir / sweep_file_name(cfg.task, ch, snr), std::ios::trunc);
            f << emit_csv(table);
            if (!f) {
                throw std::runtime_error("failed writing sweep CSV for " + ch);
            }
            out.push_back(std::move(table));
        }
    }
    return out;
}

CompareReport compare_report(const std::vector<SweepTable>& tables, const std::string& reference) {
    std::set<std::string> channels;
    for (const auto& t : tables) {
        channels.insert(t.channel);
    }
    if (channels.size() < 2 || !channels.contains(reference)) {
        throw GridMismatchError("compare_report: need the '" + reference + "' channel and at least one other");
    }
    auto winner = [](const SweepRow& r) -> std::string {
        if (!r.ml) {
            return "expert";
        }
        if (*r.ml < r.expert) return "ml";
        if (*r.ml > r.expert) return "expert";
        return "tie";
    };
    CompareReport rep;
    rep.reference = reference;
    for (const auto& t : tables) {
        if (t.channel == reference) {
            continue;
        }
        const auto ref = std::find_if(tables.begin(), tables.end(), [&](const SweepTable& r) {
            return r.channel == reference && r.snr_db == t.snr_db && r.task == t.task;
        });
        if (ref == tables.end()) {
            throw GridMismatchError("compare_report: no " + reference + " table at snr " +
                                    datasets::snr_token(t.snr_db));
        }
        if (ref->rows.size() != t.rows.size()) {
            throw GridMismatchError("compare_report: block lengths of " + t.channel + " and " + reference +
                                    " differ at snr " + datasets::snr_token(t.snr_db));
        }
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const SweepRow& a = ref->rows[i];
            const SweepRow& b = t.rows[i];
            if (a.len != b.len) {
                throw GridMismatchError("compare_report: block lengths of " + t.channel + " and " + reference +
                                        " differ at snr " + datasets::snr_token(t.snr_db));
            }
            CompareLine line;
            line.channel = t.channel;
            line.snr_db = t.snr_db;
            line.len = b.len;
            line.expert_ratio = b.expert / a.expert;
            if (a.ml && b.ml) {
                line.ml_ratio = *b.ml / *a.ml;
            }
            line.winner = winner(b);
            rep.lines.push_back(line);
        }
    }
    return rep;
}

std::string format_compare(const CompareReport& r) {
    std::ostringstream o;
    o << "degradation vs " << r.reference << " (error std ratio)\n";
    o << "channel,snr,len,ml_ratio,expert_ratio,winner\n";
    for (const auto& l : r.lines) {
        o << l.channel << "," << datasets::snr_token(l.snr_db) << "," << l.len << ","
          << (l.ml_ratio ? fmt(*l.ml_ratio) : "") << "," << fmt(l.expert_ratio) << "," << l.winner << "\n";
    }
    return o.str();
}

}  // namespace burstsync::eval
