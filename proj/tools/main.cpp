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

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "burstsync/complexity.hpp"
#include "burstsync/dataset_io.hpp"
#include "burstsync/datasets.hpp"
#include "burstsync/eval.hpp"
#include "burstsync/nn/model_io.hpp"
#include "burstsync/nn/train.hpp"
#include "cli_schema.hpp"

namespace fs = std::filesystem;
using namespace burstsync;
using namespace burstsync::cli;

namespace {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

const FlagSpec& flag_spec(std::string_view command, std::string_view name) {
    for (const auto& f : kFlags) {
        if (f.command == command && f.name == name) {
            return f;
        }
    }
    throw std::logic_error("flag --" + std::string(name) + " missing from the schema");
}

template <class T>
struct is_vector : std::false_type {};
template <class T>
struct is_vector<std::vector<T>> : std::true_type {};

template <class T>
CLI::Option* add(CLI::App& app, std::string_view command, std::string_view name, T& var) {
    const FlagSpec& f = flag_spec(command, name);
    CLI::Option* o = nullptr;
    if constexpr (std::is_same_v<T, bool>) {
        o = app.add_flag("--" + std::string(name), var, std::string(f.help));
    } else {
        o = app.add_option("--" + std::string(name), var, std::string(f.help));
    }
    if constexpr (is_vector<T>::value) {
        o->delimiter(',');
    }
    if (!f.default_value.empty()) {
        o->default_val(std::string(f.default_value));
    }
    return o;
}

std::string env_name(std::string_view flag) {
    std::string s(kEnvPrefix);
    for (char c : flag) {
        s += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Flat key=value file. Keys are flag names, optionally scoped as
// "command.flag"; '#' starts a comment.
std::map<std::string, std::string> read_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::map<std::string, std::string> out;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(n) + ": expected key=value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string scope;
        std::string name = key;
        if (const auto dot = key.find('.'); dot != std::string::npos) {
            scope = key.substr(0, dot);
            name = key.substr(dot + 1);
        }
        const bool known = std::any_of(std::begin(kFlags), std::end(kFlags), [&](const FlagSpec& f) {
            return f.name == name && (scope.empty() || f.command == scope);
        });
        if (!known || name == "config") {
            throw ConfigError(path.string() + ":" + std::to_string(n) + ": unknown key '" + key + "'");
        }
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

// Fills every flag not given on the command line from the environment,
// then from the config file.
void apply_layers(CLI::App& app, const std::string& command, const std::map<std::string, std::string>& config) {
    for (CLI::Option* o : app.get_options()) {
        const std::string name = o->get_single_name();
        if (o->count() > 0 || name == "help" || name == "config") {
            continue;
        }
        std::optional<std::string> value;
        if (const char* e = std::getenv(env_name(name).c_str()); e != nullptr && *e != '\0') {
            value = e;
        } else if (auto it = config.find(command + "." + name); it != config.end()) {
            value = it->second;
        } else if (auto it2 = config.find(name); it2 != config.end()) {
            value = it2->second;
        }
        if (value) {
            o->clear();
            o->add_result(*value);
            o->run_callback();
        }
    }
}

std::string resolved_value(const CLI::Option* o) {
    if (o->count() == 0) {
        return o->get_default_str();
    }
    std::string s;
    for (const auto& r : o->results()) {
        s += (s.empty() ? "" : ",") + r;
    }
    return s;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunContext {
    CLI::App* app = nullptr;
    CLI::App* sub = nullptr;
    std::string config_path;
    std::string start;
};

void append_manifest(const fs::path& dir, const RunContext& ctx, std::uint64_t seed,
                     const std::vector<fs::path>& artifacts) {
    fs::create_directories(dir);
    std::ofstream f(dir / std::string(kManifestName), std::ios::app);
    f << "[run]\n";
    f << "subcommand=" << ctx.sub->get_name() << "\n";
    f << "software_version=" << datasets::kGeneratorVersion << "\n";
    f << "start=" << ctx.start << "\n";
    f << "config_file=" << ctx.config_path << "\n";
    for (const CLI::App* a : {ctx.app, ctx.sub}) {
        for (const CLI::Option* o : a->get_options()) {
            const std::string name = o->get_single_name();
            if (name != "help" && name != "config") {
                f << "config." << name << "=" << resolved_value(o) << "\n";
            }
        }
    }
    f << "seed=" << seed << "\n";
    for (const auto& p : artifacts) {
        f << "artifact=" << p.string() << "\n";
    }
    f << "end=" << utc_now() << "\n\n";
    if (!f) {
        throw std::runtime_error("cannot write manifest in " + dir.string());
    }
}

std::string shortest(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

nn::ArchHyper make_hyper(nn::Arch arch, std::size_t nsamp, const std::vector<std::string>& conv, int avg_pool,
                         const std::vector<int>& max_pool) {
    nn::ArchHyper h = nn::default_hyper(arch, nsamp);
    if (!conv.empty()) {
        h.convs.clear();
        for (const auto& c : conv) {
            const auto colon = c.find(':');
            nn::ConvHyper ch;
            const char* end = c.data() + c.size();
            const bool ok = colon != std::string::npos &&
                            std::from_chars(c.data(), c.data() + colon, ch.filter_len).ptr == c.data() + colon &&
                            std::from_chars(c.data() + colon + 1, end, ch.stride).ptr == end;
            if (!ok || ch.filter_len < 1 || ch.stride < 1) {
                throw ConfigError("bad --conv entry '" + c + "' (expected L:s)");
            }
            h.convs.push_back(ch);
        }
    }
    h.avg_pool = avg_pool;
    if (!max_pool.empty()) {
        h.max_pool = max_pool;
    }
    return h;
}

std::string canonical_channel(const std::string& name) {
    return channel::channel_name(channel::parse_channel_name(name));
}

void refuse_existing(const std::vector<fs::path>& paths, bool force) {
    if (force) {
        return;
    }
    for (const auto& p : paths) {
        if (fs::exists(p)) {
            throw datasets::OverwriteError("refusing to overwrite " + p.string() + " (use --force)");
        }
    }
}

struct GenerateArgs {
    std::string task;
    std::vector<std::uint32_t> block_lens;
    std::vector<std::string> channels;
    std::vector<double> snrs;
    std::uint64_t n = 0;
    std::uint64_t n_val = 0;
    std::uint64_t n_test = 0;
    std::uint64_t seed = 0;
    std::string out;
};

struct TrainArgs {
    std::string task;
    std::string data_dir;
    std::string channel;
    double snr = 0;
    std::uint32_t block_len = 0;
    std::string train_file;
    std::string val_file;
    std::string loss;
    double lr = 0;
    int epochs = 0;
    int patience = 0;
    double lr_factor = 0;
    std::size_t batch_size = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> conv;
    int avg_pool = 0;
    std::vector<int> max_pool;
    std::string out;
};

struct EvalArgs {
    std::string task;
    std::string data_dir;
    std::string models_dir;
    std::string out;
    std::vector<std::uint32_t> block_lens;
    std::vector<std::string> channels;
    std::vector<double> snrs;
    bool expert_only = false;
    std::size_t n_fft = 0;
    std::string reference;
};

struct FlopsArgs {
    std::string arch;
    std::size_t nsamp = 0;
    std::vector<std::string> conv;
    int avg_pool = 0;
    std::vector<int> max_pool;
    std::string expert;
    std::size_t n_input = 0;
    std::size_t n_fft = 0;
    int m = 0;
    std::size_t template_len = 0;
    std::string cfo_convention;
    std::string timing_convention;
    std::string format;
    std::string out;
};

struct GlobalArgs {
    std::string config;
    int threads = 1;
    bool force = false;
};

int cmd_generate(const GenerateArgs& a, const GlobalArgs& g, const RunContext& ctx) {
    datasets::GridConfig grid;
    grid.task = datasets::parse_task(a.task);
    grid.block_lens = a.block_lens;
    grid.snrs = a.snrs;
    grid.channels.clear();
    for (const auto& c : a.channels) {
        grid.channels.push_back(channel::parse_channel_name(c));
    }
    grid.n_train = a.n;
    grid.n_val = a.n_val;
    grid.n_test = a.n_test;
    grid.seed = a.seed;
    grid.force = g.force;
    grid.threads = g.threads;
    const auto files = datasets::generate_grid(grid, a.out);
    for (const auto& f : files) {
        std::cout << f.string() << "\n";
    }
    append_manifest(a.out, ctx, a.seed, files);
    return kExitOk;
}

int cmd_train(const TrainArgs& a, const GlobalArgs& g, const RunContext& ctx) {
    const datasets::Task task = datasets::parse_task(a.task);
    channel::ChannelConfig chan = channel::parse_channel_name(a.channel);
    chan.snr_db = a.snr;
    const std::uint32_t len = task == datasets::Task::timing ? static_cast<std::uint32_t>(kTimingInputLen) : a.block_len;
    const fs::path data_dir = a.data_dir;
    const fs::path train_path = a.train_file.empty()
                                    ? data_dir / datasets::cell_file_name(task, len, chan, datasets::Split::train)
                                    : fs::path(a.train_file);
    const fs::path val_path = a.val_file.empty()
                                  ? data_dir / datasets::cell_file_name(task, len, chan, datasets::Split::val)
                                  : fs::path(a.val_file);

    nn::TrainConfig cfg;
    cfg.loss = nn::parse_loss(a.loss);
    cfg.lr_init = a.lr;
    cfg.epochs = a.epochs;
    cfg.plateau_patience = a.patience;
    cfg.lr_factor = a.lr_factor;
    cfg.batch_size = a.batch_size;
    cfg.seed = a.seed;
    cfg.threads = g.threads;
    cfg.validate();

    const datasets::Dataset tr = datasets::read_dataset(train_path);
    const datasets::Dataset va = datasets::read_dataset(val_path);
    if (tr.header.task != task || va.header.task != task) {
        throw datasets::DatasetFormatError("dataset task does not match --task " + a.task);
    }
    if (va.header.block_len != tr.header.block_len) {
        throw datasets::DatasetFormatError("training and validation block lengths differ");
    }
    const std::uint32_t n = tr.header.block_len;
    const nn::Arch arch = task == datasets::Task::cfo ? nn::Arch::cfo : nn::Arch::timing;
    const nn::ModelSpec spec = nn::build_model(arch, n, make_hyper(arch, n, a.conv, a.avg_pool, a.max_pool));

    const eval::CellKey key{task, channel::channel_name(tr.header.channel), tr.header.channel.snr_db, n};
    const fs::path out = a.out;
    const std::string model_name = eval::model_file_name(key);
    const fs::path model_path = out / model_name;
    const fs::path history_path = out / (model_name.substr(0, model_name.size() - 4) + "_history.csv");
    refuse_existing({model_path, history_path}, g.force);

    const auto train_set = nn::make_regression_set<float>(tr.examples, spec);
    const auto val_set = nn::make_regression_set<float>(va.examples, spec);
    std::cout << "training " << model_name << " on " << tr.examples.size() << " examples ("
              << nn::to_string(cfg.loss) << ", " << cfg.epochs << " epochs)\n";
    const auto result = nn::train(spec, train_set, val_set, cfg, [&](const nn::EpochRecord& r) {
        std::cout << "epoch " << r.epoch << " train_loss=" << r.train_loss << " val_loss=" << r.val_loss
                  << " lr=" << r.lr << std::endl;
    });

    nn::TrainingHeader header;
    header.config = cfg;
    header.best_epoch = result.best_epoch;
    header.best_val_loss = result.best_val_loss;
    header.cell = {datasets::to_string(task), key.channel,         key.snr_db,
                   n,                         tr.header.global_seed, tr.header.generator_version,
                   tr.header.example_count};
    fs::create_directories(out);
    nn::save_model(model_path, result.best, header);
    {
        std::ofstream h(history_path, std::ios::trunc);
        h << "epoch,train_loss,val_loss,lr\n";
        for (const auto& r : result.history) {
            h << r.epoch << "," << shortest(r.train_loss) << "," << shortest(r.val_loss) << "," << shortest(r.lr)
              << "\n";
        }
        if (!h) {
            throw std::runtime_error("cannot write " + history_path.string());
        }
    }
    std::cout << "best epoch " << result.best_epoch << " val_loss=" << result.best_val_loss << "\n";

    if (a.train_file.empty()) {
        const fs::path test_path = data_dir / datasets::cell_file_name(task, len, chan, datasets::Split::test);
        if (fs::exists(test_path)) {
            const auto test = datasets::read_dataset(test_path);
            const auto stats = eval::evaluate_estimator(
                [&](const IqBuffer& x) { return nn::predict(result.best, x); }, test.examples, g.threads);
            std::cout << "test error std " << stats.std_error << (task == datasets::Task::cfo ? " Hz" : " samples")
                      << " over " << stats.count << " examples\n";
        }
    }
    std::cout << model_path.string() << "\n" << history_path.string() << "\n";
    append_manifest(out, ctx, a.seed, {model_path, history_path});
    return kExitOk;
}

int cmd_eval(const EvalArgs& a, const GlobalArgs& g, const RunContext& ctx) {
    eval::SweepConfig sc;
    sc.task = datasets::parse_task(a.task);
    sc.block_lens = a.block_lens;
    sc.channels.clear();
    for (const auto& c : a.channels) {
        sc.channels.push_back(canonical_channel(c));
    }
    sc.snrs = a.snrs;
    sc.data_dir = a.data_dir;
    sc.out_dir = a.out;
    sc.expert_only = a.expert_only;
    sc.cfo_expert.n_fft = a.n_fft;
    sc.cfo_expert.validate();
    sc.threads = g.threads;

    std::vector<fs::path> outputs;
    for (const auto& c : sc.channels) {
        for (double s : sc.snrs) {
            outputs.push_back(sc.out_dir / eval::sweep_file_name(sc.task, c, s));
        }
    }
    const std::string reference = canonical_channel(a.reference);
    const bool compare = sc.channels.size() >= 2 &&
                         std::find(sc.channels.begin(), sc.channels.end(), reference) != sc.channels.end();
    const fs::path compare_path = sc.out_dir / (datasets::to_string(sc.task) + "_compare.csv");
    if (compare) {
        outputs.push_back(compare_path);
    }
    refuse_existing(outputs, g.force);

    const eval::ModelRegistry models =
        fs::is_directory(a.models_dir) ? eval::scan_models(a.models_dir) : eval::ModelRegistry{};
    const auto tables = eval::run_sweep(sc, models);
    for (const auto& t : tables) {
        std::cout << "== " << eval::sweep_file_name(t.task, t.channel, t.snr_db) << "\n" << eval::emit_csv(t);
    }
    if (compare) {
        const std::string text = eval::format_compare(eval::compare_report(tables, reference));
        std::ofstream f(compare_path, std::ios::trunc);
        f << text;
        std::cout << "== " << compare_path.filename().string() << "\n" << text;
    }
    append_manifest(sc.out_dir, ctx, 0, outputs);
    return kExitOk;
}

int cmd_flops(const FlopsArgs& a, const GlobalArgs& g, const RunContext& ctx) {
    const bool csv = a.format == "csv";
    std::ostringstream text;
    auto emit = [&](const complexity::CostReport& r, const std::string& title) {
        if (csv) {
            text << "# " << title << "\n" << complexity::format_csv(r);
        } else {
            text << complexity::format_table(r, title);
        }
        text << "\n";
    };
    if (a.arch != "none") {
        nn::ModelSpec spec;
        std::size_t nsamp = a.nsamp;
        if (a.arch == "empty") {
            spec.input = {nsamp == 0 ? 1024 : nsamp, 2};
        } else {
            const nn::Arch arch = nn::parse_arch(a.arch);
            if (nsamp == 0) {
                nsamp = arch == nn::Arch::cfo ? 1024 : static_cast<std::size_t>(kTimingInputLen);
            }
            spec = nn::build_model(arch, nsamp, make_hyper(arch, nsamp, a.conv, a.avg_pool, a.max_pool));
        }
        emit(complexity::model_flops(spec), "network " + a.arch + " nsamp=" + std::to_string(spec.input.length));
    }
    if (a.expert == "cfo") {
        const auto conv = a.cfo_convention == "fft_plus_bins" ? complexity::CfoConvention::fft_plus_bins
                                                              : complexity::CfoConvention::itemized;
        emit(complexity::expert_cfo_flops(a.n_input, a.n_fft, a.m, conv),
             "expert cfo n_input=" + std::to_string(a.n_input) + " n_fft=" + std::to_string(a.n_fft) + " (" +
                 a.cfo_convention + ")");
    } else if (a.expert == "timing") {
        const auto conv = a.timing_convention == "full_lags_mul_only" ? complexity::TimingConvention::full_lags_mul_only
                                                                       : complexity::TimingConvention::valid_lags;
        emit(complexity::expert_timing_flops(a.n_input, a.template_len, conv),
             "expert timing n_input=" + std::to_string(a.n_input) + " template=" + std::to_string(a.template_len) +
                 " (" + a.timing_convention + ")");
    }
    if (a.arch == "none" && a.expert == "none") {
        throw ConfigError("nothing to count: give --arch or --expert");
    }
    std::cout << text.str();
    if (!a.out.empty()) {
        const fs::path out = a.out;
        refuse_existing({out}, g.force);
        const fs::path dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
        fs::create_directories(dir);
        std::ofstream(out, std::ios::trunc) << text.str();
        append_manifest(dir, ctx, 0, {out});
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Burst synchronization workbench: dataset generation, CNN training, sweeps and FLOP counts",
                 "burstsync"};
    app.require_subcommand(1);
    app.fallthrough();
    app.get_formatter()->column_width(34);

    GlobalArgs g;
    add(app, "", "config", g.config);
    add(app, "", "threads", g.threads)->check(CLI::Range(1, 1024));
    add(app, "", "force", g.force);

    GenerateArgs ga;
    CLI::App* gen = app.add_subcommand("generate", "synthesize a dataset grid (train/val/test per cell)");
    add(*gen, "generate", "task", ga.task)->check(CLI::IsMember({"cfo", "timing"}));
    add(*gen, "generate", "block-len", ga.block_lens);
    add(*gen, "generate", "channel", ga.channels);
    add(*gen, "generate", "snr", ga.snrs);
    add(*gen, "generate", "n", ga.n);
    add(*gen, "generate", "n-val", ga.n_val);
    add(*gen, "generate", "n-test", ga.n_test);
    add(*gen, "generate", "seed", ga.seed);
    add(*gen, "generate", "out", ga.out);

    TrainArgs ta;
    CLI::App* trn = app.add_subcommand("train", "train the CNN estimator for one grid cell");
    add(*trn, "train", "task", ta.task)->check(CLI::IsMember({"cfo", "timing"}));
    add(*trn, "train", "data-dir", ta.data_dir);
    add(*trn, "train", "channel", ta.channel);
    add(*trn, "train", "snr", ta.snr);
    add(*trn, "train", "block-len", ta.block_len);
    add(*trn, "train", "train-file", ta.train_file);
    add(*trn, "train", "val-file", ta.val_file);
    add(*trn, "train", "loss", ta.loss)->check(CLI::IsMember({"mse", "mae", "logcosh", "huber"}));
    add(*trn, "train", "lr", ta.lr);
    add(*trn, "train", "epochs", ta.epochs);
    add(*trn, "train", "patience", ta.patience);
    add(*trn, "train", "lr-factor", ta.lr_factor);
    add(*trn, "train", "batch-size", ta.batch_size);
    add(*trn, "train", "seed", ta.seed);
    add(*trn, "train", "conv", ta.conv);
    add(*trn, "train", "avg-pool", ta.avg_pool);
    add(*trn, "train", "max-pool", ta.max_pool);
    add(*trn, "train", "out", ta.out);

    EvalArgs ea;
    CLI::App* evl = app.add_subcommand("eval", "sweep expert and learned estimators over the grid");
    add(*evl, "eval", "task", ea.task)->check(CLI::IsMember({"cfo", "timing"}));
    add(*evl, "eval", "data-dir", ea.data_dir);
    add(*evl, "eval", "models-dir", ea.models_dir);
    add(*evl, "eval", "out", ea.out);
    add(*evl, "eval", "block-len", ea.block_lens);
    add(*evl, "eval", "channel", ea.channels);
    add(*evl, "eval", "snr", ea.snrs);
    add(*evl, "eval", "expert-only", ea.expert_only);
    add(*evl, "eval", "n-fft", ea.n_fft);
    add(*evl, "eval", "reference", ea.reference);

    FlopsArgs fa;
    CLI::App* flp = app.add_subcommand("flops", "analytic FLOP counts for networks and expert estimators");
    add(*flp, "flops", "arch", fa.arch)->check(CLI::IsMember({"cfo", "timing", "empty", "none"}));
    add(*flp, "flops", "nsamp", fa.nsamp);
    add(*flp, "flops", "conv", fa.conv);
    add(*flp, "flops", "avg-pool", fa.avg_pool);
    add(*flp, "flops", "max-pool", fa.max_pool);
    add(*flp, "flops", "expert", fa.expert)->check(CLI::IsMember({"none", "cfo", "timing"}));
    add(*flp, "flops", "n-input", fa.n_input);
    add(*flp, "flops", "n-fft", fa.n_fft);
    add(*flp, "flops", "m", fa.m);
    add(*flp, "flops", "template-len", fa.template_len);
    add(*flp, "flops", "cfo-convention", fa.cfo_convention)->check(CLI::IsMember({"itemized", "fft_plus_bins"}));
    add(*flp, "flops", "timing-convention", fa.timing_convention)
        ->check(CLI::IsMember({"valid_lags", "full_lags_mul_only"}));
    add(*flp, "flops", "format", fa.format)->check(CLI::IsMember({"table", "csv"}));
    add(*flp, "flops", "out", fa.out);

    RunContext ctx;
    ctx.app = &app;
    ctx.start = utc_now();
    try {
        app.parse(argc, argv);
        ctx.sub = app.get_subcommands().front();
        std::string config_path = g.config;
        if (config_path.empty()) {
            if (const char* e = std::getenv(env_name("config").c_str()); e != nullptr) {
                config_path = e;
            }
        }
        const auto config = config_path.empty() ? std::map<std::string, std::string>{} : read_config(config_path);
        ctx.config_path = config_path;
        apply_layers(app, "", config);
        apply_layers(*ctx.sub, ctx.sub->get_name(), config);

        const std::string name = ctx.sub->get_name();
        if (name == "generate") return cmd_generate(ga, g, ctx);
        if (name == "train") return cmd_train(ta, g, ctx);
        if (name == "eval") return cmd_eval(ea, g, ctx);
        return cmd_flops(fa, g, ctx);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const eval::CellGapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& k : e.missing) {
            std::cerr << "  missing model: " << eval::model_file_name(k) << "\n";
        }
        return kExitCellGap;
    } catch (const nn::TrainingFault& e) {
        std::cerr << "training fault: " << e.what() << "\n";
        return kExitTrainingFault;
    } catch (const nn::NonFiniteError& e) {
        std::cerr << "training fault: " << e.what() << "\n";
        return kExitTrainingFault;
    } catch (const datasets::DatasetFormatError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const datasets::OverwriteError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const nn::ModelFormatError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const eval::FaultRateError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}
