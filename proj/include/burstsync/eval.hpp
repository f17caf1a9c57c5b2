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
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "burstsync/channel.hpp"
#include "burstsync/datasets.hpp"
#include "burstsync/expert.hpp"

namespace burstsync::eval {

struct ErrorStats {
    double mean_error = 0.0;
    double mean_abs_error = 0.0;
    // Population standard deviation of the residuals.
    double std_error = 0.0;
    std::size_t count = 0;
    std::size_t faults = 0;
    // estimate - label, in test-set order; faulted examples are omitted.
    std::vector<double> residuals;
};

class FaultRateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kMaxFaultRate = 0.01;

// Statistics over residuals. Computed on a sorted copy with compensated
// summation, so the result does not depend on input order.
ErrorStats summarize(std::vector<double> residuals, std::size_t faults = 0);

using Estimator = std::function<double(const IqBuffer&)>;

// Runs `est` on every example. An exception from the estimator counts as a
// fault and excludes that example; more than 1% faults throws FaultRateError.
ErrorStats evaluate_estimator(const Estimator& est, const std::vector<datasets::LabeledExample>& test,
                              int threads = 1);

void write_residuals(const std::filesystem::path& path, const ErrorStats& s);
std::vector<double> read_residuals(const std::filesystem::path& path);

struct SweepRow {
    std::uint32_t len = 0;
    std::optional<double> ml;  // empty in expert-only sweeps
    double expert = 0.0;
    bool operator==(const SweepRow&) const = default;
};

// One figure-data file: a (task, channel, snr) slice over block lengths.
struct SweepTable {
    datasets::Task task = datasets::Task::cfo;
    std::string channel;  // "awgn", "fading_0.5", ...
    double snr_db = 0.0;
    std::vector<SweepRow> rows;
    bool operator==(const SweepTable&) const = default;
};

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// "# task=cfo channel=awgn snr=10 unit=Hz stat=population_std" then
// "len,ml,expert" and one row per length. Numbers use the shortest
// representation that reads back exactly.
std::string emit_csv(const SweepTable& t);
SweepTable parse_csv(const std::string& text);
std::string sweep_file_name(datasets::Task task, const std::string& channel, double snr_db);

struct CellKey {
    datasets::Task task = datasets::Task::cfo;
    std::string channel;
    double snr_db = 0.0;
    std::uint32_t len = 0;
    auto operator<=>(const CellKey&) const = default;
};
std::string to_string(const CellKey& k);

// Model file name for a cell, "{task}_{channel}_{snr}_n{len}.cem".
std::string model_file_name(const CellKey& k);
using ModelRegistry = std::map<CellKey, std::filesystem::path>;
// Registers every file in `dir` named by model_file_name.
ModelRegistry scan_models(const std::filesystem::path& dir);

class CellGapError : public std::runtime_error {
public:
    CellGapError(const std::string& what, std::vector<CellKey> missing)
        : std::runtime_error(what), missing(std::move(missing)) {}
    std::vector<CellKey> missing;
};

struct SweepConfig {
    datasets::Task task = datasets::Task::cfo;
    std::vector<std::uint32_t> block_lens = {32, 64, 128, 256, 512, 1024};
    std::vector<std::string> channels = {"awgn", "fading_0.5", "fading_1", "fading_2"};
    std::vector<double> snrs = {0.0, 5.0, 10.0};
    std::filesystem::path data_dir;
    std::filesystem::path out_dir;
    bool expert_only = false;
    expert::CfoExpertConfig cfo_expert;
    int threads = 1;
};

// Evaluates every cell on its test split and writes one CSV per
// (channel, snr). Throws CellGapError, before doing any work, if a model
// is missing for some cell and expert_only is off.
std::vector<SweepTable> run_sweep(const SweepConfig& cfg, const ModelRegistry& models);

struct CompareLine {
    std::string channel;
    double snr_db = 0.0;
    std::uint32_t len = 0;
    std::optional<double> ml_ratio;  // channel error / reference error
    double expert_ratio = 0.0;
    std::string winner;  // "ml", "expert" or "tie" in this channel's cell
};

struct CompareReport {
    std::string reference;
    std::vector<CompareLine> lines;
};

class GridMismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Degradation of each estimator from the reference channel to every other
// channel at matched (snr, len).
CompareReport compare_report(const std::vector<SweepTable>& tables, const std::string& reference = "awgn");
std::string format_compare(const CompareReport& r);

}  // namespace burstsync::eval
