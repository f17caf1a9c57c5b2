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

#include <string_view>

namespace burstsync::cli {

// Every flag of the command-line tool with its default. The CLI takes its
// defaults from this table and the help test checks the two agree.
struct FlagSpec {
    std::string_view command;  // empty for global flags
    std::string_view name;
    std::string_view default_value;
    std::string_view help;
};

inline constexpr std::string_view kEnvPrefix = "BURSTSYNC_";
inline constexpr std::string_view kManifestName = "manifest.txt";

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitConfig = 2,
    kExitData = 3,
    kExitTrainingFault = 4,
    kExitCellGap = 5,
};

inline constexpr FlagSpec kFlags[] = {
    {"", "config", "", "flat key=value file; precedence: defaults < config < BURSTSYNC_* env < flags"},
    {"", "threads", "1", "worker threads; 1 gives bit-identical artifacts"},
    {"", "force", "false", "overwrite existing artifacts"},

    {"generate", "task", "cfo", "cfo or timing"},
    {"generate", "block-len", "32,64,128,256,512,1024", "block lengths in samples (timing always uses 2048)"},
    {"generate", "channel", "awgn,fading_0.5,fading_1,fading_2", "channels: awgn or fading_<sigma>"},
    {"generate", "snr", "0,5,10", "SNRs in dB (inf for noiseless)"},
    {"generate", "n", "20000", "training examples per cell"},
    {"generate", "n-val", "2000", "validation examples per cell"},
    {"generate", "n-test", "2000", "test examples per cell"},
    {"generate", "seed", "1", "global seed"},
    {"generate", "out", "data", "output directory"},

    {"train", "task", "cfo", "cfo or timing"},
    {"train", "data-dir", "data", "directory holding the generated cells"},
    {"train", "channel", "awgn", "cell channel"},
    {"train", "snr", "10", "cell SNR in dB"},
    {"train", "block-len", "1024", "cell block length (timing uses 2048)"},
    {"train", "train-file", "", "explicit training file (overrides the cell lookup)"},
    {"train", "val-file", "", "explicit validation file (overrides the cell lookup)"},
    {"train", "loss", "mse", "mse, mae, logcosh or huber"},
    {"train", "lr", "0.001", "initial Adam learning rate"},
    {"train", "epochs", "100", "training epochs"},
    {"train", "patience", "10", "epochs without improvement before the learning rate drops"},
    {"train", "lr-factor", "0.5", "learning-rate multiplier on a plateau"},
    {"train", "batch-size", "256", "minibatch size"},
    {"train", "seed", "1", "initialization and shuffling seed"},
    {"train", "conv", "", "conv overrides as L:s pairs, e.g. 16:2,8:2,8:2"},
    {"train", "avg-pool", "2", "cfo average-pool size"},
    {"train", "max-pool", "", "timing max-pool sizes per stage, e.g. 0,0,0,0"},
    {"train", "out", "models", "output directory for the model and its history CSV"},

    {"eval", "task", "cfo", "cfo or timing"},
    {"eval", "data-dir", "data", "directory holding the generated cells"},
    {"eval", "models-dir", "models", "directory holding trained models"},
    {"eval", "out", "results", "output directory for sweep CSVs"},
    {"eval", "block-len", "32,64,128,256,512,1024", "block lengths in samples (timing always uses 2048)"},
    {"eval", "channel", "awgn,fading_0.5,fading_1,fading_2", "channels to sweep"},
    {"eval", "snr", "0,5,10", "SNRs in dB"},
    {"eval", "expert-only", "false", "skip learned estimators (ml column left empty)"},
    {"eval", "n-fft", "131072", "expert CFO FFT size (power of two)"},
    {"eval", "reference", "awgn", "reference channel for degradation ratios"},

    {"flops", "arch", "timing", "network: cfo, timing, empty or none"},
    {"flops", "nsamp", "0", "network input length in samples (0 = 1024 for cfo, 2048 for timing)"},
    {"flops", "conv", "", "conv overrides as L:s pairs"},
    {"flops", "avg-pool", "2", "cfo average-pool size"},
    {"flops", "max-pool", "", "timing max-pool sizes per stage"},
    {"flops", "expert", "none", "expert estimator: none, cfo or timing"},
    {"flops", "n-input", "1024", "expert input length in samples"},
    {"flops", "n-fft", "65536", "expert CFO FFT size"},
    {"flops", "m", "4", "expert CFO power"},
    {"flops", "template-len", "256", "matched-filter template length"},
    {"flops", "cfo-convention", "itemized", "itemized or fft_plus_bins"},
    {"flops", "timing-convention", "valid_lags", "valid_lags or full_lags_mul_only"},
    {"flops", "format", "table", "table or csv"},
    {"flops", "out", "", "also write the report to this file"},
};

}  // namespace burstsync::cli
