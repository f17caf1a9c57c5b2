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
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "burstsync/datasets.hpp"

namespace burstsync::datasets {

// Binary dataset format, little-endian throughout.
//
//   offset  size  field
//   0       4     magic "CEB1"
//   4       4     u32 format version
//   8       1     u8 task (0 cfo, 1 timing)
//   9       1     u8 split (0 train, 1 val, 2 test)
//   10      1     u8 fading (0 awgn, 1 rayleigh)
//   11      1     u8 power-delay-profile model (0 none, 1 exponential)
//   12      4     u32 block_len
//   16      8     u64 example_count
//   24      8     f64 snr_db (+inf when noiseless)
//   32      8     f64 sigma (mean delay spread, samples)
//   40      8     u64 global seed
//   48      8     f64 sample rate (Hz)
//   56      8     f64 symbol rate (Hz)
//   64      8     f64 RRC roll-off
//   72      4     u32 RRC span (symbols)
//   76      4     u32 samples per symbol
//   80      4     u32 data symbols per burst
//   84      4     u32 preamble length
//   88      64    u8[64] preamble symbols, zero-filled past the length
//   152     16    generator version, NUL-padded ASCII
//   168     4     u32 CRC-32 of the payload
//   172     4     u32 CRC-32 of header bytes [0, 172)
//   176           payload: example_count records of
//                   block_len x (f32 I, f32 Q)
//                   f64 label
//                   f64 phase_rad, f64 cfo_hz, u32 pad_samples,
//                   u32 fading_taps, u64 example_seed
inline constexpr std::size_t kHeaderSize = 176;
inline constexpr std::size_t kMetaSize = 32;
inline constexpr char kMagic[4] = {'C', 'E', 'B', '1'};

std::size_t record_size(std::uint32_t block_len);

class DatasetFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class BadMagicError : public DatasetFormatError {
public:
    using DatasetFormatError::DatasetFormatError;
};
class VersionMismatchError : public DatasetFormatError {
public:
    using DatasetFormatError::DatasetFormatError;
};
class CorruptHeaderError : public DatasetFormatError {
public:
    using DatasetFormatError::DatasetFormatError;
};
class TruncatedError : public DatasetFormatError {
public:
    using DatasetFormatError::DatasetFormatError;
};
class ChecksumError : public DatasetFormatError {
public:
    using DatasetFormatError::DatasetFormatError;
};
class MissingDatasetError : public DatasetFormatError {
public:
    using DatasetFormatError::DatasetFormatError;
};

std::vector<std::uint8_t> encode_header(const DatasetHeader& h, std::uint32_t payload_crc);
DatasetHeader decode_header(std::span<const std::uint8_t> bytes, std::uint32_t* payload_crc = nullptr);
void encode_record(const LabeledExample& ex, std::uint32_t block_len, std::vector<std::uint8_t>& out);

// Streams examples into a file. The header is written with a placeholder
// CRC and patched on close().
class DatasetWriter {
public:
    DatasetWriter(const std::filesystem::path& path, const DatasetHeader& header);
    ~DatasetWriter();
    DatasetWriter(const DatasetWriter&) = delete;
    DatasetWriter& operator=(const DatasetWriter&) = delete;

    void write(const LabeledExample& ex);
    void close();

private:
    std::ofstream out_;
    DatasetHeader header_;
    std::uint32_t crc_ = 0;
    std::uint64_t written_ = 0;
    std::vector<std::uint8_t> scratch_;
    bool closed_ = false;
};

// Streaming reader. The header (and its checksum) is validated on open;
// the payload checksum is verified once the last record has been read.
class DatasetReader {
public:
    explicit DatasetReader(const std::filesystem::path& path);

    const DatasetHeader& header() const { return header_; }
    // Next example in stored order, or nullopt at the end.
    std::optional<LabeledExample> next();

private:
    std::ifstream in_;
    DatasetHeader header_;
    std::uint32_t expected_crc_ = 0;
    std::uint32_t crc_ = 0;
    std::uint64_t read_ = 0;
    std::vector<std::uint8_t> scratch_;
};

void write_dataset(const std::filesystem::path& path, const Dataset& d);
Dataset read_dataset(const std::filesystem::path& path);
DatasetHeader read_header(const std::filesystem::path& path);

}  // namespace burstsync::datasets
