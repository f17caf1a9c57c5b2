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

#include "burstsync/dataset_io.hpp"

#include <zlib.h>

#include <cstring>
#include <limits>

#include "bytes.hpp"

namespace burstsync::detail {

std::uint32_t crc32_update(std::uint32_t crc, std::span<const std::uint8_t> bytes) {
    // zlib takes uInt lengths; feed large buffers in chunks.
    const std::uint8_t* p = bytes.data();
    std::size_t n = bytes.size();
    uLong c = crc;
    while (n > 0) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1U << 30));
        c = ::crc32(c, p, chunk);
        p += chunk;
        n -= chunk;
    }
    return static_cast<std::uint32_t>(c);
}

}  // namespace burstsync::detail

namespace burstsync::datasets {

namespace fs = std::filesystem;
using detail::ByteReader;
using detail::ByteWriter;

namespace {
constexpr std::size_t kPreambleSlots = 64;
constexpr std::size_t kVersionField = 16;
constexpr std::size_t kHeaderCrcOffset = 172;
}  // namespace

std::size_t record_size(std::uint32_t block_len) {
    return static_cast<std::size_t>(block_len) * 8 + 8 + kMetaSize;
}

std::vector<std::uint8_t> encode_header(const DatasetHeader& h, std::uint32_t payload_crc) {
    if (h.burst.preamble_symbols.size() > kPreambleSlots) {
        throw std::invalid_argument("encode_header: preamble longer than 64 symbols");
    }
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderSize);
    ByteWriter w(out);
    w.put_bytes(kMagic, 4);
    w.put<std::uint32_t>(h.format_version);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(h.task));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(h.split));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(h.channel.fading));
    w.put<std::uint8_t>(h.pdp_model);
    w.put<std::uint32_t>(h.block_len);
    w.put<std::uint64_t>(h.example_count);
    w.put<double>(h.channel.snr_db);
    w.put<double>(h.channel.sigma);
    w.put<std::uint64_t>(h.global_seed);
    w.put<double>(h.burst.sample_rate_hz);
    w.put<double>(h.burst.symbol_rate_hz);
    w.put<double>(h.burst.beta);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(h.burst.span_symbols));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(h.burst.sps));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(h.burst.n_data_symbols));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(h.burst.preamble_symbols.size()));
    for (std::size_t i = 0; i < kPreambleSlots; ++i) {
        const int s = i < h.burst.preamble_symbols.size() ? h.burst.preamble_symbols[i] : 0;
        w.put<std::uint8_t>(static_cast<std::uint8_t>(s));
    }
    w.put_fixed(h.generator_version, kVersionField);
    w.put<std::uint32_t>(payload_crc);
    const std::uint32_t header_crc = detail::crc32_update(0, out);
    w.put<std::uint32_t>(header_crc);
    return out;
}

DatasetHeader decode_header(std::span<const std::uint8_t> bytes, std::uint32_t* payload_crc) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw BadMagicError("dataset: bad magic (not a CEB1 file)");
    }
    if (bytes.size() < kHeaderSize) {
        throw TruncatedError("dataset: truncated header");
    }
    ByteReader r(bytes);
    r.get<std::uint32_t>();
    DatasetHeader h;
    h.format_version = r.get<std::uint32_t>();
    if (h.format_version != kFormatVersion) {
        throw VersionMismatchError("dataset: format version " + std::to_string(h.format_version) +
                                   ", expected " + std::to_string(kFormatVersion));
    }
    const std::uint32_t stored_header_crc = [&] {
        std::uint32_t v;
        std::memcpy(&v, bytes.data() + kHeaderCrcOffset, 4);
        return v;
    }();
    if (detail::crc32_update(0, bytes.first(kHeaderCrcOffset)) != stored_header_crc) {
        throw CorruptHeaderError("dataset: header checksum mismatch");
    }
    const auto task = r.get<std::uint8_t>();
    const auto split = r.get<std::uint8_t>();
    const auto fading = r.get<std::uint8_t>();
    h.pdp_model = r.get<std::uint8_t>();
    if (task > 1 || split > 2 || fading > 1 || h.pdp_model > 1) {
        throw CorruptHeaderError("dataset: invalid enum field in header");
    }
    h.task = static_cast<Task>(task);
    h.split = static_cast<Split>(split);
    h.channel.fading = static_cast<channel::FadingKind>(fading);
    h.block_len = r.get<std::uint32_t>();
    h.example_count = r.get<std::uint64_t>();
    h.channel.snr_db = r.get<double>();
    h.channel.sigma = r.get<double>();
    h.global_seed = r.get<std::uint64_t>();
    h.channel.seed = h.global_seed;
    h.burst.sample_rate_hz = r.get<double>();
    h.burst.symbol_rate_hz = r.get<double>();
    h.burst.beta = r.get<double>();
    h.burst.span_symbols = static_cast<int>(r.get<std::uint32_t>());
    h.burst.sps = static_cast<int>(r.get<std::uint32_t>());
    h.burst.n_data_symbols = static_cast<int>(r.get<std::uint32_t>());
    const auto preamble_len = r.get<std::uint32_t>();
    if (preamble_len > kPreambleSlots) {
        throw CorruptHeaderError("dataset: preamble length out of range");
    }
    for (std::size_t i = 0; i < kPreambleSlots; ++i) {
        const auto s = r.get<std::uint8_t>();
        if (i < preamble_len) {
            h.burst.preamble_symbols.push_back(s);
        }
    }
    h.generator_version = r.get_fixed(kVersionField);
    const auto crc = r.get<std::uint32_t>();
    if (payload_crc != nullptr) {
        *payload_crc = crc;
    }
    return h;
}

void encode_record(const LabeledExample& ex, std::uint32_t block_len, std::vector<std::uint8_t>& out) {
    if (ex.iq.size() != block_len) {
        throw std::invalid_argument("encode_record: example length " + std::to_string(ex.iq.size()) +
                                    " does not match block_len " + std::to_string(block_len));
    }
    out.clear();
    out.reserve(record_size(block_len));
    ByteWriter w(out);
    for (const auto& s : ex.iq.samples) {
        w.put<float>(static_cast<float>(s.real()));
        w.put<float>(static_cast<float>(s.imag()));
    }
    w.put<double>(ex.label);
    w.put<double>(ex.meta.phase_rad);
    w.put<double>(ex.meta.cfo_hz);
    w.put<std::uint32_t>(ex.meta.pad_samples);
    w.put<std::uint32_t>(ex.meta.fading_taps);
    w.put<std::uint64_t>(ex.meta.example_seed);
}

namespace {

LabeledExample decode_record(std::span<const std::uint8_t> bytes, const DatasetHeader& h) {
    ByteReader r(bytes);
    LabeledExample ex;
    ex.iq.sample_rate_hz = h.burst.sample_rate_hz;
    ex.iq.samples.resize(h.block_len);
    for (auto& s : ex.iq.samples) {
        const float re = r.get<float>();
        const float im = r.get<float>();
        s = {re, im};
    }
    ex.label = r.get<double>();
    ex.meta.phase_rad = r.get<double>();
    ex.meta.cfo_hz = r.get<double>();
    ex.meta.pad_samples = r.get<std::uint32_t>();
    ex.meta.fading_taps = r.get<std::uint32_t>();
    ex.meta.example_seed = r.get<std::uint64_t>();
    return ex;
}

}  // namespace

DatasetWriter::DatasetWriter(const fs::path& path, const DatasetHeader& header)
    : out_(path, std::ios::binary | std::ios::trunc), header_(header) {
    if (!out_) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    const auto bytes = encode_header(header_, 0);
    out_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

DatasetWriter::~DatasetWriter() {
    if (!closed_) {
        try {
            close();
        } catch (...) {
        }
    }
}

void DatasetWriter::write(const LabeledExample& ex) {
    if (closed_) {
        throw std::logic_error("DatasetWriter: write after close");
    }
    if (written_ >= header_.example_count) {
        throw std::logic_error("DatasetWriter: more examples than the header declares");
    }
    encode_record(ex, header_.block_len, scratch_);
    crc_ = detail::crc32_update(crc_, scratch_);
    out_.write(reinterpret_cast<const char*>(scratch_.data()), static_cast<std::streamsize>(scratch_.size()));
    ++written_;
}

void DatasetWriter::close() {
    if (closed_) {
        return;
    }
    closed_ = true;
    if (written_ != header_.example_count) {
        throw std::logic_error("DatasetWriter: header declares " + std::to_string(header_.example_count) +
                               " examples, wrote " + std::to_string(written_));
    }
    const auto bytes = encode_header(header_, crc_);
    out_.seekp(0);
    out_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out_.close();
    if (!out_) {
        throw std::runtime_error("DatasetWriter: I/O error while finishing file");
    }
}

DatasetReader::DatasetReader(const fs::path& path) : in_(path, std::ios::binary) {
    if (!in_) {
        throw MissingDatasetError("cannot open dataset " + path.string());
    }
    std::vector<std::uint8_t> head(kHeaderSize);
    in_.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(kHeaderSize));
    head.resize(static_cast<std::size_t>(in_.gcount()));
    header_ = decode_header(head, &expected_crc_);

    const auto expected = kHeaderSize + header_.example_count * record_size(header_.block_len);
    const auto actual = fs::file_size(path);
    if (actual < expected) {
        throw TruncatedError("dataset: file holds " + std::to_string(actual) + " bytes, header implies " +
                             std::to_string(expected));
    }
    scratch_.resize(record_size(header_.block_len));
}

std::optional<LabeledExample> DatasetReader::next() {
    if (read_ == header_.example_count) {
        return std::nullopt;
    }
    in_.read(reinterpret_cast<char*>(scratch_.data()), static_cast<std::streamsize>(scratch_.size()));
    if (static_cast<std::size_t>(in_.gcount()) != scratch_.size()) {
        throw TruncatedError("dataset: truncated record " + std::to_string(read_));
    }
    crc_ = detail::crc32_update(crc_, scratch_);
    ++read_;
    if (read_ == header_.example_count && crc_ != expected_crc_) {
        throw ChecksumError("dataset: payload checksum mismatch");
    }
    return decode_record(scratch_, header_);
}

void write_dataset(const fs::path& path, const Dataset& d) {
    if (d.examples.size() != d.header.example_count) {
        throw std::invalid_argument("write_dataset: example count does not match header");
    }
    DatasetWriter w(path, d.header);
    for (const auto& ex : d.examples) {
        w.write(ex);
    }
    w.close();
}

Dataset read_dataset(const fs::path& path) {
    DatasetReader r(path);
    Dataset d;
    d.header = r.header();
    d.examples.reserve(d.header.example_count);
    while (auto ex = r.next()) {
        d.examples.push_back(std::move(*ex));
    }
    return d;
}

DatasetHeader read_header(const fs::path& path) {
    return DatasetReader(path).header();
}

}  // namespace burstsync::datasets
