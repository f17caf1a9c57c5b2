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

#include "burstsync/nn/model_io.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "../bytes.hpp"

namespace burstsync::nn {

using detail::ByteReader;
using detail::ByteWriter;

namespace {

void put_string(ByteWriter& w, const std::string& s) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    w.put_bytes(s.data(), s.size());
}

std::string get_string(ByteReader& r) {
    const auto n = r.get<std::uint32_t>();
    if (n > r.remaining()) {
        throw std::out_of_range("string past end");
    }
    std::string s(n, '\0');
    r.get_bytes(s.data(), n);
    return s;
}

template <class T>
void put_tensor(ByteWriter& w, const Tensor<T>& t) {
    w.put<std::uint64_t>(t.size());
    w.put_bytes(t.data.data(), t.size() * sizeof(T));
}

template <class T>
void get_tensor(ByteReader& r, Tensor<T>& t, std::size_t layer) {
    const auto n = r.get<std::uint64_t>();
    if (n != t.size()) {
        throw ModelFormatError("model: layer " + std::to_string(layer) + " holds " + std::to_string(n) +
                               " values, spec implies " + std::to_string(t.size()));
    }
    r.get_bytes(t.data.data(), n * sizeof(T));
}

}  // namespace

template <class T>
std::vector<std::uint8_t> encode_model(const Model<T>& m, const TrainingHeader& h) {
    std::vector<std::uint8_t> out;
    ByteWriter w(out);
    w.put_bytes(kModelMagic, 4);
    w.put<std::uint32_t>(kModelFormatVersion);
    w.put<std::uint8_t>(sizeof(T));

    const ModelSpec& s = m.spec;
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.input.length));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.input.channels));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(s.input_norm));
    w.put<double>(s.label_scale);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.layers.size()));
    for (const auto& l : s.layers) {
        w.put<std::uint8_t>(static_cast<std::uint8_t>(l.kind));
        w.put<std::int32_t>(l.filter_len);
        w.put<std::int32_t>(l.stride);
        w.put<std::int32_t>(l.out_channels);
        w.put<std::int32_t>(l.pool);
        w.put<std::int32_t>(l.out_features);
    }

    const TrainConfig& c = h.config;
    w.put<std::uint8_t>(static_cast<std::uint8_t>(c.loss));
    w.put<double>(c.lr_init);
    w.put<std::int32_t>(c.epochs);
    w.put<std::int32_t>(c.plateau_patience);
    w.put<double>(c.lr_factor);
    w.put<std::uint64_t>(c.batch_size);
    w.put<std::uint64_t>(c.seed);
    w.put<std::int32_t>(c.threads);
    w.put<std::int32_t>(h.best_epoch);
    w.put<double>(h.best_val_loss);
    put_string(w, h.cell.task);
    put_string(w, h.cell.channel);
    w.put<double>(h.cell.snr_db);
    w.put<std::uint32_t>(h.cell.block_len);
    w.put<std::uint64_t>(h.cell.seed);
    put_string(w, h.cell.generator_version);
    w.put<std::uint64_t>(h.cell.train_count);

    if (m.params.size() != s.layers.size()) {
        throw std::invalid_argument("encode_model: parameter list does not match the layer list");
    }
    for (const auto& p : m.params) {
        put_tensor(w, p.weights);
        put_tensor(w, p.bias);
    }
    w.put<std::uint32_t>(detail::crc32_update(0, out));
    return out;
}

template <class T>
SavedModel<T> decode_model(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kModelMagic, 4) != 0) {
        throw ModelFormatError("model: bad magic (not a CEM1 file)");
    }
    if (bytes.size() < 13) {
        throw ModelFormatError("model: truncated file");
    }
    ByteReader r(bytes);
    r.get<std::uint32_t>();
    const auto version = r.get<std::uint32_t>();
    if (version != kModelFormatVersion) {
        throw ModelVersionError("model: format version " + std::to_string(version) + ", expected " +
                                std::to_string(kModelFormatVersion));
    }
    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, bytes.data() + bytes.size() - 4, 4);
    if (detail::crc32_update(0, std::span(bytes).first(bytes.size() - 4)) != stored_crc) {
        throw ModelFormatError("model: checksum mismatch (file corrupt or truncated)");
    }
    const auto elem = r.get<std::uint8_t>();
    if (elem != sizeof(T)) {
        throw ModelFormatError("model: stored with " + std::to_string(elem * 8) + "-bit parameters, requested " +
                               std::to_string(sizeof(T) * 8) + "-bit");
    }

    SavedModel<T> out;
    try {
        ModelSpec s;
        s.input.length = r.get<std::uint32_t>();
        s.input.channels = r.get<std::uint32_t>();
        const auto norm = r.get<std::uint8_t>();
        if (norm > 1) {
            throw ModelFormatError("model: invalid input normalization");
        }
        s.input_norm = static_cast<InputNorm>(norm);
        s.label_scale = r.get<double>();
        const auto n_layers = r.get<std::uint32_t>();
        if (n_layers > 4096) {
            throw ModelFormatError("model: implausible layer count");
        }
        for (std::uint32_t i = 0; i < n_layers; ++i) {
            LayerSpec l;
            const auto kind = r.get<std::uint8_t>();
            if (kind > static_cast<std::uint8_t>(LayerKind::linear_out)) {
                throw ModelFormatError("model: invalid layer kind");
            }
            l.kind = static_cast<LayerKind>(kind);
            l.filter_len = r.get<std::int32_t>();
            l.stride = r.get<std::int32_t>();
            l.out_channels = r.get<std::int32_t>();
            l.pool = r.get<std::int32_t>();
            l.out_features = r.get<std::int32_t>();
            s.layers.push_back(l);
        }

        TrainingHeader& h = out.training;
        const auto loss = r.get<std::uint8_t>();
        if (loss > static_cast<std::uint8_t>(Loss::huber)) {
            throw ModelFormatError("model: invalid loss id");
        }
        h.config.loss = static_cast<Loss>(loss);
        h.config.lr_init = r.get<double>();
        h.config.epochs = r.get<std::int32_t>();
        h.config.plateau_patience = r.get<std::int32_t>();
        h.config.lr_factor = r.get<double>();
        h.config.batch_size = r.get<std::uint64_t>();
        h.config.seed = r.get<std::uint64_t>();
        h.config.threads = r.get<std::int32_t>();
        h.best_epoch = r.get<std::int32_t>();
        h.best_val_loss = r.get<double>();
        h.cell.task = get_string(r);
        h.cell.channel = get_string(r);
        h.cell.snr_db = r.get<double>();
        h.cell.block_len = r.get<std::uint32_t>();
        h.cell.seed = r.get<std::uint64_t>();
        h.cell.generator_version = get_string(r);
        h.cell.train_count = r.get<std::uint64_t>();

        try {
            out.model = make_model<T>(s);
        } catch (const ShapeError& e) {
            throw ModelFormatError(std::string("model: stored spec is invalid: ") + e.what());
        }
        for (std::size_t i = 0; i < out.model.params.size(); ++i) {
            get_tensor(r, out.model.params[i].weights, i);
            get_tensor(r, out.model.params[i].bias, i);
        }
    } catch (const std::out_of_range&) {
        throw ModelFormatError("model: truncated file");
    }
    if (r.remaining() != 4) {
        throw ModelFormatError("model: trailing bytes after parameters");
    }
    return out;
}

template <class T>
void save_model(const std::filesystem::path& path, const Model<T>& m, const TrainingHeader& h) {
    const auto bytes = encode_model(m, h);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) {
        throw std::runtime_error("I/O error writing " + path.string());
    }
}

template <class T>
SavedModel<T> load_model(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_model<T>(bytes);
}

template std::vector<std::uint8_t> encode_model<float>(const Model<float>&, const TrainingHeader&);
template std::vector<std::uint8_t> encode_model<double>(const Model<double>&, const TrainingHeader&);
template SavedModel<float> decode_model<float>(const std::vector<std::uint8_t>&);
template SavedModel<double> decode_model<double>(const std::vector<std::uint8_t>&);
template void save_model<float>(const std::filesystem::path&, const Model<float>&, const TrainingHeader&);
template void save_model<double>(const std::filesystem::path&, const Model<double>&, const TrainingHeader&);
template SavedModel<float> load_model<float>(const std::filesystem::path&);
template SavedModel<double> load_model<double>(const std::filesystem::path&);

}  // namespace burstsync::nn
