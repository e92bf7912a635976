// Copyright 2026  dtln-cpp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DTLN_WEIGHTS_IO_HPP
#define DTLN_WEIGHTS_IO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dtln/errors.hpp"
#include "dtln/model.hpp"
#include "dtln/params.hpp"
#include "dtln/topology.hpp"

namespace dtln {

// Weight file layout, all little-endian:
//   8 bytes  magic "DTLNWTS1"
//   u32      format version (1)
//   u32+s    topology name, length-prefixed UTF-8
//   u32      tensor count
//   per tensor: u32+s name, u32 rank, u32 dims[rank], f32 data
static_assert(std::endian::native == std::endian::little, "weight files require a little-endian host");

constexpr char kWeightsMagic[8] = {'D', 'T', 'L', 'N', 'W', 'T', 'S', '1'};
constexpr uint32_t kWeightsVersion = 1;

namespace detail {

inline void write_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }

inline void write_string(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline uint32_t read_u32(std::istream& is) {
    uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    if (is.gcount() != 4) throw WeightsError(WeightsError::Kind::Truncated, "weight file truncated");
    return v;
}

inline std::string read_string(std::istream& is) {
    const uint32_t len = read_u32(is);
    if (len > (1u << 20)) throw WeightsError(WeightsError::Kind::Truncated, "weight file: absurd string length");
    std::string s(len, '\0');
    is.read(s.data(), len);
    if (static_cast<uint32_t>(is.gcount()) != len)
        throw WeightsError(WeightsError::Kind::Truncated, "weight file truncated");
    return s;
}

inline std::string shape_str(const std::vector<uint32_t>& shape) {
    std::ostringstream oss;
    oss << "[";
    for (size_t i = 0; i < shape.size(); ++i) oss << (i ? "x" : "") << shape[i];
    oss << "]";
    return oss.str();
}

}  // namespace detail

inline void save_weights(const std::string& topology_name, const ParamSet<float>& params,
                         const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw WeightsError(WeightsError::Kind::Io, "cannot open for writing: " + path);
    os.write(kWeightsMagic, 8);
    detail::write_u32(os, kWeightsVersion);
    detail::write_string(os, topology_name);
    detail::write_u32(os, static_cast<uint32_t>(params.tensors.size()));
    for (const auto& t : params.tensors) {
        detail::write_string(os, t.name);
        detail::write_u32(os, static_cast<uint32_t>(t.shape.size()));
        for (uint32_t d : t.shape) detail::write_u32(os, d);
        os.write(reinterpret_cast<const char*>(t.data.data()),
                 static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    }
    if (!os) throw WeightsError(WeightsError::Kind::Io, "write failed: " + path);
}

template <typename T>
void save_weights(const Model<T>& model, const std::string& path) {
    save_weights(model.spec().name, model.params().template cast<float>(), path);
}

struct LoadedWeights {
    std::string topology;
    ParamSet<float> params;
};

inline LoadedWeights load_weights(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw WeightsError(WeightsError::Kind::Io, "cannot open weight file: " + path);
    char magic[8] = {};
    is.read(magic, 8);
    if (is.gcount() != 8 || std::memcmp(magic, kWeightsMagic, 8) != 0)
        throw WeightsError(WeightsError::Kind::NotAWeightFile, "not a weight file: " + path);
    const uint32_t version = detail::read_u32(is);
    if (version != kWeightsVersion)
        throw WeightsError(WeightsError::Kind::VersionMismatch,
                           "weight file version " + std::to_string(version) + " unsupported");
    LoadedWeights out;
    out.topology = detail::read_string(is);
    const uint32_t count = detail::read_u32(is);
    if (count > 4096) throw WeightsError(WeightsError::Kind::Truncated, "weight file: absurd tensor count");
    out.params.tensors.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        Tensor<float> t;
        t.name = detail::read_string(is);
        const uint32_t rank = detail::read_u32(is);
        if (rank > 8) throw WeightsError(WeightsError::Kind::Truncated, "weight file: absurd tensor rank");
        t.shape.resize(rank);
        uint64_t elems = 1;
        for (uint32_t r = 0; r < rank; ++r) {
            t.shape[r] = detail::read_u32(is);
            elems *= t.shape[r];
            if (elems > (1ull << 31))
                throw WeightsError(WeightsError::Kind::Truncated, "weight file: absurd tensor size");
        }
        t.data.resize(elems);
        is.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(elems * sizeof(float)));
        if (static_cast<uint64_t>(is.gcount()) != elems * sizeof(float))
            throw WeightsError(WeightsError::Kind::Truncated, "weight file truncated in tensor " + t.name);
        out.params.tensors.push_back(std::move(t));
    }
    return out;
}

// Validates a loaded tensor list against the canonical table of a topology;
// reports the first offending tensor on mismatch.
inline void check_tensor_table(const TopologySpec& spec, const ParamSet<float>& params) {
    const auto table = detail::tensor_table(spec);
    const size_t n = std::min(table.size(), params.tensors.size());
    for (size_t i = 0; i < n; ++i) {
        const auto& want = table[i];
        const auto& got = params.tensors[i];
        if (want.name != got.name || want.shape != got.shape) {
            throw WeightsError(WeightsError::Kind::ShapeMismatch,
                               "weight file does not match topology " + spec.name + ": tensor " +
                                   std::to_string(i) + " expected '" + want.name + "' " +
                                   detail::shape_str(want.shape) + ", file has '" + got.name + "' " +
                                   detail::shape_str(got.shape));
        }
    }
    if (table.size() != params.tensors.size())
        throw WeightsError(WeightsError::Kind::ShapeMismatch,
                           "weight file does not match topology " + spec.name + ": expected " +
                               std::to_string(table.size()) + " tensors, file has " +
                               std::to_string(params.tensors.size()));
}

template <typename T>
Model<T> load_model(const std::string& path, const TopologySpec& expected) {
    auto loaded = load_weights(path);
    check_tensor_table(expected, loaded.params);
    return Model<T>(expected, loaded.params.template cast<T>());
}

template <typename T>
Model<T> load_model(const std::string& path) {
    auto loaded = load_weights(path);
    const auto spec = TopologySpec::by_name(loaded.topology);
    check_tensor_table(spec, loaded.params);
    return Model<T>(spec, loaded.params.template cast<T>());
}

}  // namespace dtln

#endif  // DTLN_WEIGHTS_IO_HPP
