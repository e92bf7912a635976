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

#ifndef DTLN_TOPOLOGY_HPP
#define DTLN_TOPOLOGY_HPP

#include <cmath>
#include <string>
#include <vector>

#include "dtln/errors.hpp"
#include "dtln/params.hpp"
#include "dtln/rng.hpp"

namespace dtln {

enum class BasisKind { Stft, Learned };

// One separation core: normalization, an LSTM stack, and a sigmoid mask head
// over either STFT magnitudes or a learned feature basis.
struct CoreSpec {
    BasisKind basis = BasisKind::Stft;
    int lstm_layers = 2;
    int units = 128;
    int feature_dim = 257;  // 257 bins for STFT cores, feature_size for learned
};

// Architecture descriptor for the DTLN model and the B1-B4 baselines.
struct TopologySpec {
    std::string name;
    std::vector<CoreSpec> cores;
    int frame_len = 512;
    int hop = 128;
    int feature_size = 256;  // learned-basis width (1D-Conv filter count)
    double dropout = 0.25;

    int bins() const { return frame_len / 2 + 1; }
    int total_lstm_layers() const {
        int n = 0;
        for (const auto& c : cores) n += c.lstm_layers;
        return n;
    }

    static TopologySpec by_name(const std::string& name) {
        TopologySpec s;
        s.name = name;
        const int bins = s.bins();
        const int n = s.feature_size;
        if (name == "DTLN") {
            s.cores = {{BasisKind::Stft, 2, 128, bins}, {BasisKind::Learned, 2, 128, n}};
        } else if (name == "B1") {
            s.cores = {{BasisKind::Stft, 4, 166, bins}};
        } else if (name == "B2") {
            s.cores = {{BasisKind::Learned, 4, 139, n}};
        } else if (name == "B3") {
            s.cores = {{BasisKind::Stft, 2, 156, bins}, {BasisKind::Stft, 2, 156, bins}};
        } else if (name == "B4") {
            s.cores = {{BasisKind::Learned, 2, 95, n}, {BasisKind::Learned, 2, 95, n}};
        } else {
            throw Error("unknown topology: " + name);
        }
        return s;
    }

    static const std::vector<std::string>& known_names() {
        static const std::vector<std::string> names{"DTLN", "B1", "B2", "B3", "B4"};
        return names;
    }
};

namespace detail {

struct TensorDecl {
    std::string name;
    std::vector<uint32_t> shape;
    enum class Init { Glorot, Zero, One } init;
};

// Canonical tensor order per topology; serialization and gradient layout
// both follow this table.
inline std::vector<TensorDecl> tensor_table(const TopologySpec& spec) {
    using Init = TensorDecl::Init;
    std::vector<TensorDecl> out;
    const auto u32 = [](int v) { return static_cast<uint32_t>(v); };
    for (size_t ci = 0; ci < spec.cores.size(); ++ci) {
        const CoreSpec& core = spec.cores[ci];
        const std::string p = "core" + std::to_string(ci) + ".";
        const uint32_t F = u32(core.feature_dim);
        const uint32_t H = u32(core.units);
        const uint32_t L = u32(spec.frame_len);
        if (core.basis == BasisKind::Learned)
            out.push_back({p + "encoder.U", {F, L}, Init::Glorot});
        out.push_back({p + "iln.gamma", {F}, Init::One});
        out.push_back({p + "iln.beta", {F}, Init::Zero});
        uint32_t in_dim = F;
        for (int li = 0; li < core.lstm_layers; ++li) {
            const std::string lp = p + "lstm" + std::to_string(li) + ".";
            out.push_back({lp + "W", {4 * H, in_dim}, Init::Glorot});
            out.push_back({lp + "R", {4 * H, H}, Init::Glorot});
            out.push_back({lp + "b", {4 * H}, Init::Zero});
            in_dim = H;
        }
        out.push_back({p + "mask.W", {F, H}, Init::Glorot});
        out.push_back({p + "mask.b", {F}, Init::Zero});
        if (core.basis == BasisKind::Learned)
            out.push_back({p + "decoder.V", {F, L}, Init::Glorot});
    }
    return out;
}

}  // namespace detail

// Glorot-uniform weights (limit sqrt(6/(rows+cols))), zero biases, unit
// normalization scales. Deterministic for a given seed.
template <typename T>
ParamSet<T> init_params(const TopologySpec& spec, uint64_t seed) {
    ParamSet<T> params;
    Rng rng(seed);
    for (const auto& decl : detail::tensor_table(spec)) {
        Tensor<T> t(decl.name, decl.shape);
        switch (decl.init) {
            case detail::TensorDecl::Init::Glorot: {
                const double fan_in = decl.shape.size() > 1 ? decl.shape[1] : 1;
                const double fan_out = decl.shape[0];
                const double limit = std::sqrt(6.0 / (fan_in + fan_out));
                for (auto& v : t.data) v = static_cast<T>(rng.uniform(-limit, limit));
                break;
            }
            case detail::TensorDecl::Init::Zero:
                break;
            case detail::TensorDecl::Init::One:
                std::fill(t.data.begin(), t.data.end(), T(1));
                break;
        }
        params.tensors.push_back(std::move(t));
    }
    return params;
}

}  // namespace dtln

#endif  // DTLN_TOPOLOGY_HPP
