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

#ifndef DTLN_OPTIM_HPP
#define DTLN_OPTIM_HPP

#include <cmath>

#include "dtln/errors.hpp"
#include "dtln/params.hpp"

namespace dtln {

// Global L2 norm over all tensors concatenated.
template <typename T>
double global_norm(const ParamSet<T>& grads) {
    double acc = 0.0;
    for (const auto& t : grads.tensors)
        for (const T v : t.data) {
            if (std::isnan(static_cast<double>(v))) throw Error("global_norm: NaN gradient in " + t.name);
            acc += static_cast<double>(v) * static_cast<double>(v);
        }
    return std::sqrt(acc);
}

// g' = g * min(1, max_norm / ||g||2). Returns the pre-clip norm.
template <typename T>
double clip_grad_norm(ParamSet<T>& grads, double max_norm) {
    const double norm = global_norm(grads);
    if (norm > max_norm && norm > 0.0) grads.scale(static_cast<T>(max_norm / norm));
    return norm;
}

template <typename T>
struct AdamMoments {
    ParamSet<T> m;
    ParamSet<T> v;

    static AdamMoments zeros_like(const ParamSet<T>& params) {
        return {params.zeros_like(), params.zeros_like()};
    }
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Standard bias-corrected Adam update; t is the 1-based step count.
template <typename T>
void adam_step(ParamSet<T>& params, const ParamSet<T>& grads, AdamMoments<T>& moments, int64_t t,
               const AdamConfig& cfg = {}) {
    if (t < 1) throw Error("adam_step: step index must be >= 1");
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (size_t i = 0; i < params.tensors.size(); ++i) {
        auto& p = params.tensors[i].data;
        const auto& g = grads.tensors[i].data;
        auto& m = moments.m.tensors[i].data;
        auto& v = moments.v.tensors[i].data;
        if (p.size() != g.size()) throw ShapeError("adam_step: gradient shape mismatch");
        for (size_t k = 0; k < p.size(); ++k) {
            const double gk = static_cast<double>(g[k]);
            const double mk = cfg.beta1 * static_cast<double>(m[k]) + (1.0 - cfg.beta1) * gk;
            const double vk = cfg.beta2 * static_cast<double>(v[k]) + (1.0 - cfg.beta2) * gk * gk;
            m[k] = static_cast<T>(mk);
            v[k] = static_cast<T>(vk);
            const double mhat = mk / bc1;
            const double vhat = vk / bc2;
            p[k] = static_cast<T>(static_cast<double>(p[k]) - cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
        }
    }
}

}  // namespace dtln

#endif  // DTLN_OPTIM_HPP
