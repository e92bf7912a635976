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

#ifndef DTLN_PARAMS_HPP
#define DTLN_PARAMS_HPP

#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "dtln/errors.hpp"

namespace dtln {

// One named parameter (or gradient) tensor, row-major.
template <typename T>
struct Tensor {
    std::string name;
    std::vector<uint32_t> shape;
    std::vector<T> data;

    Tensor() = default;
    Tensor(std::string n, std::vector<uint32_t> s) : name(std::move(n)), shape(std::move(s)) {
        data.assign(element_count(), T(0));
    }

    size_t element_count() const {
        size_t n = 1;
        for (uint32_t d : shape) n *= d;
        return n;
    }
    uint32_t dim(size_t i) const { return shape.at(i); }
};

// Ordered, name-addressable set of tensors. Gradients and Adam moments are
// ParamSets too: same names, same shapes, different contents.
template <typename T>
struct ParamSet {
    std::vector<Tensor<T>> tensors;

    Tensor<T>& at(const std::string& name) {
        for (auto& t : tensors)
            if (t.name == name) return t;
        throw Error("ParamSet: no tensor named " + name);
    }
    const Tensor<T>& at(const std::string& name) const {
        for (const auto& t : tensors)
            if (t.name == name) return t;
        throw Error("ParamSet: no tensor named " + name);
    }
    bool has(const std::string& name) const {
        for (const auto& t : tensors)
            if (t.name == name) return true;
        return false;
    }

    size_t element_count() const {
        size_t n = 0;
        for (const auto& t : tensors) n += t.element_count();
        return n;
    }

    // Same names and shapes, all values zero. The GradientSet constructor.
    ParamSet zeros_like() const {
        ParamSet z;
        z.tensors.reserve(tensors.size());
        for (const auto& t : tensors) z.tensors.emplace_back(t.name, t.shape);
        return z;
    }

    void add_scaled(const ParamSet& other, T scale) {
        if (other.tensors.size() != tensors.size()) throw ShapeError("ParamSet: tensor count mismatch");
        for (size_t i = 0; i < tensors.size(); ++i) {
            auto& a = tensors[i].data;
            const auto& b = other.tensors[i].data;
            if (a.size() != b.size()) throw ShapeError("ParamSet: tensor shape mismatch");
            for (size_t k = 0; k < a.size(); ++k) a[k] += scale * b[k];
        }
    }

    void scale(T s) {
        for (auto& t : tensors)
            for (auto& v : t.data) v *= s;
    }

    template <typename U>
    ParamSet<U> cast() const {
        ParamSet<U> out;
        out.tensors.reserve(tensors.size());
        for (const auto& t : tensors) {
            Tensor<U> u(t.name, t.shape);
            for (size_t k = 0; k < t.data.size(); ++k) u.data[k] = static_cast<U>(t.data[k]);
            out.tensors.push_back(std::move(u));
        }
        return out;
    }
};

// Total number of scalar parameters.
template <typename T>
size_t count_params(const ParamSet<T>& params) {
    return params.element_count();
}

}  // namespace dtln

#endif  // DTLN_PARAMS_HPP
