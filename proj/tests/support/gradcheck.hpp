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

#ifndef DTLN_TESTS_GRADCHECK_HPP
#define DTLN_TESTS_GRADCHECK_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace gradcheck {

constexpr double kDelta = 1e-5;
constexpr double kRelTol = 1e-4;

// Independent oracle: central finite difference of a scalar functional with
// respect to one entry of a parameter buffer.
inline double central_difference(const std::function<double()>& f, double* value, double delta = kDelta) {
    const double saved = *value;
    *value = saved + delta;
    const double above = f();
    *value = saved - delta;
    const double below = f();
    *value = saved;
    return (above - below) / (2.0 * delta);
}

// Agreement criterion used across the gradient suite: relative error within
// 1e-4, with a small absolute floor for gradients that are themselves ~0.
inline bool close(double analytic, double numeric) {
    const double diff = std::fabs(analytic - numeric);
    return diff <= kRelTol * std::max(std::fabs(analytic), std::fabs(numeric)) + 1e-8;
}

struct Report {
    double max_rel_err = 0.0;
    size_t checked = 0;
    size_t failed = 0;
};

// Checks every entry of `buffer` against finite differences of `loss`.
inline Report check_buffer(const std::function<double()>& loss, double* buffer, size_t n,
                           const double* analytic) {
    Report r;
    for (size_t k = 0; k < n; ++k) {
        const double fd = central_difference(loss, buffer + k);
        const double diff = std::fabs(analytic[k] - fd);
        const double denom = std::max({std::fabs(analytic[k]), std::fabs(fd), 1e-8});
        r.max_rel_err = std::max(r.max_rel_err, diff / denom);
        if (!close(analytic[k], fd)) ++r.failed;
        ++r.checked;
    }
    return r;
}

}  // namespace gradcheck

#endif  // DTLN_TESTS_GRADCHECK_HPP
