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

#ifndef DTLN_AUDIO_HPP
#define DTLN_AUDIO_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "dtln/errors.hpp"

namespace dtln {

constexpr int kSampleRate = 16000;

// Mono PCM signal. Samples are dimensionless amplitudes, nominally [-1, 1].
struct AudioBuffer {
    std::vector<double> samples;
    int sample_rate = kSampleRate;

    AudioBuffer() = default;
    AudioBuffer(std::vector<double> s, int rate = kSampleRate) : samples(std::move(s)), sample_rate(rate) {}

    size_t size() const { return samples.size(); }
    double duration_seconds() const { return static_cast<double>(samples.size()) / sample_rate; }
};

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

inline void check_audio(const AudioBuffer& a, const char* what) {
    if (a.sample_rate != kSampleRate) throw AudioError(std::string(what) + ": sample rate must be 16000 Hz");
    if (!all_finite(a.samples)) throw AudioError(std::string(what) + ": non-finite sample");
}

inline double signal_power(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

inline double peak_abs(const std::vector<double>& v) {
    double p = 0.0;
    for (double x : v) p = std::max(p, std::fabs(x));
    return p;
}

}  // namespace dtln

#endif  // DTLN_AUDIO_HPP
