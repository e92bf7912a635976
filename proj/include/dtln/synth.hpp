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

#ifndef DTLN_SYNTH_HPP
#define DTLN_SYNTH_HPP

#include <cmath>
#include <vector>

#include "dtln/audio.hpp"
#include "dtln/rng.hpp"

namespace dtln {

// Deterministic synthetic audio for benchmarks, smoke training and the demo
// corpus: formant-shaped harmonic "speech" with syllable structure, and a
// few noise colors. Not a TTS; just signals with speech-like spectro-temporal
// statistics so that masking models have something real to learn.

namespace synth {

inline double formant_gain(double freq, const double* centers, const double* widths, int count) {
    double g = 0.08;  // spectral floor below the formants
    for (int j = 0; j < count; ++j) {
        const double d = (freq - centers[j]) / widths[j];
        g += std::exp(-d * d);
    }
    return g;
}

inline void normalize_rms(std::vector<double>& x, double target_rms) {
    double p = 0.0;
    for (double v : x) p += v * v;
    p = std::sqrt(p / x.size());
    if (p > 0.0) {
        const double s = target_rms / p;
        for (double& v : x) v *= s;
    }
}

inline std::vector<double> speech(double seconds, uint64_t seed, int fs = kSampleRate,
                                  double target_rms = 0.1) {
    Rng rng(seed);
    const size_t n = static_cast<size_t>(seconds * fs);
    std::vector<double> out(n, 0.0);

    size_t pos = 0;
    double f0 = rng.uniform(100.0, 220.0);
    while (pos < n) {
        // syllable: voiced nucleus, optional fricative tail, short pause
        const size_t voiced_len = static_cast<size_t>(rng.uniform(0.12, 0.35) * fs);
        const size_t frica_len = rng.uniform() < 0.45 ? static_cast<size_t>(rng.uniform(0.04, 0.12) * fs) : 0;
        const size_t pause_len = static_cast<size_t>(rng.uniform(0.04, 0.25) * fs);

        double centers[3] = {rng.uniform(300.0, 900.0), rng.uniform(950.0, 2400.0),
                             rng.uniform(2500.0, 3400.0)};
        double widths[3] = {rng.uniform(80.0, 160.0), rng.uniform(100.0, 220.0), rng.uniform(150.0, 300.0)};
        const double f0_target = rng.uniform(100.0, 220.0);
        const double level = rng.uniform(0.5, 1.0);

        const size_t vend = std::min(n, pos + voiced_len);
        const int harmonics = static_cast<int>(std::floor(6800.0 / f0));
        std::vector<double> phases(harmonics, 0.0);
        std::vector<double> gains(harmonics);
        for (int k = 1; k <= harmonics; ++k)
            gains[k - 1] = formant_gain(k * f0, centers, widths, 3) / std::sqrt(static_cast<double>(k));
        const size_t ramp = static_cast<size_t>(0.02 * fs);
        for (size_t i = pos; i < vend; ++i) {
            f0 += (f0_target - f0) * 2e-4;  // slow glide
            double v = 0.0;
            for (int k = 1; k <= harmonics; ++k) {
                phases[k - 1] += 2.0 * M_PI * k * f0 / fs;
                if (k * f0 < 7600.0) v += gains[k - 1] * std::sin(phases[k - 1]);
            }
            v += 0.02 * rng.normal();  // aspiration
            double env = level;
            if (i - pos < ramp) env *= static_cast<double>(i - pos) / ramp;
            if (vend - i < ramp) env *= static_cast<double>(vend - i) / ramp;
            out[i] = env * v;
        }
        pos = vend;

        // crude fricative: first-difference of white noise, high-pass heavy
        const size_t fend = std::min(n, pos + frica_len);
        double prev = 0.0;
        for (size_t i = pos; i < fend; ++i) {
            const double w = rng.normal();
            double env = 0.35 * level;
            if (fend - i < ramp) env *= static_cast<double>(fend - i) / ramp;
            out[i] = env * (w - 0.7 * prev);
            prev = w;
        }
        pos = fend;
        pos = std::min(n, pos + pause_len);
    }
    normalize_rms(out, target_rms);
    return out;
}

enum class NoiseKind { White, Pink, Babble, HumAndHiss };

inline std::vector<double> noise(NoiseKind kind, double seconds, uint64_t seed, int fs = kSampleRate,
                                 double target_rms = 0.1) {
    Rng rng(seed);
    const size_t n = static_cast<size_t>(seconds * fs);
    std::vector<double> out(n, 0.0);
    switch (kind) {
        case NoiseKind::White:
            for (auto& v : out) v = rng.normal();
            break;
        case NoiseKind::Pink: {
            // Kellet's pink filter over white noise
            double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
            for (auto& v : out) {
                const double w = rng.normal();
                b0 = 0.99886 * b0 + w * 0.0555179;
                b1 = 0.99332 * b1 + w * 0.0750759;
                b2 = 0.96900 * b2 + w * 0.1538520;
                b3 = 0.86650 * b3 + w * 0.3104856;
                b4 = 0.55000 * b4 + w * 0.5329522;
                b5 = -0.7616 * b5 - w * 0.0168980;
                v = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
                b6 = w * 0.115926;
            }
            break;
        }
        case NoiseKind::Babble: {
            // several quiet speech streams summed
            for (int talker = 0; talker < 5; ++talker) {
                auto s = speech(seconds, rng.next_u64(), fs, 1.0);
                for (size_t i = 0; i < n; ++i) out[i] += s[i];
            }
            break;
        }
        case NoiseKind::HumAndHiss: {
            const double hum = rng.uniform(90.0, 180.0);
            double lp = 0.0;
            for (size_t i = 0; i < n; ++i) {
                const double w = rng.normal();
                lp += 0.02 * (w - lp);
                out[i] = 0.8 * std::sin(2.0 * M_PI * hum * i / fs) +
                         0.5 * std::sin(2.0 * M_PI * 2 * hum * i / fs + 1.3) + 2.5 * lp + 0.3 * w;
            }
            break;
        }
    }
    normalize_rms(out, target_rms);
    return out;
}

inline NoiseKind noise_kind_for(uint64_t index) {
    switch (index % 4) {
        case 0: return NoiseKind::White;
        case 1: return NoiseKind::Pink;
        case 2: return NoiseKind::Babble;
        default: return NoiseKind::HumAndHiss;
    }
}

}  // namespace synth

}  // namespace dtln

#endif  // DTLN_SYNTH_HPP
