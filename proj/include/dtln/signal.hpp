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

#ifndef DTLN_SIGNAL_HPP
#define DTLN_SIGNAL_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "dtln/audio.hpp"
#include "dtln/errors.hpp"
#include "dtln/fft.hpp"
#include "dtln/matrix.hpp"

namespace dtln {

constexpr int kFrameLen = 512;  // 32 ms at 16 kHz
constexpr int kHop = 128;       // 8 ms shift
constexpr int kBins = kFrameLen / 2 + 1;

// Magnitude/phase split of one spectral frame. Phase of a zero bin is 0.
template <typename T>
struct MagPhase {
    std::vector<T> magnitude;
    std::vector<T> phase;
};

// Learned analysis/synthesis transform pair. Both matrices are N x L:
// analysis maps a time frame to N features, synthesis maps N features back.
template <typename T>
struct BasisPair {
    Matrix<T> analysis;
    Matrix<T> synthesis;

    void check() const {
        if (analysis.rows != synthesis.rows || analysis.cols != synthesis.cols)
            throw ShapeError("BasisPair: analysis and synthesis shapes differ");
    }
};

// Split a signal into overlapping frames of length L at the given hop.
// Frame k covers samples [k*hop, k*hop + L); a trailing remainder shorter
// than a full frame is dropped.
template <typename T>
std::vector<std::vector<T>> frame_signal(const std::vector<T>& x, size_t L, size_t hop) {
    if (x.size() < L) throw Error("frame_signal: input shorter than one frame");
    const size_t count = (x.size() - L) / hop + 1;
    std::vector<std::vector<T>> frames(count);
    for (size_t k = 0; k < count; ++k) frames[k].assign(x.begin() + k * hop, x.begin() + k * hop + L);
    return frames;
}

inline std::vector<std::vector<double>> frame_signal(const AudioBuffer& audio, size_t L = kFrameLen,
                                                     size_t hop = kHop) {
    check_audio(audio, "frame_signal");
    return frame_signal(audio.samples, L, hop);
}

inline size_t frame_count(size_t samples, size_t L = kFrameLen, size_t hop = kHop) {
    return samples < L ? 0 : (samples - L) / hop + 1;
}

// Overlap-add with rectangular frames: out[n] = (hop/L) * sum_k f_k[n - k*hop].
// The hop/L factor compensates the L/hop-fold overlap, so framing followed by
// overlap-add reproduces interior samples exactly.
template <typename T>
std::vector<T> overlap_add(const std::vector<std::vector<T>>& frames, size_t hop) {
    if (frames.empty()) throw Error("overlap_add: empty frame sequence");
    const size_t L = frames[0].size();
    if (hop == 0 || L % hop != 0) throw ShapeError("overlap_add: hop must divide frame length");
    for (const auto& f : frames)
        if (f.size() != L) throw ShapeError("overlap_add: ragged frame lengths");

    std::vector<T> out((frames.size() - 1) * hop + L, T(0));
    const T scale = static_cast<T>(hop) / static_cast<T>(L);
    for (size_t k = 0; k < frames.size(); ++k) {
        T* dst = out.data() + k * hop;
        const T* src = frames[k].data();
        for (size_t n = 0; n < L; ++n) dst[n] += scale * src[n];
    }
    return out;
}

using fft::irfft;
using fft::rfft;

// Magnitude and phase of a spectral frame; arg(0) is defined as 0.
template <typename T>
MagPhase<T> mag_phase(const std::vector<std::complex<T>>& spectrum) {
    MagPhase<T> mp;
    mp.magnitude.resize(spectrum.size());
    mp.phase.resize(spectrum.size());
    for (size_t f = 0; f < spectrum.size(); ++f) {
        const T re = spectrum[f].real();
        const T im = spectrum[f].imag();
        const T mag = std::sqrt(re * re + im * im);
        mp.magnitude[f] = mag;
        mp.phase[f] = (mag == T(0)) ? T(0) : std::atan2(im, re);
    }
    return mp;
}

// Mask the magnitude, recombine with the stored phase, and return the
// time-domain frame. No overlap-add here: one spectral frame in, one time
// frame out.
template <typename T>
std::vector<T> apply_spectral_mask(const MagPhase<T>& mp, const std::vector<T>& mask) {
    if (mask.size() != mp.magnitude.size()) throw ShapeError("apply_spectral_mask: mask length != bin count");
    std::vector<std::complex<T>> masked(mask.size());
    for (size_t f = 0; f < mask.size(); ++f) {
        if (!(mask[f] >= T(0) && mask[f] <= T(1)))
            throw Error("apply_spectral_mask: mask value outside [0,1]");
        const T m = mask[f] * mp.magnitude[f];
        masked[f] = std::complex<T>(m * std::cos(mp.phase[f]), m * std::sin(mp.phase[f]));
    }
    return irfft(masked);
}

// w = U * frame (features of one frame, Eq.-style analysis transform).
template <typename T>
std::vector<T> analysis_basis(const std::vector<T>& frame, const BasisPair<T>& basis) {
    basis.check();
    if (frame.size() != basis.analysis.cols) throw ShapeError("analysis_basis: frame length != basis cols");
    return matvec(basis.analysis, frame);
}

// Elementwise product of features with a mask in [0,1].
template <typename T>
std::vector<T> apply_feature_mask(const std::vector<T>& features, const std::vector<T>& mask) {
    if (features.size() != mask.size()) throw ShapeError("apply_feature_mask: length mismatch");
    std::vector<T> out(features.size());
    for (size_t i = 0; i < features.size(); ++i) {
        if (!(mask[i] >= T(0) && mask[i] <= T(1)))
            throw Error("apply_feature_mask: mask value outside [0,1]");
        out[i] = features[i] * mask[i];
    }
    return out;
}

// frame = V^T * features (synthesis transform back to the time domain).
template <typename T>
std::vector<T> synthesis_basis(const std::vector<T>& features, const BasisPair<T>& basis) {
    basis.check();
    if (features.size() != basis.synthesis.rows) throw ShapeError("synthesis_basis: feature length != basis rows");
    return matvec_transposed(basis.synthesis, features);
}

}  // namespace dtln

#endif  // DTLN_SIGNAL_HPP
