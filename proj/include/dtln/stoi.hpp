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

#ifndef DTLN_STOI_HPP
#define DTLN_STOI_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "dtln/errors.hpp"
#include "dtln/fft.hpp"

namespace dtln {

// Short-time objective intelligibility. The published algorithm: resample to
// 10 kHz, drop silent frames (40 dB dynamic range against the reference),
// 1/3-octave band energies from a 256-sample/50%-overlap STFT, 384 ms
// segments, normalization and clipping at -15 dB SDR, then the mean of the
// per-band per-segment correlations.

namespace stoi_detail {

constexpr int kStoiFs = 10000;
constexpr int kStoiFrame = 256;
constexpr int kStoiFft = 512;
constexpr int kStoiBands = 15;
constexpr double kStoiMinFreq = 150.0;
constexpr int kStoiSegment = 30;  // frames per 384 ms segment
constexpr double kStoiBeta = -15.0;
constexpr double kStoiDynRange = 40.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Modified zeroth-order Bessel function of the first kind (power series).
inline double bessel_i0(double x) {
    const double half = x / 2.0;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 64; ++k) {
        term *= (half / k) * (half / k);
        sum += term;
        if (term < sum * 1e-18) break;
    }
    return sum;
}

inline double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = M_PI * x;
    return std::sin(px) / px;
}

// Kaiser-windowed sinc lowpass, unit DC gain: the standard polyphase
// anti-alias design (cutoff 1/max_rate in Nyquist units, beta 5,
// 20*max_rate+1 taps).
inline std::vector<double> design_resample_filter(int up, int down) {
    const int max_rate = std::max(up, down);
    const double cutoff = 1.0 / max_rate;
    const int half_len = 10 * max_rate;
    const int taps = 2 * half_len + 1;
    std::vector<double> h(taps);
    const double beta = 5.0;
    const double i0_beta = bessel_i0(beta);
    double sum = 0.0;
    for (int n = 0; n < taps; ++n) {
        const double m = n - half_len;
        const double ratio = 2.0 * n / (taps - 1.0) - 1.0;
        const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - ratio * ratio))) / i0_beta;
        h[n] = cutoff * sinc(cutoff * m) * w;
        sum += h[n];
    }
    for (auto& v : h) v = v / sum * up;
    return h;
}

// Polyphase rational resampling with zero-phase alignment:
//   y[m] = (h * upsample(x, up))[m*down + half_len],  zero-padded edges.
inline std::vector<double> resample_poly(const std::vector<double>& x, int up, int down) {
    const int g = std::gcd(up, down);
    up /= g;
    down /= g;
    if (up == 1 && down == 1) return x;
    const auto h = design_resample_filter(up, down);
    const int half_len = (static_cast<int>(h.size()) - 1) / 2;
    const int64_t n_in = static_cast<int64_t>(x.size());
    const int64_t n_out = (n_in * up + down - 1) / down;
    std::vector<double> y(n_out, 0.0);
    for (int64_t m = 0; m < n_out; ++m) {
        const int64_t j0 = m * down + half_len;  // center tap position
        int64_t k_lo = (j0 - 2 * half_len + up - 1) / up;
        if (k_lo < 0) k_lo = 0;
        int64_t k_hi = j0 / up;
        if (k_hi > n_in - 1) k_hi = n_in - 1;
        double acc = 0.0;
        for (int64_t k = k_lo; k <= k_hi; ++k) {
            const int64_t i = j0 - k * up;
            acc += h[i] * x[k];
        }
        y[m] = acc;
    }
    return y;
}

inline std::vector<double> hann_window(int framelen) {
    std::vector<double> w(framelen);
    for (int k = 0; k < framelen; ++k)
        w[k] = 0.5 - 0.5 * std::cos(2.0 * M_PI * (k + 1) / (framelen + 1.0));
    return w;
}

// 1/3-octave band membership matrix over rfft bins, lowest center 150 Hz.
inline std::vector<std::vector<int>> third_octave_bins() {
    const int n_bins = kStoiFft / 2 + 1;
    std::vector<double> f(n_bins);
    for (int i = 0; i < n_bins; ++i) f[i] = static_cast<double>(kStoiFs) * i / kStoiFft;
    std::vector<std::vector<int>> bands(kStoiBands);
    for (int b = 0; b < kStoiBands; ++b) {
        const double lo = kStoiMinFreq * std::pow(2.0, (2.0 * b - 1.0) / 6.0);
        const double hi = kStoiMinFreq * std::pow(2.0, (2.0 * b + 1.0) / 6.0);
        int lo_bin = 0, hi_bin = 0;
        double best_lo = std::numeric_limits<double>::max(), best_hi = best_lo;
        for (int i = 0; i < n_bins; ++i) {
            const double dl = (f[i] - lo) * (f[i] - lo);
            const double dh = (f[i] - hi) * (f[i] - hi);
            if (dl < best_lo) {
                best_lo = dl;
                lo_bin = i;
            }
            if (dh < best_hi) {
                best_hi = dh;
                hi_bin = i;
            }
        }
        for (int i = lo_bin; i < hi_bin; ++i) bands[b].push_back(i);
    }
    return bands;
}

}  // namespace stoi_detail

inline double stoi(const std::vector<double>& estimate, const std::vector<double>& reference,
                   int sample_rate = 16000) {
    using namespace stoi_detail;
    if (estimate.size() != reference.size()) throw ShapeError("stoi: length mismatch");
    if (sample_rate != 16000) throw Error("stoi: only 16 kHz input supported");
    if (reference.size() < static_cast<size_t>(sample_rate))
        throw Error("stoi: input too short (need at least 1 s)");

    auto x = resample_poly(reference, kStoiFs, sample_rate);
    auto y = resample_poly(estimate, kStoiFs, sample_rate);

    // silent-frame removal keyed on reference frame energies
    const int hop = kStoiFrame / 2;
    const auto w = hann_window(kStoiFrame);
    const int64_t n_frames_all = x.size() >= kStoiFrame ? 1 + (static_cast<int64_t>(x.size()) - kStoiFrame) / hop : 0;
    if (n_frames_all <= 0) throw Error("stoi: input too short");
    std::vector<double> energies_db(n_frames_all);
    double max_energy = -std::numeric_limits<double>::max();
    for (int64_t k = 0; k < n_frames_all; ++k) {
        double e = 0.0;
        for (int i = 0; i < kStoiFrame; ++i) {
            const double v = w[i] * x[k * hop + i];
            e += v * v;
        }
        energies_db[k] = 20.0 * std::log10(std::sqrt(e) + kEps);
        max_energy = std::max(max_energy, energies_db[k]);
    }
    std::vector<int64_t> kept;
    for (int64_t k = 0; k < n_frames_all; ++k)
        if (max_energy - kStoiDynRange - energies_db[k] < 0.0) kept.push_back(k);
    if (kept.empty()) throw Error("stoi: reference is silent");

    const int64_t out_len = (static_cast<int64_t>(kept.size()) - 1) * hop + kStoiFrame;
    std::vector<double> x_sil(out_len, 0.0), y_sil(out_len, 0.0);
    for (size_t j = 0; j < kept.size(); ++j) {
        const int64_t src = kept[j] * hop;
        const int64_t dst = static_cast<int64_t>(j) * hop;
        for (int i = 0; i < kStoiFrame; ++i) {
            x_sil[dst + i] += w[i] * x[src + i];
            y_sil[dst + i] += w[i] * y[src + i];
        }
    }

    // band energies: bands x frames
    const auto bands = third_octave_bins();
    const int64_t n_frames = 1 + (out_len - kStoiFrame) / hop;
    if (n_frames < kStoiSegment) throw Error("stoi: input too short after silence removal");
    std::vector<double> X(kStoiBands * n_frames), Y(kStoiBands * n_frames);
    std::vector<double> buf(kStoiFft, 0.0);
    for (int64_t k = 0; k < n_frames; ++k) {
        for (int pass = 0; pass < 2; ++pass) {
            const auto& sig = pass == 0 ? x_sil : y_sil;
            std::fill(buf.begin(), buf.end(), 0.0);
            for (int i = 0; i < kStoiFrame; ++i) buf[i] = w[i] * sig[k * hop + i];
            const auto spec = fft::rfft(buf);
            auto& out = pass == 0 ? X : Y;
            for (int b = 0; b < kStoiBands; ++b) {
                double e = 0.0;
                for (int bin : bands[b]) e += std::norm(spec[bin]);
                out[b * n_frames + k] = std::sqrt(e);
            }
        }
    }

    // sliding 30-frame segments: normalize, clip, correlate
    const double clip_gain = 1.0 + std::pow(10.0, -kStoiBeta / 20.0);
    const int64_t n_segments = n_frames - kStoiSegment + 1;
    double total = 0.0;
    std::vector<double> ys(kStoiSegment);
    for (int64_t m = 0; m < n_segments; ++m) {
        for (int b = 0; b < kStoiBands; ++b) {
            const double* xs = &X[b * n_frames + m];
            const double* ys_raw = &Y[b * n_frames + m];
            double ex = 0.0, ey = 0.0;
            for (int i = 0; i < kStoiSegment; ++i) {
                ex += xs[i] * xs[i];
                ey += ys_raw[i] * ys_raw[i];
            }
            const double alpha = std::sqrt(ex / (ey + kEps));
            for (int i = 0; i < kStoiSegment; ++i) ys[i] = std::min(alpha * ys_raw[i], xs[i] * clip_gain);

            double mx = 0.0, my = 0.0;
            for (int i = 0; i < kStoiSegment; ++i) {
                mx += xs[i];
                my += ys[i];
            }
            mx /= kStoiSegment;
            my /= kStoiSegment;
            double nx = 0.0, ny = 0.0, corr = 0.0;
            for (int i = 0; i < kStoiSegment; ++i) {
                const double a = xs[i] - mx;
                const double c = ys[i] - my;
                nx += a * a;
                ny += c * c;
                corr += a * c;
            }
            total += corr / ((std::sqrt(nx) + kEps) * (std::sqrt(ny) + kEps));
        }
    }
    return total / (static_cast<double>(kStoiBands) * n_segments);
}

}  // namespace dtln

#endif  // DTLN_STOI_HPP
