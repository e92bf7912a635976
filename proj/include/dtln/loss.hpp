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

#ifndef DTLN_LOSS_HPP
#define DTLN_LOSS_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "dtln/errors.hpp"
#include "dtln/signal.hpp"

namespace dtln {

constexpr double kSnrEps = 1e-8;            // stabilizer inside the SNR ratio
constexpr double kSilentRefPower = 1e-10;   // below this the target is "silent"
constexpr double kSiSnrCapDb = 60.0;        // SI-SNR / SI-SDR report cap

// Scale-sensitive negative SNR, in dB, lower is better:
//   loss = -10*log10((sum ref^2 + eps) / (sum (ref-est)^2 + eps)).
// Returns nullopt for a silent target (the sample should be skipped).
inline std::optional<double> neg_snr_loss(const std::vector<double>& estimate,
                                          const std::vector<double>& reference) {
    if (estimate.size() != reference.size()) throw ShapeError("neg_snr_loss: length mismatch");
    double ref_pow = 0.0, err_pow = 0.0;
    for (size_t n = 0; n < reference.size(); ++n) {
        ref_pow += reference[n] * reference[n];
        const double e = reference[n] - estimate[n];
        err_pow += e * e;
    }
    if (reference.empty() || ref_pow / reference.size() < kSilentRefPower) return std::nullopt;
    return -10.0 * std::log10((ref_pow + kSnrEps) / (err_pow + kSnrEps));
}

// Loss value plus d(loss)/d(estimate): the analytic gradient of the ratio
// form, (20/ln10) * (est - ref) / (err_pow + eps).
inline std::optional<double> neg_snr_loss_grad(const std::vector<double>& estimate,
                                               const std::vector<double>& reference,
                                               std::vector<double>& d_estimate) {
    if (estimate.size() != reference.size()) throw ShapeError("neg_snr_loss: length mismatch");
    double ref_pow = 0.0, err_pow = 0.0;
    for (size_t n = 0; n < reference.size(); ++n) {
        ref_pow += reference[n] * reference[n];
        const double e = reference[n] - estimate[n];
        err_pow += e * e;
    }
    if (reference.empty() || ref_pow / reference.size() < kSilentRefPower) return std::nullopt;
    const double scale = (20.0 / std::log(10.0)) / (err_pow + kSnrEps);
    d_estimate.resize(estimate.size());
    for (size_t n = 0; n < estimate.size(); ++n) d_estimate[n] = scale * (estimate[n] - reference[n]);
    return -10.0 * std::log10((ref_pow + kSnrEps) / (err_pow + kSnrEps));
}

// Scale-invariant SNR in dB (doubles as the SI-SDR metric): project the
// estimate onto the reference after mean removal, compare target energy to
// residual energy, cap at +-60 dB.
inline double si_snr(const std::vector<double>& estimate, const std::vector<double>& reference) {
    if (estimate.size() != reference.size()) throw ShapeError("si_snr: length mismatch");
    if (reference.empty()) throw Error("si_snr: empty reference");
    const size_t n = reference.size();
    double mean_e = 0.0, mean_r = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mean_e += estimate[i];
        mean_r += reference[i];
    }
    mean_e /= n;
    mean_r /= n;
    double dot = 0.0, ref_pow = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double e = estimate[i] - mean_e;
        const double r = reference[i] - mean_r;
        dot += e * r;
        ref_pow += r * r;
    }
    if (ref_pow == 0.0) throw Error("si_snr: zero reference");
    const double alpha = dot / ref_pow;
    double target_pow = 0.0, noise_pow = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = reference[i] - mean_r;
        const double e = estimate[i] - mean_e;
        const double s = alpha * r;
        target_pow += s * s;
        noise_pow += (e - s) * (e - s);
    }
    if (target_pow == 0.0) return -kSiSnrCapDb;
    if (noise_pow == 0.0) return kSiSnrCapDb;
    const double value = 10.0 * std::log10(target_pow / noise_pow);
    return std::min(kSiSnrCapDb, std::max(-kSiSnrCapDb, value));
}

inline double si_sdr(const std::vector<double>& estimate, const std::vector<double>& reference) {
    return si_snr(estimate, reference);
}

// Mean squared error between framed STFT magnitudes. Phase-blind by
// construction; kept as a comparison objective.
inline double magnitude_mse_frames(const std::vector<std::vector<double>>& est_frames,
                                   const std::vector<std::vector<double>>& ref_frames) {
    if (est_frames.size() != ref_frames.size()) throw ShapeError("magnitude_mse: frame count mismatch");
    if (est_frames.empty()) throw Error("magnitude_mse: no frames");
    double acc = 0.0;
    size_t count = 0;
    for (size_t k = 0; k < est_frames.size(); ++k) {
        const auto me = mag_phase(fft::rfft(est_frames[k])).magnitude;
        const auto mr = mag_phase(fft::rfft(ref_frames[k])).magnitude;
        for (size_t f = 0; f < me.size(); ++f) {
            const double d = me[f] - mr[f];
            acc += d * d;
            ++count;
        }
    }
    return acc / static_cast<double>(count);
}

inline double magnitude_mse_loss(const std::vector<double>& estimate, const std::vector<double>& reference,
                                 size_t frame_len = kFrameLen, size_t hop = kHop) {
    if (estimate.size() != reference.size()) throw ShapeError("magnitude_mse: length mismatch");
    if (estimate.size() < frame_len) throw Error("magnitude_mse: input shorter than one frame");
    return magnitude_mse_frames(frame_signal(estimate, frame_len, hop),
                                frame_signal(reference, frame_len, hop));
}

}  // namespace dtln

#endif  // DTLN_LOSS_HPP
