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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dtln/loss.hpp"
#include "dtln/rng.hpp"
#include "support/gradcheck.hpp"

using namespace dtln;

namespace {

std::vector<double> random_signal(size_t n, uint64_t seed, double amp = 0.5) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-amp, amp);
    return x;
}

// Gram-Schmidt: a vector orthogonal to ref with prescribed energy ratio.
std::vector<double> orthogonal_error(const std::vector<double>& ref, double energy_ratio, uint64_t seed) {
    auto e = random_signal(ref.size(), seed, 1.0);
    double dot = 0.0, ref_pow = 0.0;
    for (size_t i = 0; i < ref.size(); ++i) {
        dot += e[i] * ref[i];
        ref_pow += ref[i] * ref[i];
    }
    for (size_t i = 0; i < e.size(); ++i) e[i] -= dot / ref_pow * ref[i];
    double e_pow = 0.0;
    for (double v : e) e_pow += v * v;
    const double scale = std::sqrt(energy_ratio * ref_pow / e_pow);
    for (double& v : e) v *= scale;
    return e;
}

}  // namespace

TEST_CASE("neg_snr_loss of a perfect estimate hits the epsilon floor", "[loss]") {
    // unit-power reference of 1 s
    std::vector<double> ref(16000, 1.0);
    auto loss = neg_snr_loss(ref, ref);
    REQUIRE(loss.has_value());
    CHECK(*loss < -60.0);
}

TEST_CASE("neg_snr_loss analytic half-amplitude case", "[loss]") {
    auto ref = random_signal(16000, 1, 0.5);
    std::vector<double> est(ref.size());
    for (size_t i = 0; i < ref.size(); ++i) est[i] = 0.5 * ref[i];
    auto loss = neg_snr_loss(est, ref);
    REQUIRE(loss.has_value());
    CHECK(*loss == Catch::Approx(-10.0 * std::log10(4.0)).margin(1e-3));
    CHECK(*loss == Catch::Approx(-6.021).margin(1e-3));
}

TEST_CASE("neg_snr_loss with orthogonal unit-ratio error is ~0 dB", "[loss]") {
    auto ref = random_signal(16000, 2, 0.5);
    auto err = orthogonal_error(ref, 1.0, 3);
    std::vector<double> est(ref.size());
    for (size_t i = 0; i < ref.size(); ++i) est[i] = ref[i] + err[i];
    auto loss = neg_snr_loss(est, ref);
    REQUIRE(loss.has_value());
    CHECK(*loss == Catch::Approx(0.0).margin(1e-3));
}

TEST_CASE("neg_snr_loss signals silent targets instead of crashing", "[loss]") {
    std::vector<double> ref(16000, 0.0), est(16000, 0.1);
    auto loss = neg_snr_loss(est, ref);
    CHECK_FALSE(loss.has_value());
}

TEST_CASE("neg_snr_loss is a ratio: joint scaling cancels", "[loss]") {
    auto ref = random_signal(8000, 4, 0.5);
    auto est = random_signal(8000, 5, 0.5);
    const double base = *neg_snr_loss(est, ref);
    for (double a : {0.3, 2.0, -1.5}) {
        std::vector<double> es(est.size()), rs(ref.size());
        for (size_t i = 0; i < est.size(); ++i) {
            es[i] = a * est[i];
            rs[i] = a * ref[i];
        }
        CHECK(*neg_snr_loss(es, rs) == Catch::Approx(base).margin(1e-6));
    }
}

TEST_CASE("neg_snr_loss is scale-sensitive in the estimate alone", "[loss]") {
    auto ref = random_signal(8000, 6, 0.5);
    std::vector<double> half(ref.size());
    for (size_t i = 0; i < ref.size(); ++i) half[i] = 0.5 * ref[i];
    const double exact = *neg_snr_loss(ref, ref);
    const double scaled = *neg_snr_loss(half, ref);
    CHECK(std::fabs(exact - scaled) > 1.0);
}

TEST_CASE("neg_snr_loss gradient matches finite differences", "[loss]") {
    auto ref = random_signal(64, 7, 0.5);
    auto est = random_signal(64, 8, 0.5);
    std::vector<double> grad;
    auto loss = neg_snr_loss_grad(est, ref, grad);
    REQUIRE(loss.has_value());
    CHECK(*loss == Catch::Approx(*neg_snr_loss(est, ref)));

    auto f = [&]() { return *neg_snr_loss(est, ref); };
    auto rep = gradcheck::check_buffer(f, est.data(), est.size(), grad.data());
    CHECK(rep.failed == 0);
}

TEST_CASE("si_snr caps at +60 dB for scaled copies", "[loss]") {
    auto ref = random_signal(16000, 9, 0.5);
    std::vector<double> est(ref.size());
    for (size_t i = 0; i < ref.size(); ++i) est[i] = 3.0 * ref[i];
    CHECK(si_snr(est, ref) == 60.0);
    CHECK(si_snr(ref, ref) == 60.0);
}

TEST_CASE("si_snr of an orthogonal estimate sits at the -60 dB cap", "[loss]") {
    auto ref = random_signal(16000, 10, 0.5);
    // remove the mean first so orthogonality survives internal mean removal
    double mean = 0.0;
    for (double v : ref) mean += v;
    mean /= ref.size();
    for (double& v : ref) v -= mean;
    auto est = orthogonal_error(ref, 1.0, 11);
    double emean = 0.0;
    for (double v : est) emean += v;
    emean /= est.size();
    for (double& v : est) v -= emean;
    // re-orthogonalize exactly after mean removal
    double dot = 0.0, rp = 0.0;
    for (size_t i = 0; i < ref.size(); ++i) {
        dot += est[i] * ref[i];
        rp += ref[i] * ref[i];
    }
    for (size_t i = 0; i < est.size(); ++i) est[i] -= dot / rp * ref[i];
    CHECK(si_snr(est, ref) <= -59.0);
}

TEST_CASE("si_snr analytic 10 dB case", "[loss]") {
    auto ref = random_signal(16000, 12, 0.5);
    double mean = 0.0;
    for (double v : ref) mean += v;
    mean /= ref.size();
    for (double& v : ref) v -= mean;
    auto err = orthogonal_error(ref, 0.1, 13);
    double emean = 0.0;
    for (double v : err) emean += v;
    emean /= err.size();
    for (double& v : err) v -= emean;
    double dot = 0.0, rp = 0.0;
    for (size_t i = 0; i < ref.size(); ++i) {
        dot += err[i] * ref[i];
        rp += ref[i] * ref[i];
    }
    for (size_t i = 0; i < err.size(); ++i) err[i] -= dot / rp * ref[i];
    double ep = 0.0;
    for (double v : err) ep += v * v;
    const double target = 0.1 * rp;
    for (double& v : err) v *= std::sqrt(target / ep);

    std::vector<double> est(ref.size());
    for (size_t i = 0; i < ref.size(); ++i) est[i] = ref[i] + err[i];
    CHECK(si_snr(est, ref) == Catch::Approx(10.0).margin(1e-3));
}

TEST_CASE("si_snr is scale-invariant in the estimate", "[loss]") {
    auto ref = random_signal(8000, 14, 0.5);
    auto est = random_signal(8000, 15, 0.5);
    const double base = si_snr(est, ref);
    for (double a : {0.1, 3.0, 1000.0}) {
        std::vector<double> es(est.size());
        for (size_t i = 0; i < est.size(); ++i) es[i] = a * est[i];
        CHECK(si_snr(es, ref) == Catch::Approx(base).margin(1e-9));
    }
}

TEST_CASE("si_snr rejects a zero reference", "[loss]") {
    std::vector<double> ref(100, 0.0), est(100, 0.1);
    REQUIRE_THROWS_AS(si_snr(est, ref), Error);
}

TEST_CASE("magnitude MSE is zero for exact and sign-flipped estimates", "[loss]") {
    auto ref = random_signal(2048, 16, 0.5);
    CHECK(magnitude_mse_loss(ref, ref) == 0.0);
    std::vector<double> neg(ref.size());
    for (size_t i = 0; i < ref.size(); ++i) neg[i] = -ref[i];
    // phase-blind: a pi phase rotation is invisible
    CHECK(magnitude_mse_loss(neg, ref) == Catch::Approx(0.0).margin(1e-20));
}

TEST_CASE("magnitude MSE of a zero estimate is the mean squared magnitude", "[loss]") {
    auto ref = random_signal(2048, 17, 0.5);
    std::vector<double> zero(ref.size(), 0.0);
    const auto frames = frame_signal(ref, kFrameLen, kHop);
    double acc = 0.0;
    size_t count = 0;
    for (const auto& fr : frames) {
        auto mp = mag_phase(fft::rfft(fr));
        for (double m : mp.magnitude) {
            acc += m * m;
            ++count;
        }
    }
    CHECK(magnitude_mse_loss(zero, ref) == Catch::Approx(acc / count).epsilon(1e-12));
}

TEST_CASE("magnitude MSE is invariant to per-frame circular shifts", "[loss]") {
    // circular time shift of a frame rotates every bin's phase but keeps
    // magnitudes; the frame-level objective cannot see it
    auto ref = random_signal(2048, 18, 0.5);
    auto ref_frames = frame_signal(ref, kFrameLen, kHop);
    auto est_frames = ref_frames;
    Rng rng(19);
    for (auto& fr : est_frames) {
        const size_t shift = rng.uniform_int(fr.size());
        std::rotate(fr.begin(), fr.begin() + shift, fr.end());
    }
    CHECK(magnitude_mse_frames(est_frames, ref_frames) == Catch::Approx(0.0).margin(1e-20));
}

TEST_CASE("magnitude MSE rejects too-short input", "[loss]") {
    std::vector<double> a(100, 0.1), b(100, 0.2);
    REQUIRE_THROWS_AS(magnitude_mse_loss(a, b), Error);
}
