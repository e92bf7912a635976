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

#include "dtln/rng.hpp"
#include "dtln/stoi.hpp"
#include "support/testsignals.hpp"

using namespace dtln;
using namespace testsignals;

// Expected values generated by tests/oracle/stoi_reference.py (NumPy/SciPy
// implementation of the published algorithm) on the identical signals:
//   clean_vs_clean   = 1.000000
//   mix0db_vs_clean  = 0.759015
//   mix20db_vs_clean = 0.823449
//   noise_vs_clean   = 0.362656
// Agreement tolerance is +-0.02 to absorb resampler differences.
namespace {
constexpr double kOracleMix0 = 0.759015;
constexpr double kOracleMix20 = 0.823449;
constexpr double kOracleNoise = 0.362656;
}  // namespace

TEST_CASE("stoi of identical clean speech is ~1", "[stoi]") {
    auto speech = synth_speech(3.0);
    const double score = stoi(speech, speech);
    CHECK(score > 0.99);
    CHECK(score <= 1.0 + 1e-9);
}

TEST_CASE("stoi matches the reference implementation on noisy mixtures", "[stoi]") {
    auto speech = synth_speech(3.0);
    auto noise = xorshift_noise(3.0, 0x9E3779B97F4A7C15ULL);
    const double s0 = stoi(mix_at_snr_simple(speech, noise, 0.0), speech);
    const double s20 = stoi(mix_at_snr_simple(speech, noise, 20.0), speech);
    CHECK(s0 == Catch::Approx(kOracleMix0).margin(0.02));
    CHECK(s20 == Catch::Approx(kOracleMix20).margin(0.02));
    // monotonicity: the 20 dB mixture is more intelligible than the 0 dB one
    CHECK(s20 > s0);
}

TEST_CASE("stoi of independent noise against speech is low", "[stoi]") {
    auto speech = synth_speech(3.0);
    auto noise = xorshift_noise(3.0, 0x9E3779B97F4A7C15ULL);
    const double score = stoi(noise, speech);
    CHECK(score == Catch::Approx(kOracleNoise).margin(0.02));
    CHECK(score < 0.4);
}

TEST_CASE("stoi stays within [-1, 1]", "[stoi]") {
    auto speech = synth_speech(2.0);
    for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        auto other = xorshift_noise(2.0, seed);
        const double score = stoi(other, speech);
        CHECK(score >= -1.0);
        CHECK(score <= 1.0);
    }
}

TEST_CASE("stoi rejects too-short and mismatched input", "[stoi]") {
    auto speech = synth_speech(0.5);
    REQUIRE_THROWS_AS(stoi(speech, speech), Error);
    auto s1 = synth_speech(2.0);
    auto s2 = synth_speech(1.5);
    REQUIRE_THROWS_AS(stoi(s1, s2), ShapeError);
    REQUIRE_THROWS_AS(stoi(s1, s1, 44100), Error);
}

TEST_CASE("polyphase resampler reproduces a sine at the new rate", "[stoi]") {
    // 1 kHz sine at 16 kHz -> 10 kHz; interior samples must match the
    // analytic sine closely (zero-phase filter).
    const size_t n = 16000;
    std::vector<double> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = std::sin(2.0 * M_PI * 1000.0 * i / 16000.0);
    auto y = stoi_detail::resample_poly(x, 10000, 16000);
    REQUIRE(y.size() == 10000);
    double max_err = 0.0;
    for (size_t m = 200; m + 200 < y.size(); ++m) {
        const double want = std::sin(2.0 * M_PI * 1000.0 * m / 10000.0);
        max_err = std::max(max_err, std::fabs(y[m] - want));
    }
    CHECK(max_err < 1e-3);
}
