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
#include <complex>
#include <vector>

#include "dtln/fft.hpp"
#include "dtln/rng.hpp"

using namespace dtln;

namespace {

std::vector<double> random_frame(size_t n, uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    return x;
}

}  // namespace

TEST_CASE("rfft of zero frame is zero", "[fft]") {
    std::vector<double> x(512, 0.0);
    auto X = fft::rfft(x);
    REQUIRE(X.size() == 257);
    for (const auto& b : X) {
        CHECK(b.real() == 0.0);
        CHECK(b.imag() == 0.0);
    }
}

TEST_CASE("rfft of unit impulse is all-ones", "[fft]") {
    std::vector<double> x(512, 0.0);
    x[0] = 1.0;
    auto X = fft::rfft(x);
    for (const auto& b : X) {
        CHECK(b.real() == Catch::Approx(1.0).margin(1e-12));
        CHECK(b.imag() == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("rfft of cosine concentrates in one bin", "[fft]") {
    std::vector<double> x(512);
    for (int n = 0; n < 512; ++n) x[n] = std::cos(2.0 * M_PI * 4.0 * n / 512.0);
    auto X = fft::rfft(x);
    for (size_t f = 0; f < X.size(); ++f) {
        if (f == 4) {
            CHECK(X[f].real() == Catch::Approx(256.0).margin(1e-9));
            CHECK(X[f].imag() == Catch::Approx(0.0).margin(1e-9));
        } else {
            CHECK(std::abs(X[f]) < 1e-9);
        }
    }
}

TEST_CASE("irfft of zero spectrum is zero", "[fft]") {
    std::vector<std::complex<double>> X(257, {0.0, 0.0});
    auto x = fft::irfft(X);
    REQUIRE(x.size() == 512);
    for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("irfft of DC-only spectrum is constant", "[fft]") {
    std::vector<std::complex<double>> X(257, {0.0, 0.0});
    X[0] = {512.0, 0.0};
    auto x = fft::irfft(X);
    for (double v : x) CHECK(v == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("rfft/irfft round trip within 1e-10", "[fft]") {
    auto x = random_frame(512, 12345);
    auto back = fft::irfft(fft::rfft(x));
    double max_err = 0.0;
    for (size_t n = 0; n < x.size(); ++n) max_err = std::max(max_err, std::fabs(x[n] - back[n]));
    CHECK(max_err < 1e-10);
}

TEST_CASE("Parseval identity within 1e-8 relative", "[fft]") {
    auto x = random_frame(512, 777);
    auto X = fft::rfft(x);
    double time_energy = 0.0;
    for (double v : x) time_energy += v * v;
    double freq_energy = std::norm(X[0]) + std::norm(X[256]);
    for (size_t f = 1; f < 256; ++f) freq_energy += 2.0 * std::norm(X[f]);
    freq_energy /= 512.0;
    CHECK(std::fabs(time_energy - freq_energy) / time_energy < 1e-8);
}

TEST_CASE("rfft matches direct DFT on a small frame", "[fft]") {
    auto x = random_frame(16, 42);
    auto X = fft::rfft(x);
    for (size_t f = 0; f <= 8; ++f) {
        std::complex<double> direct(0.0, 0.0);
        for (size_t n = 0; n < 16; ++n) {
            const double a = -2.0 * M_PI * f * n / 16.0;
            direct += x[n] * std::complex<double>(std::cos(a), std::sin(a));
        }
        CHECK(std::abs(X[f] - direct) < 1e-12);
    }
}

TEST_CASE("irfft_adjoint and rfft_adjoint satisfy <A x, y> == <x, A* y>", "[fft]") {
    // irfft as linear map A: C^257 (as R^514) -> R^512.
    Rng rng(99);
    std::vector<std::complex<double>> v(257);
    for (size_t f = 0; f < 257; ++f) v[f] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    v[0].imag(0.0);
    v[256].imag(0.0);
    auto y = random_frame(512, 5);

    auto Av = fft::irfft(v);
    double lhs = 0.0;
    for (size_t n = 0; n < 512; ++n) lhs += Av[n] * y[n];

    auto Aty = fft::irfft_adjoint(y);
    double rhs = 0.0;
    for (size_t f = 0; f < 257; ++f)
        rhs += v[f].real() * Aty[f].real() + v[f].imag() * Aty[f].imag();
    CHECK(lhs == Catch::Approx(rhs).epsilon(1e-10));

    // rfft as linear map B: R^512 -> C^257 (as R^514).
    auto x = random_frame(512, 6);
    auto Bx = fft::rfft(x);
    std::vector<std::complex<double>> u(257);
    for (size_t f = 0; f < 257; ++f) u[f] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    u[0].imag(0.0);
    u[256].imag(0.0);
    double lhs2 = 0.0;
    for (size_t f = 0; f < 257; ++f)
        lhs2 += Bx[f].real() * u[f].real() + Bx[f].imag() * u[f].imag();
    auto Btu = fft::rfft_adjoint(u);
    double rhs2 = 0.0;
    for (size_t n = 0; n < 512; ++n) rhs2 += x[n] * Btu[n];
    CHECK(lhs2 == Catch::Approx(rhs2).epsilon(1e-10));
}

TEST_CASE("float rfft round trip is accurate enough for streaming", "[fft]") {
    Rng rng(31);
    std::vector<float> x(512);
    for (auto& v : x) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    auto back = fft::irfft(fft::rfft(x));
    float max_err = 0.0f;
    for (size_t n = 0; n < x.size(); ++n) max_err = std::max(max_err, std::fabs(x[n] - back[n]));
    CHECK(max_err < 1e-5f);
}
