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

#ifndef DTLN_FFT_HPP
#define DTLN_FFT_HPP

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include "dtln/errors.hpp"

namespace dtln::fft {

inline bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

// Forward twiddles exp(-2*pi*i*k/n), k in [0, n/2). Tables are built once per
// size and shared; std::map keeps node addresses stable under insertion.
template <typename T>
const std::vector<std::complex<T>>& twiddles(size_t n) {
    static std::mutex mu;
    static std::map<size_t, std::vector<std::complex<T>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::vector<std::complex<T>> w(n / 2);
        const double step = -2.0 * M_PI / static_cast<double>(n);
        for (size_t k = 0; k < n / 2; ++k) {
            const double a = step * static_cast<double>(k);
            w[k] = std::complex<T>(static_cast<T>(std::cos(a)), static_cast<T>(std::sin(a)));
        }
        it = cache.emplace(n, std::move(w)).first;
    }
    return it->second;
}

}  // namespace detail

// In-place iterative radix-2 complex FFT. inverse=true applies conjugate
// twiddles and no scaling; callers divide by n themselves.
template <typename T>
void cfft(std::complex<T>* a, size_t n, bool inverse) {
    if (!is_pow2(n)) throw ShapeError("fft: size must be a power of two");
    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const auto& w = detail::twiddles<T>(n);
    for (size_t len = 2; len <= n; len <<= 1) {
        const size_t stride = n / len;
        for (size_t i = 0; i < n; i += len) {
            for (size_t k = 0; k < len / 2; ++k) {
                std::complex<T> tw = w[k * stride];
                if (inverse) tw = std::conj(tw);
                const std::complex<T> u = a[i + k];
                const std::complex<T> v = a[i + k + len / 2] * tw;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

// Real-input DFT, bins 0..L/2: X[f] = sum_n x[n] exp(-2*pi*i*f*n/L).
// Computed with one complex FFT of size L/2 (even/odd packing).
template <typename T>
std::vector<std::complex<T>> rfft(const std::vector<T>& x) {
    const size_t L = x.size();
    if (!is_pow2(L) || L < 2) throw ShapeError("rfft: frame length must be a power of two >= 2");
    const size_t M = L / 2;
    std::vector<std::complex<T>> z(M);
    for (size_t k = 0; k < M; ++k) z[k] = std::complex<T>(x[2 * k], x[2 * k + 1]);
    cfft(z.data(), M, false);

    const auto& w = detail::twiddles<T>(L);  // exp(-i*pi*k/M) = exp(-2*pi*i*k/L)
    std::vector<std::complex<T>> X(M + 1);
    for (size_t k = 0; k <= M; ++k) {
        const std::complex<T> Zk = (k == M) ? z[0] : z[k];
        const std::complex<T> Zmk = std::conj(k == 0 ? z[0] : z[M - k]);
        const std::complex<T> even = T(0.5) * (Zk + Zmk);
        const std::complex<T> odd = std::complex<T>(0, T(-0.5)) * (Zk - Zmk);
        const std::complex<T> tw = (k == M) ? std::complex<T>(-1, 0) : w[k];
        X[k] = even + tw * odd;
    }
    X[0] = std::complex<T>(X[0].real(), 0);
    X[M] = std::complex<T>(X[M].real(), 0);
    return X;
}

// Exact inverse of rfft. Input has L/2+1 bins, output L samples.
template <typename T>
std::vector<T> irfft(const std::vector<std::complex<T>>& X) {
    if (X.size() < 2) throw ShapeError("irfft: need at least 2 bins");
    const size_t M = X.size() - 1;
    const size_t L = 2 * M;
    if (!is_pow2(L)) throw ShapeError("irfft: implied frame length must be a power of two");

    const auto& w = detail::twiddles<T>(L);
    std::vector<std::complex<T>> z(M);
    for (size_t k = 0; k < M; ++k) {
        const std::complex<T> Xk = X[k];
        const std::complex<T> Xmk = std::conj(X[M - k]);
        const std::complex<T> even = T(0.5) * (Xk + Xmk);
        // conj(w[k]) = exp(+i*pi*k/M)
        const std::complex<T> odd = std::conj(w[k]) * (T(0.5) * (Xk - Xmk));
        z[k] = even + std::complex<T>(0, 1) * odd;
    }
    cfft(z.data(), M, true);
    std::vector<T> x(L);
    const T scale = T(1) / static_cast<T>(M);
    for (size_t k = 0; k < M; ++k) {
        x[2 * k] = z[k].real() * scale;
        x[2 * k + 1] = z[k].imag() * scale;
    }
    return x;
}

// Adjoint of irfft as a linear map R^{M+1 x 2} -> R^L:
//   d_spectrum[f] = (w_f / L) * rfft(d_frame)[f],  w = [1, 2, ..., 2, 1].
// Used by backpropagation through spectral masking.
template <typename T>
std::vector<std::complex<T>> irfft_adjoint(const std::vector<T>& d_frame) {
    const size_t L = d_frame.size();
    auto G = rfft(d_frame);
    const size_t M = L / 2;
    const T inv_l = T(1) / static_cast<T>(L);
    for (size_t f = 0; f <= M; ++f) {
        const T wf = (f == 0 || f == M) ? T(1) : T(2);
        G[f] *= wf * inv_l;
    }
    return G;
}

// Adjoint of rfft as a linear map R^L -> R^{M+1 x 2}:
//   d_frame = L * irfft(d_spectrum / w).
template <typename T>
std::vector<T> rfft_adjoint(const std::vector<std::complex<T>>& d_spectrum) {
    const size_t M = d_spectrum.size() - 1;
    const size_t L = 2 * M;
    std::vector<std::complex<T>> scaled(d_spectrum);
    for (size_t f = 0; f <= M; ++f) {
        const T wf = (f == 0 || f == M) ? T(1) : T(2);
        scaled[f] /= wf;
    }
    auto x = irfft(scaled);
    for (auto& v : x) v *= static_cast<T>(L);
    return x;
}

}  // namespace dtln::fft

#endif  // DTLN_FFT_HPP
