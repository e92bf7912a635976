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

#ifndef DTLN_LAYERS_HPP
#define DTLN_LAYERS_HPP

#include <cmath>
#include <cstring>
#include <vector>

#include "dtln/errors.hpp"
#include "dtln/matrix.hpp"
#include "dtln/rng.hpp"

namespace dtln {

constexpr double kIlnEps = 1e-7;

template <typename T>
inline T sigmoid(T x) {
    return T(1) / (T(1) + std::exp(-x));
}

// ---------------------------------------------------------------------------
// LSTM. Gate order in all 4H-sized tensors is (input i, forget f, cell g,
// output o). Weight views point into the model's parameter storage.
// ---------------------------------------------------------------------------

template <typename T>
struct LstmWeights {
    const T* W;  // 4H x D input weights
    const T* R;  // 4H x H recurrent weights
    const T* b;  // 4H biases
    size_t H = 0;
    size_t D = 0;
};

template <typename T>
struct LstmGrads {
    T* W;
    T* R;
    T* b;
};

template <typename T>
struct LstmState {
    std::vector<T> h;
    std::vector<T> c;

    explicit LstmState(size_t H = 0) : h(H, T(0)), c(H, T(0)) {}
    void reset() {
        std::fill(h.begin(), h.end(), T(0));
        std::fill(c.begin(), c.end(), T(0));
    }
};

// Time-major forward cache for backpropagation through time.
template <typename T>
struct LstmCache {
    size_t steps = 0, H = 0;
    std::vector<T> gates;   // steps x 4H, post-activation
    std::vector<T> c;       // steps x H
    std::vector<T> h;       // steps x H
    std::vector<T> tanh_c;  // steps x H

    void resize(size_t steps_, size_t H_) {
        steps = steps_;
        H = H_;
        gates.assign(steps * 4 * H, T(0));
        c.assign(steps * H, T(0));
        h.assign(steps * H, T(0));
        tanh_c.assign(steps * H, T(0));
    }
};

namespace detail {

// One recurrence step. gate_buf has 4H scratch; h_out may alias state.h.
template <typename T>
void lstm_step_impl(const LstmWeights<T>& w, const T* x, LstmState<T>& state, T* gate_buf, T* tanh_c_out) {
    const size_t H = w.H;
    matvec(w.W, 4 * H, w.D, x, gate_buf);
    matvec_acc(w.R, 4 * H, H, state.h.data(), gate_buf);
    T* gi = gate_buf;
    T* gf = gate_buf + H;
    T* gg = gate_buf + 2 * H;
    T* go = gate_buf + 3 * H;
    for (size_t j = 0; j < H; ++j) {
        const T i = sigmoid(gi[j] + w.b[j]);
        const T f = sigmoid(gf[j] + w.b[H + j]);
        const T g = std::tanh(gg[j] + w.b[2 * H + j]);
        const T o = sigmoid(go[j] + w.b[3 * H + j]);
        const T c_new = f * state.c[j] + i * g;
        const T tc = std::tanh(c_new);
        gi[j] = i;
        gf[j] = f;
        gg[j] = g;
        go[j] = o;
        state.c[j] = c_new;
        state.h[j] = o * tc;
        if (tanh_c_out) tanh_c_out[j] = tc;
    }
}

}  // namespace detail

// Single step: returns h' and advances the state. Rejects NaN inputs.
template <typename T>
std::vector<T> lstm_step(const LstmWeights<T>& w, const T* x, LstmState<T>& state) {
    for (size_t j = 0; j < w.D; ++j)
        if (std::isnan(x[j])) throw Error("lstm_step: NaN in input");
    std::vector<T> gates(4 * w.H);
    detail::lstm_step_impl(w, x, state, gates.data(), static_cast<T*>(nullptr));
    return state.h;
}

// Whole-sequence forward. X is steps x D row-major; h_seq is steps x H.
// When cache is non-null the per-step activations are retained for BPTT.
template <typename T>
void lstm_forward(const LstmWeights<T>& w, const T* X, size_t steps, LstmState<T>& state, T* h_seq,
                  LstmCache<T>* cache) {
    const size_t H = w.H;
    if (state.h.size() != H) throw ShapeError("lstm_forward: state size != H");
    if (cache) cache->resize(steps, H);
    std::vector<T> gate_buf;
    for (size_t t = 0; t < steps; ++t) {
        T* gates = cache ? cache->gates.data() + t * 4 * H : nullptr;
        if (!gates) {
            gate_buf.resize(4 * H);
            gates = gate_buf.data();
        }
        T* tanh_c = cache ? cache->tanh_c.data() + t * H : nullptr;
        detail::lstm_step_impl(w, X + t * w.D, state, gates, tanh_c);
        std::memcpy(h_seq + t * H, state.h.data(), H * sizeof(T));
        if (cache) {
            std::memcpy(cache->c.data() + t * H, state.c.data(), H * sizeof(T));
            std::memcpy(cache->h.data() + t * H, state.h.data(), H * sizeof(T));
        }
    }
}

// BPTT over a cached sequence. dH is the upstream gradient (steps x H);
// parameter gradients are accumulated into g; dX (steps x D) is written if
// non-null. The sequence is assumed to have started from a zero state.
template <typename T>
void lstm_backward(const LstmWeights<T>& w, const T* X, const LstmCache<T>& cache, const T* dH, LstmGrads<T> g,
                   T* dX) {
    const size_t H = cache.H;
    const size_t D = w.D;
    const size_t steps = cache.steps;
    std::vector<T> dh(H, T(0)), dc(H, T(0)), dz(4 * H);
    for (size_t t = steps; t-- > 0;) {
        const T* gates = cache.gates.data() + t * 4 * H;
        const T* gi = gates;
        const T* gf = gates + H;
        const T* gg = gates + 2 * H;
        const T* go = gates + 3 * H;
        const T* tc = cache.tanh_c.data() + t * H;
        const T* c_prev = (t == 0) ? nullptr : cache.c.data() + (t - 1) * H;
        const T* h_prev = (t == 0) ? nullptr : cache.h.data() + (t - 1) * H;

        for (size_t j = 0; j < H; ++j) {
            const T dht = dh[j] + dH[t * H + j];
            const T dct = dc[j] + dht * go[j] * (T(1) - tc[j] * tc[j]);
            const T di = dct * gg[j];
            const T df = dct * (c_prev ? c_prev[j] : T(0));
            const T dg = dct * gi[j];
            const T do_ = dht * tc[j];
            dz[j] = di * gi[j] * (T(1) - gi[j]);
            dz[H + j] = df * gf[j] * (T(1) - gf[j]);
            dz[2 * H + j] = dg * (T(1) - gg[j] * gg[j]);
            dz[3 * H + j] = do_ * go[j] * (T(1) - go[j]);
            dc[j] = dct * gf[j];
        }
        outer_acc(g.W, 4 * H, D, dz.data(), X + t * D);
        if (h_prev) outer_acc(g.R, 4 * H, H, dz.data(), h_prev);
        for (size_t k = 0; k < 4 * H; ++k) g.b[k] += dz[k];
        if (dX) matvec_t(w.W, 4 * H, D, dz.data(), dX + t * D);
        if (h_prev)
            matvec_t(w.R, 4 * H, H, dz.data(), dh.data());
        else
            std::fill(dh.begin(), dh.end(), T(0));
    }
}

// ---------------------------------------------------------------------------
// Dense layer, optionally with a sigmoid mask head.
// ---------------------------------------------------------------------------

template <typename T>
struct DenseWeights {
    const T* W;  // out x in
    const T* b;  // out
    size_t out = 0;
    size_t in = 0;
};

template <typename T>
struct DenseGrads {
    T* W;
    T* b;
};

template <typename T>
void dense_forward_linear(const DenseWeights<T>& w, const T* x, T* y) {
    matvec(w.W, w.out, w.in, x, y);
    for (size_t i = 0; i < w.out; ++i) y[i] += w.b[i];
}

template <typename T>
void dense_forward_sigmoid(const DenseWeights<T>& w, const T* x, T* y) {
    dense_forward_linear(w, x, y);
    for (size_t i = 0; i < w.out; ++i) y[i] = sigmoid(y[i]);
}

template <typename T>
void dense_backward_linear(const DenseWeights<T>& w, const T* x, const T* dy, DenseGrads<T> g, T* dx) {
    outer_acc(g.W, w.out, w.in, dy, x);
    for (size_t i = 0; i < w.out; ++i) g.b[i] += dy[i];
    if (dx) matvec_t(w.W, w.out, w.in, dy, dx);
}

// y is the cached sigmoid output of the forward pass.
template <typename T>
void dense_backward_sigmoid(const DenseWeights<T>& w, const T* x, const T* y, const T* dy, DenseGrads<T> g,
                            T* dx, T* dpre_scratch) {
    for (size_t i = 0; i < w.out; ++i) dpre_scratch[i] = dy[i] * y[i] * (T(1) - y[i]);
    dense_backward_linear(w, x, dpre_scratch, g, dx);
}

// ---------------------------------------------------------------------------
// Instant layer normalization: each frame normalized over its feature
// dimension only, shared affine parameters, no state across frames.
// ---------------------------------------------------------------------------

template <typename T>
struct IlnWeights {
    const T* gamma;
    const T* beta;
    size_t n = 0;
    T eps = T(kIlnEps);
};

template <typename T>
struct IlnGrads {
    T* gamma;
    T* beta;
};

template <typename T>
void iln_forward(const IlnWeights<T>& w, const T* x, T* y, T* xhat_cache, T* inv_std_cache) {
    const size_t n = w.n;
    T mean = T(0);
    for (size_t i = 0; i < n; ++i) mean += x[i];
    mean /= static_cast<T>(n);
    T var = T(0);
    for (size_t i = 0; i < n; ++i) {
        const T d = x[i] - mean;
        var += d * d;
    }
    var /= static_cast<T>(n);
    const T inv_std = T(1) / std::sqrt(var + w.eps);
    for (size_t i = 0; i < n; ++i) {
        const T xh = (x[i] - mean) * inv_std;
        if (xhat_cache) xhat_cache[i] = xh;
        y[i] = w.gamma[i] * xh + w.beta[i];
    }
    if (inv_std_cache) *inv_std_cache = inv_std;
}

template <typename T>
void iln_backward(const IlnWeights<T>& w, const T* xhat, T inv_std, const T* dy, IlnGrads<T> g, T* dx) {
    const size_t n = w.n;
    T sum_dxhat = T(0), sum_dxhat_xhat = T(0);
    for (size_t i = 0; i < n; ++i) {
        g.gamma[i] += dy[i] * xhat[i];
        g.beta[i] += dy[i];
        const T dxh = dy[i] * w.gamma[i];
        sum_dxhat += dxh;
        sum_dxhat_xhat += dxh * xhat[i];
    }
    const T inv_n = T(1) / static_cast<T>(n);
    for (size_t i = 0; i < n; ++i) {
        const T dxh = dy[i] * w.gamma[i];
        dx[i] = inv_std * (dxh - inv_n * sum_dxhat - xhat[i] * inv_n * sum_dxhat_xhat);
    }
}

// ---------------------------------------------------------------------------
// Inverted dropout. The mask stores the survivor scale 1/(1-rate) or 0, so
// backward is an elementwise product with the cached mask.
// ---------------------------------------------------------------------------

template <typename T>
void dropout_forward(const T* x, size_t n, double rate, Rng& rng, T* y, T* mask) {
    if (!(rate >= 0.0 && rate < 1.0)) throw Error("dropout: rate must be in [0,1)");
    if (rate == 0.0) {
        for (size_t i = 0; i < n; ++i) {
            y[i] = x[i];
            if (mask) mask[i] = T(1);
        }
        return;
    }
    const T scale = T(1.0 / (1.0 - rate));
    for (size_t i = 0; i < n; ++i) {
        const T m = (rng.uniform() < rate) ? T(0) : scale;
        y[i] = x[i] * m;
        if (mask) mask[i] = m;
    }
}

// Functional form: identity when not training.
template <typename T>
std::vector<T> dropout(const std::vector<T>& x, double rate, bool training, Rng& rng) {
    if (!training) return x;
    std::vector<T> y(x.size());
    dropout_forward(x.data(), x.size(), rate, rng, y.data(), static_cast<T*>(nullptr));
    return y;
}

template <typename T>
void dropout_backward(const T* dy, const T* mask, size_t n, T* dx) {
    for (size_t i = 0; i < n; ++i) dx[i] = dy[i] * mask[i];
}

}  // namespace dtln

#endif  // DTLN_LAYERS_HPP
