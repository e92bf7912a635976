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

#ifndef DTLN_MODEL_HPP
#define DTLN_MODEL_HPP

#include <complex>
#include <cstring>
#include <string>
#include <vector>

#include "dtln/audio.hpp"
#include "dtln/layers.hpp"
#include "dtln/params.hpp"
#include "dtln/signal.hpp"
#include "dtln/topology.hpp"

namespace dtln {

constexpr double kLogEps = 1e-7;  // floor inside log-magnitude compression

// Per-stream recurrent state: one (h, c) pair per LSTM layer across all
// cores, plus the overlap-add tail. Zeroed at stream start.
template <typename T>
struct StreamState {
    std::vector<LstmState<T>> lstm;
    std::vector<T> ola_tail;

    void reset() {
        for (auto& s : lstm) s.reset();
        std::fill(ola_tail.begin(), ola_tail.end(), T(0));
    }

    bool operator==(const StreamState& other) const {
        if (lstm.size() != other.lstm.size()) return false;
        for (size_t i = 0; i < lstm.size(); ++i)
            if (lstm[i].h != other.lstm[i].h || lstm[i].c != other.lstm[i].c) return false;
        return ola_tail == other.ola_tail;
    }
};

namespace detail {

template <typename T>
struct CoreView {
    const CoreSpec* cs = nullptr;
    const T* U = nullptr;  // F x L, learned cores only
    const T* V = nullptr;
    IlnWeights<T> iln;
    std::vector<LstmWeights<T>> lstm;
    DenseWeights<T> mask;
};

template <typename T>
struct CoreGrads {
    T* U = nullptr;
    T* V = nullptr;
    IlnGrads<T> iln{nullptr, nullptr};
    std::vector<LstmGrads<T>> lstm;
    DenseGrads<T> mask{nullptr, nullptr};
};

template <typename T>
CoreView<T> make_core_view(const TopologySpec& spec, const ParamSet<T>& p, size_t ci) {
    CoreView<T> v;
    v.cs = &spec.cores[ci];
    const std::string pre = "core" + std::to_string(ci) + ".";
    const size_t F = v.cs->feature_dim;
    const size_t H = v.cs->units;
    if (v.cs->basis == BasisKind::Learned) {
        v.U = p.at(pre + "encoder.U").data.data();
        v.V = p.at(pre + "decoder.V").data.data();
    }
    v.iln = IlnWeights<T>{p.at(pre + "iln.gamma").data.data(), p.at(pre + "iln.beta").data.data(), F,
                          T(kIlnEps)};
    size_t in_dim = F;
    for (int li = 0; li < v.cs->lstm_layers; ++li) {
        const std::string lp = pre + "lstm" + std::to_string(li) + ".";
        v.lstm.push_back(LstmWeights<T>{p.at(lp + "W").data.data(), p.at(lp + "R").data.data(),
                                        p.at(lp + "b").data.data(), H, in_dim});
        in_dim = H;
    }
    v.mask = DenseWeights<T>{p.at(pre + "mask.W").data.data(), p.at(pre + "mask.b").data.data(), F, H};
    return v;
}

template <typename T>
CoreGrads<T> make_core_grads(const TopologySpec& spec, ParamSet<T>& g, size_t ci) {
    CoreGrads<T> v;
    const CoreSpec& cs = spec.cores[ci];
    const std::string pre = "core" + std::to_string(ci) + ".";
    if (cs.basis == BasisKind::Learned) {
        v.U = g.at(pre + "encoder.U").data.data();
        v.V = g.at(pre + "decoder.V").data.data();
    }
    v.iln = IlnGrads<T>{g.at(pre + "iln.gamma").data.data(), g.at(pre + "iln.beta").data.data()};
    for (int li = 0; li < cs.lstm_layers; ++li) {
        const std::string lp = pre + "lstm" + std::to_string(li) + ".";
        v.lstm.push_back(LstmGrads<T>{g.at(lp + "W").data.data(), g.at(lp + "R").data.data(),
                                      g.at(lp + "b").data.data()});
    }
    v.mask = DenseGrads<T>{g.at(pre + "mask.W").data.data(), g.at(pre + "mask.b").data.data()};
    return v;
}

}  // namespace detail

// Everything backward needs from one core's forward pass, time-major.
template <typename T>
struct CoreCache {
    std::vector<T> spec_re, spec_im;  // steps x F (stft cores)
    std::vector<T> mag;               // steps x F (stft cores)
    std::vector<T> feat;              // steps x N, unnormalized features (learned cores)
    std::vector<T> iln_xhat;          // steps x F
    std::vector<T> iln_inv_std;       // steps
    std::vector<T> x0;                // steps x F, normalized core input
    std::vector<LstmCache<T>> lstm;   // per layer
    std::vector<std::vector<T>> drop_mask;  // per inter-layer gap, steps x H
    std::vector<T> mask_out;          // steps x F, sigmoid masks
};

template <typename T>
struct ForwardCache {
    size_t steps = 0;
    // frames_io[0] is the framed input; frames_io[k+1] is core k's output.
    std::vector<std::vector<T>> frames_io;
    std::vector<CoreCache<T>> cores;
};

template <typename T>
class Model {
  public:
    Model(TopologySpec spec, ParamSet<T> params) : spec_(std::move(spec)), params_(std::move(params)) {
        validate_shapes();
    }

    static Model init(const TopologySpec& spec, uint64_t seed) {
        return Model(spec, init_params<T>(spec, seed));
    }
    static Model init(const std::string& name, uint64_t seed) {
        return init(TopologySpec::by_name(name), seed);
    }

    const TopologySpec& spec() const { return spec_; }
    const ParamSet<T>& params() const { return params_; }
    ParamSet<T>& params() { return params_; }
    size_t param_count() const { return params_.element_count(); }

    // ------------------------------------------------------------------
    // Whole-sequence forward. Enhanced waveform has (K-1)*hop + L samples.
    // training=true applies dropout (rng required) ; a non-null cache
    // retains activations for backward().
    // ------------------------------------------------------------------
    std::vector<T> forward_sequence(const std::vector<T>& audio, bool training = false, Rng* rng = nullptr,
                                    ForwardCache<T>* cache = nullptr) const {
        for (const T v : audio)
            if (std::isnan(static_cast<double>(v))) throw Error("forward_sequence: NaN in audio");
        if (training && rng == nullptr) throw Error("forward_sequence: training mode needs an rng");

        const size_t L = spec_.frame_len;
        const size_t hop = spec_.hop;
        if (audio.size() < L) throw Error("forward_sequence: input shorter than one frame");
        const size_t steps = (audio.size() - L) / hop + 1;

        std::vector<T> frames(steps * L);
        for (size_t t = 0; t < steps; ++t)
            std::memcpy(frames.data() + t * L, audio.data() + t * hop, L * sizeof(T));

        if (cache) {
            cache->steps = steps;
            cache->frames_io.assign(spec_.cores.size() + 1, {});
            cache->cores.assign(spec_.cores.size(), {});
            cache->frames_io[0] = frames;
        }

        std::vector<T> cur = std::move(frames);
        for (size_t ci = 0; ci < spec_.cores.size(); ++ci) {
            auto view = detail::make_core_view(spec_, params_, ci);
            std::vector<T> out(steps * L);
            core_forward_seq(view, cur.data(), steps, out.data(), training, rng,
                             cache ? &cache->cores[ci] : nullptr);
            cur = std::move(out);
            if (cache) cache->frames_io[ci + 1] = cur;
        }

        // overlap-add once, after the last core
        std::vector<T> wave((steps - 1) * hop + L, T(0));
        const T scale = static_cast<T>(hop) / static_cast<T>(L);
        for (size_t t = 0; t < steps; ++t) {
            const T* src = cur.data() + t * L;
            T* dst = wave.data() + t * hop;
            for (size_t n = 0; n < L; ++n) dst[n] += scale * src[n];
        }
        return wave;
    }

    AudioBuffer forward_sequence(const AudioBuffer& audio, bool training = false, Rng* rng = nullptr,
                                 ForwardCache<T>* cache = nullptr) const {
        check_audio(audio, "forward_sequence");
        std::vector<T> x(audio.samples.begin(), audio.samples.end());
        auto y = forward_sequence(x, training, rng, cache);
        return AudioBuffer(std::vector<double>(y.begin(), y.end()), audio.sample_rate);
    }

    // ------------------------------------------------------------------
    // Streaming: one frame in, hop samples out. Algorithmic latency is one
    // frame; the hop emitted on step k is the overlap-add output for
    // samples [k*hop, (k+1)*hop).
    // ------------------------------------------------------------------
    StreamState<T> make_state() const {
        StreamState<T> s;
        for (const auto& core : spec_.cores)
            for (int li = 0; li < core.lstm_layers; ++li) s.lstm.emplace_back(core.units);
        s.ola_tail.assign(spec_.frame_len - spec_.hop, T(0));
        return s;
    }

    void step_frame(StreamState<T>& state, const T* frame, T* out_hop) const {
        const size_t L = spec_.frame_len;
        const size_t hop = spec_.hop;
        const size_t tail_len = L - hop;
        if (state.ola_tail.size() != tail_len) throw ShapeError("step_frame: state does not match model");
        size_t expected_states = 0;
        for (const auto& core : spec_.cores) expected_states += core.lstm_layers;
        if (state.lstm.size() != expected_states) throw ShapeError("step_frame: state does not match model");
        size_t check_idx = 0;
        for (const auto& core : spec_.cores)
            for (int li = 0; li < core.lstm_layers; ++li)
                if (state.lstm[check_idx++].h.size() != static_cast<size_t>(core.units))
                    throw ShapeError("step_frame: state width does not match model");

        std::vector<T> cur(frame, frame + L);
        size_t si = 0;
        for (size_t ci = 0; ci < spec_.cores.size(); ++ci) {
            auto view = detail::make_core_view(spec_, params_, ci);
            cur = core_step(view, cur, state, si);
        }

        const T scale = static_cast<T>(hop) / static_cast<T>(L);
        for (size_t i = 0; i < hop; ++i) out_hop[i] = state.ola_tail[i] + scale * cur[i];
        for (size_t i = 0; i < tail_len; ++i) {
            const T carried = (i + hop < tail_len) ? state.ola_tail[i + hop] : T(0);
            state.ola_tail[i] = carried + scale * cur[i + hop];
        }
    }

    // ------------------------------------------------------------------
    // BPTT: gradient of a scalar loss with respect to every parameter,
    // given d(loss)/d(enhanced waveform).
    // ------------------------------------------------------------------
    ParamSet<T> backward(const ForwardCache<T>& cache, const std::vector<T>& d_wave) const {
        ParamSet<T> grads = params_.zeros_like();
        accumulate_backward(cache, d_wave, grads);
        return grads;
    }

    // Accumulating variant for batch training: adds into `grads`.
    void accumulate_backward(const ForwardCache<T>& cache, const std::vector<T>& d_wave,
                             ParamSet<T>& grads) const {
        const size_t L = spec_.frame_len;
        const size_t hop = spec_.hop;
        const size_t steps = cache.steps;
        const size_t wave_len = (steps - 1) * hop + L;
        if (d_wave.size() != wave_len) throw ShapeError("backward: waveform gradient length mismatch");

        // adjoint of overlap-add
        std::vector<T> d_frames(steps * L);
        const T scale = static_cast<T>(hop) / static_cast<T>(L);
        for (size_t t = 0; t < steps; ++t) {
            const T* src = d_wave.data() + t * hop;
            T* dst = d_frames.data() + t * L;
            for (size_t n = 0; n < L; ++n) dst[n] = scale * src[n];
        }

        for (size_t ci = spec_.cores.size(); ci-- > 0;) {
            auto view = detail::make_core_view(spec_, params_, ci);
            auto gview = detail::make_core_grads(spec_, grads, ci);
            std::vector<T> d_in;
            const bool need_input_grad = ci > 0;
            if (need_input_grad) d_in.assign(steps * L, T(0));
            core_backward_seq(view, gview, cache.frames_io[ci].data(), cache.cores[ci], steps,
                              d_frames.data(), need_input_grad ? d_in.data() : nullptr);
            if (need_input_grad) d_frames = std::move(d_in);
        }
    }

  private:
    void validate_shapes() const {
        for (const auto& decl : detail::tensor_table(spec_)) {
            const auto& t = params_.at(decl.name);
            if (t.shape != decl.shape) throw ShapeError("Model: tensor " + decl.name + " has wrong shape");
        }
    }

    // ---- shared per-frame pieces -------------------------------------

    // STFT analysis of one frame: complex spectrum, magnitude, and the
    // log-compressed network input.
    void stft_analyze(const T* frame, std::vector<std::complex<T>>& spec, std::vector<T>& mag,
                      std::vector<T>& logmag) const {
        std::vector<T> buf(frame, frame + spec_.frame_len);
        spec = fft::rfft(buf);
        const size_t F = spec.size();
        mag.resize(F);
        logmag.resize(F);
        for (size_t f = 0; f < F; ++f) {
            mag[f] = std::abs(spec[f]);
            logmag[f] = std::log(mag[f] + T(kLogEps));
        }
    }

    // ---- whole-sequence core forward ----------------------------------

    void core_forward_seq(const detail::CoreView<T>& v, const T* in_frames, size_t steps, T* out_frames,
                          bool training, Rng* rng, CoreCache<T>* cc) const {
        const size_t L = spec_.frame_len;
        const size_t F = v.cs->feature_dim;
        const size_t H = v.cs->units;
        const bool stft_core = v.cs->basis == BasisKind::Stft;

        std::vector<T> x0(steps * F);
        std::vector<std::complex<T>> spec;
        std::vector<T> mag, logmag;
        std::vector<std::complex<T>> spec_seq;  // only kept when caching
        std::vector<T> mag_seq, feat_seq;

        if (cc) {
            cc->iln_xhat.assign(steps * F, T(0));
            cc->iln_inv_std.assign(steps, T(0));
            if (stft_core) {
                cc->spec_re.assign(steps * F, T(0));
                cc->spec_im.assign(steps * F, T(0));
                cc->mag.assign(steps * F, T(0));
            } else {
                cc->feat.assign(steps * F, T(0));
            }
        }
        if (!cc && stft_core) {
            spec_seq.resize(steps * F);
            mag_seq.resize(steps * F);
        }
        if (!cc && !stft_core) feat_seq.resize(steps * F);

        // analysis + normalization, frame by frame
        for (size_t t = 0; t < steps; ++t) {
            const T* frame = in_frames + t * L;
            T* x0_t = x0.data() + t * F;
            if (stft_core) {
                stft_analyze(frame, spec, mag, logmag);
                iln_forward(v.iln, logmag.data(), x0_t, cc ? cc->iln_xhat.data() + t * F : nullptr,
                            cc ? cc->iln_inv_std.data() + t : nullptr);
                if (cc) {
                    for (size_t f = 0; f < F; ++f) {
                        cc->spec_re[t * F + f] = spec[f].real();
                        cc->spec_im[t * F + f] = spec[f].imag();
                    }
                    std::memcpy(cc->mag.data() + t * F, mag.data(), F * sizeof(T));
                } else {
                    std::copy(spec.begin(), spec.end(), spec_seq.begin() + t * F);
                    std::memcpy(mag_seq.data() + t * F, mag.data(), F * sizeof(T));
                }
            } else {
                T* w_t = cc ? cc->feat.data() + t * F : feat_seq.data() + t * F;
                matvec(v.U, F, L, frame, w_t);
                iln_forward(v.iln, w_t, x0_t, cc ? cc->iln_xhat.data() + t * F : nullptr,
                            cc ? cc->iln_inv_std.data() + t : nullptr);
            }
        }
        if (cc) cc->x0 = x0;

        // LSTM stack, layer-major, dropout between layers while training
        const size_t layers = v.lstm.size();
        if (cc) {
            cc->lstm.assign(layers, {});
            cc->drop_mask.assign(layers > 0 ? layers - 1 : 0, {});
        }
        std::vector<T> layer_in = std::move(x0);
        std::vector<T> h_seq;
        for (size_t li = 0; li < layers; ++li) {
            h_seq.assign(steps * H, T(0));
            LstmState<T> state(H);
            LstmCache<T>* cache_ptr = cc ? &cc->lstm[li] : nullptr;
            lstm_forward(v.lstm[li], layer_in.data(), steps, state, h_seq.data(), cache_ptr);
            if (li + 1 < layers) {
                if (training) {
                    std::vector<T>* mask = cc ? &cc->drop_mask[li] : nullptr;
                    if (mask) mask->assign(steps * H, T(0));
                    std::vector<T> dropped(steps * H);
                    dropout_forward(h_seq.data(), steps * H, spec_.dropout, *rng, dropped.data(),
                                    mask ? mask->data() : nullptr);
                    layer_in = std::move(dropped);
                } else {
                    layer_in = h_seq;
                }
            }
        }

        // mask head + signal path
        std::vector<T> m(F);
        if (cc) cc->mask_out.assign(steps * F, T(0));
        for (size_t t = 0; t < steps; ++t) {
            dense_forward_sigmoid(v.mask, h_seq.data() + t * H, m.data());
            if (cc) std::memcpy(cc->mask_out.data() + t * F, m.data(), F * sizeof(T));
            T* out = out_frames + t * L;
            if (stft_core) {
                const T* re = cc ? cc->spec_re.data() + t * F : nullptr;
                std::vector<std::complex<T>> masked(F);
                if (cc) {
                    const T* im = cc->spec_im.data() + t * F;
                    for (size_t f = 0; f < F; ++f) masked[f] = std::complex<T>(m[f] * re[f], m[f] * im[f]);
                } else {
                    const std::complex<T>* sp = spec_seq.data() + t * F;
                    for (size_t f = 0; f < F; ++f) masked[f] = m[f] * sp[f];
                }
                auto frame_out = fft::irfft(masked);
                std::memcpy(out, frame_out.data(), L * sizeof(T));
            } else {
                const T* w_t = cc ? cc->feat.data() + t * F : feat_seq.data() + t * F;
                std::vector<T> d(F);
                for (size_t f = 0; f < F; ++f) d[f] = m[f] * w_t[f];
                matvec_t(v.V, F, L, d.data(), out);
            }
        }
    }

    // ---- single-frame core forward (streaming) ------------------------

    std::vector<T> core_step(const detail::CoreView<T>& v, const std::vector<T>& frame,
                             StreamState<T>& state, size_t& state_index) const {
        const size_t L = spec_.frame_len;
        const size_t F = v.cs->feature_dim;
        const bool stft_core = v.cs->basis == BasisKind::Stft;

        std::vector<T> x(F);
        std::vector<std::complex<T>> spec;
        std::vector<T> mag, logmag, feat;
        if (stft_core) {
            stft_analyze(frame.data(), spec, mag, logmag);
            iln_forward(v.iln, logmag.data(), x.data(), static_cast<T*>(nullptr), static_cast<T*>(nullptr));
        } else {
            feat.resize(F);
            matvec(v.U, F, L, frame.data(), feat.data());
            iln_forward(v.iln, feat.data(), x.data(), static_cast<T*>(nullptr), static_cast<T*>(nullptr));
        }

        std::vector<T> gates;
        const T* h = nullptr;
        for (size_t li = 0; li < v.lstm.size(); ++li) {
            LstmState<T>& s = state.lstm[state_index++];
            gates.assign(4 * v.cs->units, T(0));
            detail_step(v.lstm[li], li == 0 ? x.data() : h, s, gates.data());
            h = s.h.data();
        }

        std::vector<T> m(F);
        dense_forward_sigmoid(v.mask, h, m.data());
        if (stft_core) {
            std::vector<std::complex<T>> masked(F);
            for (size_t f = 0; f < F; ++f) masked[f] = m[f] * spec[f];
            return fft::irfft(masked);
        }
        std::vector<T> d(F), out(L);
        for (size_t f = 0; f < F; ++f) d[f] = m[f] * feat[f];
        matvec_t(v.V, F, L, d.data(), out.data());
        return out;
    }

    static void detail_step(const LstmWeights<T>& w, const T* x, LstmState<T>& s, T* gate_buf) {
        detail::lstm_step_impl(w, x, s, gate_buf, static_cast<T*>(nullptr));
    }

    // ---- whole-sequence core backward ----------------------------------

    void core_backward_seq(const detail::CoreView<T>& v, detail::CoreGrads<T>& g, const T* in_frames,
                           const CoreCache<T>& cc, size_t steps, const T* d_out_frames, T* d_in_frames) const {
        const size_t L = spec_.frame_len;
        const size_t F = v.cs->feature_dim;
        const size_t H = v.cs->units;
        const bool stft_core = v.cs->basis == BasisKind::Stft;

        // Signal-path adjoint per frame: d(mask) plus, for learned cores,
        // the direct d(features) term.
        std::vector<T> d_mask(steps * F, T(0));
        std::vector<T> d_feat_direct;            // learned: m .* dd
        std::vector<std::vector<std::complex<T>>> d_spec_signal;  // stft: m .* dXhat
        if (!stft_core) d_feat_direct.assign(steps * F, T(0));
        if (stft_core && d_in_frames) d_spec_signal.resize(steps);

        std::vector<T> d_frame(L);
        for (size_t t = 0; t < steps; ++t) {
            std::memcpy(d_frame.data(), d_out_frames + t * L, L * sizeof(T));
            if (stft_core) {
                auto d_masked = fft::irfft_adjoint(d_frame);  // complex F
                const T* re = cc.spec_re.data() + t * F;
                const T* im = cc.spec_im.data() + t * F;
                const T* m = cc.mask_out.data() + t * F;
                T* dm = d_mask.data() + t * F;
                for (size_t f = 0; f < F; ++f)
                    dm[f] = re[f] * d_masked[f].real() + im[f] * d_masked[f].imag();
                if (d_in_frames) {
                    auto& ds = d_spec_signal[t];
                    ds.resize(F);
                    for (size_t f = 0; f < F; ++f) ds[f] = m[f] * d_masked[f];
                }
            } else {
                // out = V^T d  =>  dd = V * d_out
                std::vector<T> dd(F);
                matvec(v.V, F, L, d_frame.data(), dd.data());
                const T* w_t = cc.feat.data() + t * F;
                const T* m = cc.mask_out.data() + t * F;
                // dV += d (outer) d_out, with d = m .* w
                std::vector<T> d_vec(F);
                for (size_t f = 0; f < F; ++f) d_vec[f] = m[f] * w_t[f];
                outer_acc(g.V, F, L, d_vec.data(), d_frame.data());
                T* dm = d_mask.data() + t * F;
                T* dw = d_feat_direct.data() + t * F;
                for (size_t f = 0; f < F; ++f) {
                    dm[f] = w_t[f] * dd[f];
                    dw[f] = m[f] * dd[f];
                }
            }
        }

        // mask head backward
        const size_t layers = v.lstm.size();
        const LstmCache<T>& last = cc.lstm[layers - 1];
        std::vector<T> dH(steps * H, T(0));
        std::vector<T> dpre(F);
        for (size_t t = 0; t < steps; ++t) {
            dense_backward_sigmoid(v.mask, last.h.data() + t * H, cc.mask_out.data() + t * F,
                                   d_mask.data() + t * F, g.mask, dH.data() + t * H, dpre.data());
        }

        // LSTM stack backward, deepest layer first
        std::vector<T> layer_input;
        std::vector<T> dX;
        for (size_t li = layers; li-- > 0;) {
            const size_t in_dim = v.lstm[li].D;
            // reconstruct this layer's input sequence
            if (li == 0) {
                layer_input = cc.x0;
            } else {
                const auto& prev_h = cc.lstm[li - 1].h;
                const auto& mask = cc.drop_mask[li - 1];
                layer_input.assign(steps * in_dim, T(0));
                if (mask.empty()) {
                    layer_input = prev_h;
                } else {
                    for (size_t k = 0; k < steps * in_dim; ++k) layer_input[k] = prev_h[k] * mask[k];
                }
            }
            dX.assign(steps * in_dim, T(0));
            lstm_backward(v.lstm[li], layer_input.data(), cc.lstm[li], dH.data(), g.lstm[li], dX.data());
            if (li > 0) {
                const auto& mask = cc.drop_mask[li - 1];
                dH.assign(steps * H, T(0));
                if (mask.empty()) {
                    dH = dX;
                } else {
                    for (size_t k = 0; k < steps * H; ++k) dH[k] = dX[k] * mask[k];
                }
            }
        }
        // dX now holds d(x0): back through iLN into the analysis path.
        std::vector<T> d_pre_norm(F);
        for (size_t t = 0; t < steps; ++t) {
            iln_backward(v.iln, cc.iln_xhat.data() + t * F, cc.iln_inv_std[t], dX.data() + t * F, g.iln,
                         d_pre_norm.data());
            if (stft_core) {
                // d(log(mag + eps)) -> d(mag) -> d(spectrum); |Y|' at 0 taken as 0
                const T* mag = cc.mag.data() + t * F;
                const T* re = cc.spec_re.data() + t * F;
                const T* im = cc.spec_im.data() + t * F;
                if (d_in_frames) {
                    auto& ds = d_spec_signal[t];
                    for (size_t f = 0; f < F; ++f) {
                        const T dmag = d_pre_norm[f] / (mag[f] + T(kLogEps));
                        if (mag[f] > T(0)) {
                            ds[f] += std::complex<T>(dmag * re[f] / mag[f], dmag * im[f] / mag[f]);
                        }
                    }
                    auto d_frame_in = fft::rfft_adjoint(ds);
                    std::memcpy(d_in_frames + t * L, d_frame_in.data(), L * sizeof(T));
                }
                // core 0 consumes constant input: magnitude path ends here
            } else {
                T* dw_total = d_feat_direct.data() + t * F;
                for (size_t f = 0; f < F; ++f) dw_total[f] += d_pre_norm[f];
                outer_acc(g.U, F, L, dw_total, in_frames + t * L);
                if (d_in_frames) matvec_t(v.U, F, L, dw_total, d_in_frames + t * L);
            }
        }
    }

    TopologySpec spec_;
    ParamSet<T> params_;
};

// ---------------------------------------------------------------------------
// Length-preserving enhancement: pads with L-hop leading zeros plus trailing
// zeros to a frame boundary, so every input sample gets full overlap-add
// coverage, then trims back to the input length.
// ---------------------------------------------------------------------------

enum class ProcessingMode { Sequence, Stream };

template <typename T>
std::vector<T> enhance_aligned(const Model<T>& model, const std::vector<T>& input, ProcessingMode mode) {
    if (input.empty()) return {};
    const size_t L = model.spec().frame_len;
    const size_t hop = model.spec().hop;
    const size_t lead = L - hop;
    const size_t n = input.size();

    size_t padded_len = n + 2 * lead;
    const size_t rem = (padded_len - L) % hop;
    if (rem != 0) padded_len += hop - rem;
    std::vector<T> padded(padded_len, T(0));
    std::copy(input.begin(), input.end(), padded.begin() + lead);

    std::vector<T> out(n);
    if (mode == ProcessingMode::Sequence) {
        auto wave = model.forward_sequence(padded);
        std::copy(wave.begin() + lead, wave.begin() + lead + n, out.begin());
    } else {
        const size_t steps = (padded_len - L) / hop + 1;
        auto state = model.make_state();
        std::vector<T> collected(steps * hop);
        for (size_t t = 0; t < steps; ++t)
            model.step_frame(state, padded.data() + t * hop, collected.data() + t * hop);
        std::copy(collected.begin() + lead, collected.begin() + lead + n, out.begin());
    }
    return out;
}

template <typename T>
AudioBuffer enhance_aligned(const Model<T>& model, const AudioBuffer& audio, ProcessingMode mode) {
    check_audio(audio, "enhance_aligned");
    std::vector<T> x(audio.samples.begin(), audio.samples.end());
    auto y = enhance_aligned(model, x, mode);
    return AudioBuffer(std::vector<double>(y.begin(), y.end()), audio.sample_rate);
}

}  // namespace dtln

#endif  // DTLN_MODEL_HPP
