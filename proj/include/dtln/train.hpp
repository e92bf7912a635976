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

#ifndef DTLN_TRAIN_HPP
#define DTLN_TRAIN_HPP

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dtln/dataset.hpp"
#include "dtln/loss.hpp"
#include "dtln/model.hpp"
#include "dtln/optim.hpp"
#include "dtln/stoi.hpp"
#include "dtln/weights_io.hpp"

namespace dtln {

struct TrainConfig {
    std::string topology = "DTLN";
    int batch_size = 32;
    double lr = 1e-3;
    double clip_norm = 3.0;
    int lr_halve_patience = 3;
    int early_stop_patience = 10;
    int max_epochs = 100;
    uint64_t seed = 1;
    std::string manifest;
    std::string checkpoint_dir = "checkpoints";
    int threads = 1;

    void validate() const {
        if (batch_size < 1) throw Error("config: batch_size must be >= 1");
        if (lr_halve_patience < 1 || early_stop_patience < 1)
            throw Error("config: patience values must be positive");
        if (max_epochs < 1) throw Error("config: max_epochs must be >= 1");
        if (threads < 1) throw Error("config: threads must be >= 1");
        if (manifest.empty()) throw Error("config: manifest path required");
        TopologySpec::by_name(topology);  // rejects unknown names
    }

    // key = value file, '#' comments, keys exactly matching the field names.
    static TrainConfig from_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw Error("cannot read config: " + path);
        TrainConfig cfg;
        std::string line;
        size_t lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
                if (!blank) throw Error("config: malformed line " + std::to_string(lineno));
                continue;
            }
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                const auto b = s.find_last_not_of(" \t\r");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key == "topology") cfg.topology = value;
            else if (key == "batch_size") cfg.batch_size = std::stoi(value);
            else if (key == "lr") cfg.lr = std::stod(value);
            else if (key == "clip_norm") cfg.clip_norm = std::stod(value);
            else if (key == "lr_halve_patience") cfg.lr_halve_patience = std::stoi(value);
            else if (key == "early_stop_patience") cfg.early_stop_patience = std::stoi(value);
            else if (key == "max_epochs") cfg.max_epochs = std::stoi(value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "manifest") cfg.manifest = value;
            else if (key == "checkpoint_dir") cfg.checkpoint_dir = value;
            else if (key == "threads") cfg.threads = std::stoi(value);
            else throw Error("config: unknown key '" + key + "' on line " + std::to_string(lineno));
        }
        return cfg;
    }
};

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double lr = 0.0;
    double seconds = 0.0;
};

struct TrainLog {
    std::vector<EpochLog> epochs;

    void write_csv(const std::string& path) const {
        std::ofstream os(path, std::ios::trunc);
        os << "epoch,train_loss,val_loss,lr,seconds\n";
        for (const auto& e : epochs)
            os << e.epoch << ',' << e.train_loss << ',' << e.val_loss << ',' << e.lr << ',' << e.seconds
               << '\n';
    }
};

// Validation-driven schedule: "does not improve" means val >= best - 1e-4.
// Improvement resets both counters; halving resets only its own counter, the
// early-stop window counts absolute non-improvement.
class Scheduler {
  public:
    Scheduler(double lr0, int halve_patience, int stop_patience)
        : lr_(lr0), halve_patience_(halve_patience), stop_patience_(stop_patience) {}

    struct Decision {
        bool improved = false;
        bool halved = false;
        bool stop = false;
    };

    Decision observe(double val_loss) {
        Decision d;
        if (val_loss < best_ - kTol) {
            best_ = val_loss;
            halve_wait_ = 0;
            stop_wait_ = 0;
            d.improved = true;
            return d;
        }
        ++halve_wait_;
        ++stop_wait_;
        if (halve_wait_ >= halve_patience_) {
            lr_ /= 2.0;
            halve_wait_ = 0;
            d.halved = true;
        }
        if (stop_wait_ >= stop_patience_) d.stop = true;
        return d;
    }

    double lr() const { return lr_; }
    double best() const { return best_; }

    static constexpr double kTol = 1e-4;

  private:
    double lr_;
    int halve_patience_;
    int stop_patience_;
    double best_ = std::numeric_limits<double>::max();
    int halve_wait_ = 0;
    int stop_wait_ = 0;
};

struct TrainResult {
    ParamSet<double> best_params;
    TrainLog log;
    std::string checkpoint_path;
    int best_epoch = 0;
    size_t skipped_samples = 0;  // silent targets and unreadable files
};

namespace train_detail {

struct SampleOutcome {
    ParamSet<double> grads;
    double loss_sum = 0.0;
    size_t used = 0;
    size_t skipped = 0;
    bool nan = false;
};

// Forward + BPTT for one (mixture, reference) pair; gradient of the mean
// batch loss is assembled by the caller.
inline bool sample_grad(const Model<double>& model, const AudioBuffer& mixture,
                        const AudioBuffer& reference, Rng rng, ParamSet<double>& grads_acc,
                        double& loss_out) {
    ForwardCache<double> cache;
    auto est = model.forward_sequence(mixture.samples, /*training=*/true, &rng, &cache);
    std::vector<double> ref(reference.samples.begin(), reference.samples.begin() + est.size());
    std::vector<double> d_est;
    const auto loss = neg_snr_loss_grad(est, ref, d_est);
    if (!loss.has_value()) return false;  // silent target: skip
    loss_out = *loss;
    model.accumulate_backward(cache, d_est, grads_acc);
    return true;
}

}  // namespace train_detail

// The training loop: batched BPTT with Adam and gradient-norm clipping,
// validation each epoch, LR halving and early stopping per the scheduler,
// best-validation checkpointing. Deterministic for a fixed (seed, threads).
inline TrainResult train(const TrainConfig& cfg,
                         const std::function<void(const EpochLog&)>& on_epoch = nullptr) {
    namespace fs = std::filesystem;
    cfg.validate();
    const auto manifest = DatasetManifest::read(cfg.manifest);
    auto train_set = manifest.split("train");
    auto val_set = manifest.split("val");
    if (train_set.empty()) throw Error("train: manifest has no training entries");

    auto model = Model<double>::init(TopologySpec::by_name(cfg.topology), cfg.seed);
    auto moments = AdamMoments<double>::zeros_like(model.params());
    Scheduler sched(cfg.lr, cfg.lr_halve_patience, cfg.early_stop_patience);
    int64_t adam_t = 0;

    fs::create_directories(cfg.checkpoint_dir);
    const std::string ckpt_path = (fs::path(cfg.checkpoint_dir) / "best.dtln").string();
    const std::string log_path = (fs::path(cfg.checkpoint_dir) / "train_log.csv").string();

    TrainResult result;
    result.checkpoint_path = ckpt_path;
    result.best_params = model.params();

    std::vector<size_t> order(train_set.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();

        // seeded shuffle (Fisher-Yates)
        Rng shuffle_rng = Rng::derive(cfg.seed, 0x5a5a0000ull + static_cast<uint64_t>(epoch));
        for (size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.uniform_int(i)]);

        double train_loss_sum = 0.0;
        size_t train_loss_count = 0;

        for (size_t batch_start = 0, batch_idx = 0; batch_start < order.size();
             batch_start += cfg.batch_size, ++batch_idx) {
            const size_t batch_end = std::min(order.size(), batch_start + cfg.batch_size);
            const size_t members = batch_end - batch_start;

            const int threads = std::min<int>(cfg.threads, static_cast<int>(members));
            std::vector<train_detail::SampleOutcome> partial(threads);
            for (auto& p : partial) p.grads = model.params().zeros_like();

            auto worker = [&](int tid) {
                auto& out = partial[tid];
                for (size_t k = batch_start + tid; k < batch_end; k += threads) {
                    const auto& entry = train_set[order[k]];
                    AudioBuffer mix, ref;
                    try {
                        mix = read_wav(entry.mixture_path);
                        ref = read_wav(entry.reference_path);
                    } catch (const AudioError&) {
                        ++out.skipped;
                        continue;
                    }
                    Rng member_rng = Rng::derive(cfg.seed * 0x9e3779b1ull + static_cast<uint64_t>(epoch),
                                                 order[k]);
                    double loss = 0.0;
                    if (!train_detail::sample_grad(model, mix, ref, member_rng, out.grads, loss)) {
                        ++out.skipped;
                        continue;
                    }
                    if (std::isnan(loss)) {
                        out.nan = true;
                        return;
                    }
                    out.loss_sum += loss;
                    ++out.used;
                }
            };
            if (threads == 1) {
                worker(0);
            } else {
                std::vector<std::thread> pool;
                for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
                for (auto& t : pool) t.join();
            }

            size_t used = 0;
            for (const auto& p : partial) {
                if (p.nan)
                    throw Error("train: NaN loss at epoch " + std::to_string(epoch) + " batch " +
                                std::to_string(batch_idx));
                used += p.used;
                result.skipped_samples += p.skipped;
            }
            if (used == 0) continue;

            // merge partials in thread order, then average over the batch
            ParamSet<double>& grads = partial[0].grads;
            for (int t = 1; t < threads; ++t) grads.add_scaled(partial[t].grads, 1.0);
            grads.scale(1.0 / static_cast<double>(used));
            for (const auto& p : partial) train_loss_sum += p.loss_sum;
            train_loss_count += used;

            clip_grad_norm(grads, cfg.clip_norm);
            AdamConfig adam_cfg;
            adam_cfg.lr = sched.lr();
            adam_step(model.params(), grads, moments, ++adam_t, adam_cfg);
        }

        // validation: inference mode, no dropout
        double val_loss_sum = 0.0;
        size_t val_count = 0;
        for (const auto& entry : val_set) {
            AudioBuffer mix, ref;
            try {
                mix = read_wav(entry.mixture_path);
                ref = read_wav(entry.reference_path);
            } catch (const AudioError&) {
                ++result.skipped_samples;
                continue;
            }
            auto est = model.forward_sequence(mix.samples);
            std::vector<double> ref_trim(ref.samples.begin(), ref.samples.begin() + est.size());
            const auto loss = neg_snr_loss(est, ref_trim);
            if (!loss.has_value()) {
                ++result.skipped_samples;
                continue;
            }
            if (std::isnan(*loss)) throw Error("train: NaN validation loss at epoch " + std::to_string(epoch));
            val_loss_sum += *loss;
            ++val_count;
        }
        const double val_loss = val_count ? val_loss_sum / val_count
                                          : std::numeric_limits<double>::max();

        EpochLog row;
        row.epoch = epoch;
        row.train_loss = train_loss_count ? train_loss_sum / train_loss_count : 0.0;
        row.val_loss = val_loss;
        row.lr = sched.lr();  // the rate this epoch was trained with
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.log.epochs.push_back(row);
        result.log.write_csv(log_path);
        if (on_epoch) on_epoch(row);

        const auto decision = sched.observe(val_loss);
        if (decision.improved) {
            result.best_params = model.params();
            result.best_epoch = epoch;
            save_weights(cfg.topology, result.best_params.cast<float>(), ckpt_path);
        }
        if (decision.stop) break;
    }

    if (result.best_epoch == 0) {  // no improvement ever recorded; keep final weights
        result.best_params = model.params();
        save_weights(cfg.topology, result.best_params.cast<float>(), ckpt_path);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Objective evaluation: SI-SDR and STOI per file for the enhanced output and
// for the untouched noisy input (the "Noisy" baseline columns).
// ---------------------------------------------------------------------------

struct FileMetrics {
    std::string file;
    double si_sdr_enhanced = 0.0;
    double stoi_enhanced = 0.0;
    double si_sdr_noisy = 0.0;
    double stoi_noisy = 0.0;
};

struct MetricReport {
    std::vector<FileMetrics> files;
    std::vector<std::string> missing;
    double mean_si_sdr_enhanced = 0.0;
    double mean_stoi_enhanced = 0.0;
    double mean_si_sdr_noisy = 0.0;
    double mean_stoi_noisy = 0.0;

    void finalize() {
        if (files.empty()) return;
        double a = 0, b = 0, c = 0, d = 0;
        for (const auto& f : files) {
            a += f.si_sdr_enhanced;
            b += f.stoi_enhanced;
            c += f.si_sdr_noisy;
            d += f.stoi_noisy;
        }
        mean_si_sdr_enhanced = a / files.size();
        mean_stoi_enhanced = b / files.size();
        mean_si_sdr_noisy = c / files.size();
        mean_stoi_noisy = d / files.size();
    }

    void write_csv(const std::string& path) const {
        std::ofstream os(path, std::ios::trunc);
        os << "file,si_sdr_db,stoi,si_sdr_noisy_db,stoi_noisy\n";
        for (const auto& f : files)
            os << f.file << ',' << f.si_sdr_enhanced << ',' << f.stoi_enhanced << ',' << f.si_sdr_noisy
               << ',' << f.stoi_noisy << '\n';
        os << "mean," << mean_si_sdr_enhanced << ',' << mean_stoi_enhanced << ',' << mean_si_sdr_noisy << ','
           << mean_stoi_noisy << '\n';
    }
};

using Enhancer = std::function<AudioBuffer(const AudioBuffer&)>;

inline MetricReport evaluate(const Enhancer& enhance, const std::vector<ManifestEntry>& entries,
                             const std::string& out_csv = {}) {
    MetricReport report;
    for (const auto& entry : entries) {
        AudioBuffer mix, ref;
        try {
            mix = read_wav(entry.mixture_path);
            ref = read_wav(entry.reference_path);
        } catch (const AudioError&) {
            report.missing.push_back(entry.mixture_path);
            continue;
        }
        auto enhanced = enhance(mix);
        const size_t n = std::min({enhanced.size(), ref.size(), mix.size()});
        std::vector<double> e(enhanced.samples.begin(), enhanced.samples.begin() + n);
        std::vector<double> r(ref.samples.begin(), ref.samples.begin() + n);
        std::vector<double> m(mix.samples.begin(), mix.samples.begin() + n);

        FileMetrics fm;
        fm.file = entry.mixture_path;
        fm.si_sdr_enhanced = si_sdr(e, r);
        fm.stoi_enhanced = stoi(e, r);
        fm.si_sdr_noisy = si_sdr(m, r);
        fm.stoi_noisy = stoi(m, r);
        report.files.push_back(std::move(fm));
    }
    report.finalize();
    if (!out_csv.empty()) report.write_csv(out_csv);
    return report;
}

inline MetricReport evaluate(const Model<float>& model, const std::vector<ManifestEntry>& entries,
                             const std::string& out_csv = {}) {
    return evaluate(
        [&model](const AudioBuffer& a) { return enhance_aligned(model, a, ProcessingMode::Sequence); },
        entries, out_csv);
}

}  // namespace dtln

#endif  // DTLN_TRAIN_HPP
