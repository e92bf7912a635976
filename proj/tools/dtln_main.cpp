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

// Operator CLI: dataset building, training, file denoising, objective
// evaluation, and the per-frame latency benchmark.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dtln/dataset.hpp"
#include "dtln/model.hpp"
#include "dtln/synth.hpp"
#include "dtln/train.hpp"
#include "dtln/wav.hpp"
#include "dtln/weights_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadArgs = 2;
constexpr int kExitBadInput = 3;
constexpr int kExitBadWeights = 4;

struct BenchReport {
    std::string mode;
    size_t frames = 0;  // frames in the input signal
    double mean_ms = 0.0;
    double p95_ms = 0.0;
    double max_ms = 0.0;
    double rtf = 0.0;  // mean per-frame time / hop duration
};

void print_report(const BenchReport& r) {
    std::printf("mode:              %s\n", r.mode.c_str());
    std::printf("frames:            %zu\n", r.frames);
    std::printf("mean per frame:    %.4f ms\n", r.mean_ms);
    std::printf("p95 per frame:     %.4f ms\n", r.p95_ms);
    std::printf("max per frame:     %.4f ms\n", r.max_ms);
    std::printf("hop duration:      %.2f ms\n", 1000.0 * dtln::kHop / dtln::kSampleRate);
    std::printf("real-time factor:  %.4f\n", r.rtf);
}

void write_report_csv(const BenchReport& r, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    os << "mode,frames,mean_ms,p95_ms,max_ms,rtf\n";
    os << r.mode << ',' << r.frames << ',' << r.mean_ms << ',' << r.p95_ms << ',' << r.max_ms << ','
       << r.rtf << '\n';
}

int cmd_denoise(const std::string& weights, const std::string& in_path, const std::string& out_path,
                const std::string& mode) {
    auto model = dtln::load_model<float>(weights);
    auto audio = dtln::read_wav(in_path);
    const auto pm = mode == "stream" ? dtln::ProcessingMode::Stream : dtln::ProcessingMode::Sequence;
    auto enhanced = dtln::enhance_aligned(model, audio, pm);
    for (double v : enhanced.samples)
        if (!std::isfinite(v))
            throw dtln::WeightsError(dtln::WeightsError::Kind::Io, "weights produced non-finite audio");
    dtln::write_wav(out_path, enhanced);  // saturating PCM16 keeps samples in [-1, 1]
    return kExitOk;
}

int cmd_bench(const std::string& weights, double seconds, const std::string& mode,
              const std::string& csv_path) {
    auto model = dtln::load_model<float>(weights);
    const size_t L = model.spec().frame_len;
    const size_t hop = model.spec().hop;

    std::vector<double> noise = dtln::synth::noise(dtln::synth::NoiseKind::White, seconds, 4242);
    std::vector<float> input(noise.begin(), noise.end());
    const size_t frames = dtln::frame_count(input.size(), L, hop);

    BenchReport report;
    report.mode = mode;
    report.frames = frames;
    const double hop_ms = 1000.0 * hop / dtln::kSampleRate;
    constexpr size_t kWarmup = 50;  // timing excludes warmup frames

    using clock = std::chrono::steady_clock;
    if (mode == "stream") {
        auto state = model.make_state();
        std::vector<float> out_hop(hop);
        std::vector<double> times_ms;
        times_ms.reserve(frames);
        for (size_t t = 0; t < frames; ++t) {
            const auto t0 = clock::now();
            model.step_frame(state, input.data() + t * hop, out_hop.data());
            const auto t1 = clock::now();
            if (t >= kWarmup)
                times_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
        if (times_ms.empty()) throw dtln::Error("bench: input too short for warmup");
        double sum = 0.0;
        for (double v : times_ms) sum += v;
        report.mean_ms = sum / times_ms.size();
        std::sort(times_ms.begin(), times_ms.end());
        report.p95_ms = times_ms[static_cast<size_t>(0.95 * (times_ms.size() - 1))];
        report.max_ms = times_ms.back();
    } else {
        // warmup pass on a short prefix, then one timed whole-sequence run
        const size_t warm_samples = std::min(input.size(), L + kWarmup * hop);
        std::vector<float> warm(input.begin(), input.begin() + warm_samples);
        (void)model.forward_sequence(warm);
        const auto t0 = clock::now();
        (void)model.forward_sequence(input);
        const auto t1 = clock::now();
        const double per_frame = std::chrono::duration<double, std::milli>(t1 - t0).count() / frames;
        report.mean_ms = report.p95_ms = report.max_ms = per_frame;
    }
    report.rtf = report.mean_ms / hop_ms;
    print_report(report);
    if (!csv_path.empty()) write_report_csv(report, csv_path);
    return kExitOk;
}

int cmd_train(const std::string& config_path) {
    auto cfg = dtln::TrainConfig::from_file(config_path);
    auto result = dtln::train(cfg, [](const dtln::EpochLog& row) {
        std::printf("epoch %3d  train %9.4f dB  val %9.4f dB  lr %.3g  (%.1f s)\n", row.epoch,
                    row.train_loss, row.val_loss, row.lr, row.seconds);
        std::fflush(stdout);
    });
    std::printf("best epoch %d, checkpoint %s\n", result.best_epoch, result.checkpoint_path.c_str());
    if (result.skipped_samples)
        std::printf("warning: %zu samples skipped (silent or unreadable)\n", result.skipped_samples);
    return kExitOk;
}

int cmd_build_dataset(const std::string& speech, const std::string& noise, double hours,
                      const std::string& out, uint64_t seed) {
    auto manifest = dtln::build_dataset(speech, noise, hours, out, seed);
    size_t train = 0, val = 0;
    for (const auto& e : manifest.entries) (e.split == "train" ? train : val)++;
    std::printf("wrote %zu pairs (%zu train / %zu val) to %s\n", manifest.entries.size(), train, val,
                out.c_str());
    return kExitOk;
}

int cmd_eval(const std::string& weights, const std::string& manifest_path, const std::string& out_csv,
             const std::string& split) {
    auto model = dtln::load_model<float>(weights);
    auto manifest = dtln::DatasetManifest::read(manifest_path);
    auto entries = split == "all" ? manifest.entries : manifest.split(split);
    if (entries.empty()) throw dtln::Error("eval: no entries for split '" + split + "'");
    auto report = dtln::evaluate(model, entries, out_csv);
    std::printf("files:             %zu\n", report.files.size());
    std::printf("mean SI-SDR noisy: %8.3f dB   enhanced: %8.3f dB\n", report.mean_si_sdr_noisy,
                report.mean_si_sdr_enhanced);
    std::printf("mean STOI  noisy:  %8.4f      enhanced: %8.4f\n", report.mean_stoi_noisy,
                report.mean_stoi_enhanced);
    for (const auto& m : report.missing) std::fprintf(stderr, "missing: %s\n", m.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DTLN noise suppression toolkit"};
    app.require_subcommand(1);

    // denoise
    auto* denoise = app.add_subcommand("denoise", "Denoise a WAV file");
    std::string dn_weights, dn_in, dn_out, dn_mode = "stream";
    denoise->add_option("--weights", dn_weights, "weight file")->required();
    denoise->add_option("--in", dn_in, "input WAV (mono 16 kHz)")->required();
    denoise->add_option("--out", dn_out, "output WAV")->required();
    denoise->add_option("--mode", dn_mode, "processing mode")
        ->check(CLI::IsMember({"stream", "sequence"}));

    // bench
    auto* bench = app.add_subcommand("bench", "Per-frame latency benchmark");
    std::string be_weights, be_mode = "stream", be_csv;
    double be_seconds = 10.0;
    bench->add_option("--weights", be_weights, "weight file")->required();
    bench->add_option("--seconds", be_seconds, "synthetic input length")->check(CLI::PositiveNumber);
    bench->add_option("--mode", be_mode, "processing mode")->check(CLI::IsMember({"stream", "sequence"}));
    bench->add_option("--csv", be_csv, "also write the report as CSV");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a model from a config file");
    std::string tr_config;
    train_cmd->add_option("--config", tr_config, "key = value config file")->required();

    // build-dataset
    auto* build = app.add_subcommand("build-dataset", "Synthesize an SNR-controlled mixture dataset");
    std::string bd_speech, bd_noise, bd_out;
    double bd_hours = 0.5;
    uint64_t bd_seed = 1;
    build->add_option("--speech", bd_speech, "directory of speech WAVs")->required();
    build->add_option("--noise", bd_noise, "directory of noise WAVs")->required();
    build->add_option("--hours", bd_hours, "total hours to generate")->required();
    build->add_option("--out", bd_out, "output directory")->required();
    build->add_option("--seed", bd_seed, "generation seed");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Objective evaluation (SI-SDR, STOI)");
    std::string ev_weights, ev_manifest, ev_csv, ev_split = "val";
    eval_cmd->add_option("--weights", ev_weights, "weight file")->required();
    eval_cmd->add_option("--manifest", ev_manifest, "dataset manifest")->required();
    eval_cmd->add_option("--out", ev_csv, "per-file metrics CSV")->required();
    eval_cmd->add_option("--split", ev_split, "manifest split to evaluate")
        ->check(CLI::IsMember({"train", "val", "all"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadArgs;
    }

    try {
        if (*denoise) return cmd_denoise(dn_weights, dn_in, dn_out, dn_mode);
        if (*bench) return cmd_bench(be_weights, be_seconds, be_mode, be_csv);
        if (*train_cmd) return cmd_train(tr_config);
        if (*build) return cmd_build_dataset(bd_speech, bd_noise, bd_hours, bd_out, bd_seed);
        if (*eval_cmd) return cmd_eval(ev_weights, ev_manifest, ev_csv, ev_split);
    } catch (const dtln::WeightsError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadWeights;
    } catch (const dtln::AudioError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadInput;
    } catch (const dtln::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}
