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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <string>

#include "dtln/dataset.hpp"
#include "dtln/synth.hpp"
#include "dtln/wav.hpp"
#include "dtln/weights_io.hpp"
#include "support/corpus.hpp"

using namespace dtln;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

fs::path temp_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / "dtln_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const auto log = fs::temp_directory_path() / ("dtln_cli_out_" + std::to_string(counter++) + ".log");
    const std::string cmd = std::string(DTLN_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    std::ifstream is(log);
    r.output.assign((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    fs::remove(log);
    return r;
}

std::string make_weights(const fs::path& dir, const std::string& topology = "DTLN") {
    const auto path = dir / (topology + ".dtln");
    save_weights(Model<float>::init(topology, 99), path.string());
    return path.string();
}

double parse_metric(const std::string& output, const std::string& key) {
    const std::regex re(key + R"(:\s*([-+0-9.eE]+))");
    std::smatch m;
    if (!std::regex_search(output, m, re)) throw std::runtime_error("missing '" + key + "' in:\n" + output);
    return std::stod(m[1]);
}

}  // namespace

TEST_CASE("denoise maps a zero WAV to a zero WAV of identical length", "[cli]") {
    const auto dir = temp_dir("denoise_zero");
    const auto weights = make_weights(dir);
    AudioBuffer zeros;
    zeros.samples.assign(12345, 0.0);
    const auto in = dir / "in.wav";
    const auto out = dir / "out.wav";
    write_wav(in.string(), zeros);

    auto r = run_cli("denoise --weights " + weights + " --in " + in.string() + " --out " + out.string());
    REQUIRE(r.exit_code == 0);
    auto result = read_wav(out.string());
    REQUIRE(result.size() == zeros.size());
    for (double v : result.samples) REQUIRE(v == 0.0);
}

TEST_CASE("denoise stream and sequence modes agree", "[cli]") {
    const auto dir = temp_dir("denoise_modes");
    const auto weights = make_weights(dir);
    AudioBuffer audio;
    audio.samples = synth::speech(2.0, 7);
    const auto in = dir / "in.wav";
    write_wav(in.string(), audio);
    const auto out_a = dir / "a.wav";
    const auto out_b = dir / "b.wav";

    REQUIRE(run_cli("denoise --weights " + weights + " --in " + in.string() + " --out " + out_a.string() +
                    " --mode stream")
                .exit_code == 0);
    REQUIRE(run_cli("denoise --weights " + weights + " --in " + in.string() + " --out " + out_b.string() +
                    " --mode sequence")
                .exit_code == 0);

    auto a = read_wav(out_a.string());
    auto b = read_wav(out_b.string());
    REQUIRE(a.size() == audio.size());
    REQUIRE(b.size() == audio.size());
    double max_err = 0.0;
    for (size_t i = 0; i < a.size(); ++i) max_err = std::max(max_err, std::fabs(a.samples[i] - b.samples[i]));
    // 1e-5 agreement pre-quantization; allow one extra PCM16 step
    CHECK(max_err <= 1e-5 + 2.0 / 32768.0);

    // output stays inside [-1, 1]
    for (double v : a.samples) {
        REQUIRE(v <= 1.0);
        REQUIRE(v >= -1.0);
    }
}

TEST_CASE("denoise with a missing weight file exits 4 and names the path", "[cli]") {
    const auto dir = temp_dir("denoise_missing");
    AudioBuffer audio;
    audio.samples.assign(16000, 0.1);
    const auto in = dir / "in.wav";
    write_wav(in.string(), audio);
    auto r = run_cli("denoise --weights /nonexistent/w.dtln --in " + in.string() + " --out " +
                     (dir / "out.wav").string());
    CHECK(r.exit_code == 4);
    CHECK(r.output.find("/nonexistent/w.dtln") != std::string::npos);
}

TEST_CASE("bad arguments exit 2", "[cli]") {
    CHECK(run_cli("denoise --nonsense").exit_code == 2);
    CHECK(run_cli("bench").exit_code == 2);            // missing required --weights
    CHECK(run_cli("unknown-subcommand").exit_code == 2);
}

TEST_CASE("unreadable input exits 3", "[cli]") {
    const auto dir = temp_dir("denoise_badinput");
    const auto weights = make_weights(dir);
    const auto garbage = dir / "garbage.wav";
    std::ofstream(garbage) << "not audio";
    auto r = run_cli("denoise --weights " + weights + " --in " + garbage.string() + " --out " +
                     (dir / "out.wav").string());
    CHECK(r.exit_code == 3);
}

TEST_CASE("bench reports the frame count and stays under the hop budget", "[cli]") {
    const auto dir = temp_dir("bench");
    const auto weights = make_weights(dir);

    auto stream = run_cli("bench --weights " + weights + " --seconds 10 --mode stream --csv " +
                          (dir / "bench.csv").string());
    REQUIRE(stream.exit_code == 0);
    // 10 s at 16 kHz: (160000 - 512)/128 + 1 full frames
    CHECK(stream.output.find("frames:            1247") != std::string::npos);
    const double stream_mean = parse_metric(stream.output, "mean per frame");
    const double rtf = parse_metric(stream.output, "real-time factor");
    CHECK(rtf > 0.0);
    CHECK(rtf < 1.0);  // real-time capable on a desktop CPU
    CHECK(parse_metric(stream.output, "max per frame") >= parse_metric(stream.output, "p95 per frame"));
    REQUIRE(fs::exists(dir / "bench.csv"));

    auto seq = run_cli("bench --weights " + weights + " --seconds 10 --mode sequence");
    REQUIRE(seq.exit_code == 0);
    const double seq_mean = parse_metric(seq.output, "mean per frame");
    // sequence processing amortizes better than frame-by-frame streaming
    CHECK(seq_mean <= stream_mean * 1.05);
}

TEST_CASE("build-dataset writes pairs and a manifest", "[cli]") {
    const auto dir = temp_dir("build");
    corpus::make_speech_dir(dir / "speech", 2, 40.0, 1);
    corpus::make_noise_dir(dir / "noise", 2, 40.0, 2);
    auto r = run_cli("build-dataset --speech " + (dir / "speech").string() + " --noise " +
                     (dir / "noise").string() + " --hours 0.05 --out " + (dir / "data").string() +
                     " --seed 3");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("wrote 12 pairs (10 train / 2 val)") != std::string::npos);
    REQUIRE(fs::exists(dir / "data" / "manifest.tsv"));
    size_t wavs = 0;
    for (const auto& e : fs::directory_iterator(dir / "data"))
        if (e.path().extension() == ".wav") ++wavs;
    CHECK(wavs == 24);
}

TEST_CASE("train runs from a config file and checkpoints", "[cli]") {
    const auto dir = temp_dir("train");
    // short pairs keep the smoke run quick
    DatasetManifest m;
    for (int i = 0; i < 2; ++i) {
        AudioBuffer speech, noise;
        speech.samples = synth::speech(1.5, 50 + i);
        noise.samples = synth::noise(synth::NoiseKind::White, 1.5, 60 + i);
        auto mixed = mix_segments(speech, noise, 5.0);
        const auto mixp = dir / ("mix" + std::to_string(i) + ".wav");
        const auto refp = dir / ("ref" + std::to_string(i) + ".wav");
        write_wav(mixp.string(), mixed.mixture);
        write_wav(refp.string(), mixed.reference);
        m.entries.push_back({i == 0 ? "train" : "val", mixp.string(), refp.string(), 5.0});
    }
    m.write((dir / "manifest.tsv").string());

    const auto cfg = dir / "train.cfg";
    {
        std::ofstream os(cfg);
        os << "topology = DTLN\nbatch_size = 1\nmax_epochs = 2\nseed = 11\n"
           << "manifest = " << (dir / "manifest.tsv").string() << "\n"
           << "checkpoint_dir = " << (dir / "ckpt").string() << "\n";
    }
    auto r = run_cli("train --config " + cfg.string());
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(dir / "ckpt" / "best.dtln"));
    std::ifstream log((dir / "ckpt" / "train_log.csv").string());
    std::string line;
    int rows = 0;
    while (std::getline(log, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3);  // header + 2 epochs

    // trained checkpoint evaluates cleanly
    auto ev = run_cli("eval --weights " + (dir / "ckpt" / "best.dtln").string() + " --manifest " +
                      (dir / "manifest.tsv").string() + " --out " + (dir / "report.csv").string());
    REQUIRE(ev.exit_code == 0);
    CHECK(fs::exists(dir / "report.csv"));
}

TEST_CASE("eval with missing weights exits 4", "[cli]") {
    const auto dir = temp_dir("eval_missing");
    DatasetManifest m;
    m.entries.push_back({"val", (dir / "a.wav").string(), (dir / "b.wav").string(), 0.0});
    m.write((dir / "manifest.tsv").string());
    auto r = run_cli("eval --weights /nonexistent/w.dtln --manifest " + (dir / "manifest.tsv").string() +
                     " --out " + (dir / "r.csv").string());
    CHECK(r.exit_code == 4);
}

TEST_CASE("synth corpus tool writes the requested corpus", "[cli]") {
    const auto dir = temp_dir("synth");
    const std::string cmd = std::string(DTLN_CORPUS_TOOL_PATH) + " --out " + dir.string() +
                            " --speech-files 2 --noise-files 1 --seconds 2 --seed 1 > " +
                            (dir / "log.txt").string() + " 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(dir / "speech" / "speech_000.wav"));
    CHECK(fs::exists(dir / "speech" / "speech_001.wav"));
    CHECK(fs::exists(dir / "noise" / "noise_000.wav"));
    auto a = read_wav((dir / "speech" / "speech_000.wav").string());
    CHECK(a.size() == 32000);
}
