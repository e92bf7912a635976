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

#ifndef DTLN_DATASET_HPP
#define DTLN_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dtln/audio.hpp"
#include "dtln/errors.hpp"
#include "dtln/rng.hpp"
#include "dtln/wav.hpp"

namespace dtln {

constexpr double kSnrLoDb = -5.0;
constexpr double kSnrHiDb = 25.0;
constexpr int kSnrLevels = 30;
constexpr double kSegmentSeconds = 15.0;
constexpr double kPeakLimit = 0.99;

// The 30 evenly spaced SNR levels over [-5, 25] dB.
inline std::vector<double> snr_grid() {
    std::vector<double> grid(kSnrLevels);
    for (int k = 0; k < kSnrLevels; ++k)
        grid[k] = kSnrLoDb + (kSnrHiDb - kSnrLoDb) * k / (kSnrLevels - 1.0);
    return grid;
}

struct MixResult {
    AudioBuffer mixture;
    AudioBuffer reference;
    double noise_gain = 0.0;
    double rescale = 1.0;  // joint peak-limiting factor applied to both
};

// Equal-length mixing at an exact SNR. The noise is scaled by
// g = sqrt(P_speech / (P_noise * 10^(snr/10))); hitting the peak limit
// rescales mixture and reference together so y = x_s + x_n stays exact.
inline MixResult mix_segments(const AudioBuffer& speech, const AudioBuffer& noise, double snr_db) {
    if (speech.size() != noise.size()) throw ShapeError("mix_segments: length mismatch");
    check_audio(speech, "mix_segments");
    check_audio(noise, "mix_segments");
    const double p_speech = signal_power(speech.samples);
    const double p_noise = signal_power(noise.samples);
    if (p_speech < 1e-12) throw AudioError("mix: silent speech segment");
    if (p_noise < 1e-12) throw AudioError("mix: silent noise segment");

    MixResult out;
    out.noise_gain = std::sqrt(p_speech / (p_noise * std::pow(10.0, snr_db / 10.0)));
    out.mixture.samples.resize(speech.size());
    out.reference = speech;
    for (size_t i = 0; i < speech.size(); ++i)
        out.mixture.samples[i] = speech.samples[i] + out.noise_gain * noise.samples[i];

    const double peak = peak_abs(out.mixture.samples);
    if (peak > kPeakLimit) {
        out.rescale = kPeakLimit / peak;
        for (auto& v : out.mixture.samples) v *= out.rescale;
        for (auto& v : out.reference.samples) v *= out.rescale;
    }
    return out;
}

// SNR-controlled mixing with a seeded random noise crop. The noise must be
// at least as long as the speech.
inline MixResult mix_at_snr(const AudioBuffer& speech, const AudioBuffer& noise, double snr_db, Rng& rng) {
    if (noise.size() < speech.size()) throw AudioError("mix_at_snr: noise shorter than speech");
    const size_t max_offset = noise.size() - speech.size();
    const size_t offset = max_offset == 0 ? 0 : rng.uniform_int(max_offset + 1);
    AudioBuffer crop;
    crop.samples.assign(noise.samples.begin() + offset, noise.samples.begin() + offset + speech.size());
    return mix_segments(speech, crop, snr_db);
}

struct ManifestEntry {
    std::string split;  // "train" or "val"
    std::string mixture_path;
    std::string reference_path;
    double snr_db = 0.0;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    std::vector<ManifestEntry> split(const std::string& tag) const {
        std::vector<ManifestEntry> out;
        for (const auto& e : entries)
            if (e.split == tag) out.push_back(e);
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream os(path, std::ios::trunc);
        if (!os) throw Error("cannot write manifest: " + path);
        for (const auto& e : entries) {
            char snr[32];
            std::snprintf(snr, sizeof snr, "%.10g", e.snr_db);
            os << e.split << '\t' << e.mixture_path << '\t' << e.reference_path << '\t' << snr << '\n';
        }
    }

    static DatasetManifest read(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw Error("cannot read manifest: " + path);
        DatasetManifest m;
        std::string line;
        size_t lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty()) continue;
            std::istringstream ss(line);
            ManifestEntry e;
            std::string snr;
            if (!std::getline(ss, e.split, '\t') || !std::getline(ss, e.mixture_path, '\t') ||
                !std::getline(ss, e.reference_path, '\t') || !std::getline(ss, snr, '\t'))
                throw Error("manifest: malformed line " + std::to_string(lineno) + " in " + path);
            e.snr_db = std::stod(snr);
            m.entries.push_back(e);
        }
        return m;
    }
};

// Deterministic recipe for one 15 s mixture pair; all randomness comes from
// (seed, pair index), so generation parallelizes without changing outputs.
struct PairPlan {
    size_t index = 0;
    size_t speech_file = 0;
    size_t speech_offset = 0;
    size_t noise_file = 0;
    size_t noise_offset = 0;
    double snr_db = 0.0;
    std::string split;
};

struct SourceTable {
    std::vector<size_t> speech_lengths;  // samples per usable file
    std::vector<size_t> noise_lengths;
};

inline std::vector<PairPlan> plan_dataset(const SourceTable& sources, size_t pairs,
                                          size_t segment_samples, uint64_t seed) {
    if (sources.speech_lengths.empty()) throw Error("plan_dataset: no usable speech files");
    if (sources.noise_lengths.empty()) throw Error("plan_dataset: no usable noise files");
    const auto grid = snr_grid();
    std::vector<PairPlan> plans(pairs);
    for (size_t i = 0; i < pairs; ++i) {
        Rng rng = Rng::derive(seed, i);
        PairPlan& p = plans[i];
        p.index = i;
        p.speech_file = rng.uniform_int(sources.speech_lengths.size());
        p.speech_offset = rng.uniform_int(sources.speech_lengths[p.speech_file] - segment_samples + 1);
        p.noise_file = rng.uniform_int(sources.noise_lengths.size());
        p.noise_offset = rng.uniform_int(sources.noise_lengths[p.noise_file] - segment_samples + 1);
        p.snr_db = grid[rng.uniform_int(grid.size())];
        p.split = (i % 5 == 4) ? "val" : "train";  // interleaved 80:20
    }
    return plans;
}

namespace dataset_detail {

inline std::vector<std::filesystem::path> list_wavs(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error("not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".wav") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace dataset_detail

// Emits `hours * 240` fifteen-second mixture/reference pairs plus a manifest
// with an interleaved 80:20 train/val split. Deterministic for a given seed.
inline DatasetManifest build_dataset(const std::string& speech_dir, const std::string& noise_dir,
                                     double hours, const std::string& out_dir, uint64_t seed) {
    namespace fs = std::filesystem;
    const size_t segment = static_cast<size_t>(kSegmentSeconds * kSampleRate);
    const size_t pairs = static_cast<size_t>(std::llround(hours * 3600.0 / kSegmentSeconds));
    if (pairs == 0) throw Error("build_dataset: hours too small, zero pairs requested");

    auto speech_files = dataset_detail::list_wavs(speech_dir);
    auto noise_files = dataset_detail::list_wavs(noise_dir);

    // keep only files that can donate a full 15 s segment
    SourceTable table;
    std::vector<fs::path> usable_speech, usable_noise;
    for (const auto& f : speech_files) {
        const auto a = read_wav(f.string());
        if (a.size() >= segment) {
            usable_speech.push_back(f);
            table.speech_lengths.push_back(a.size());
        }
    }
    for (const auto& f : noise_files) {
        const auto a = read_wav(f.string());
        if (a.size() >= segment) {
            usable_noise.push_back(f);
            table.noise_lengths.push_back(a.size());
        }
    }
    if (usable_speech.empty() || usable_noise.empty()) {
        std::ostringstream oss;
        oss << "build_dataset: insufficient source material: " << usable_speech.size() << " of "
            << speech_files.size() << " speech files and " << usable_noise.size() << " of "
            << noise_files.size() << " noise files are >= 15 s";
        throw Error(oss.str());
    }

    const auto plans = plan_dataset(table, pairs, segment, seed);
    fs::create_directories(out_dir);

    DatasetManifest manifest;
    manifest.entries.resize(pairs);
    for (const auto& plan : plans) {
        const auto speech_all = read_wav(usable_speech[plan.speech_file].string());
        const auto noise_all = read_wav(usable_noise[plan.noise_file].string());
        AudioBuffer speech_seg, noise_seg;
        speech_seg.samples.assign(speech_all.samples.begin() + plan.speech_offset,
                                  speech_all.samples.begin() + plan.speech_offset + segment);
        noise_seg.samples.assign(noise_all.samples.begin() + plan.noise_offset,
                                 noise_all.samples.begin() + plan.noise_offset + segment);
        const auto mixed = mix_segments(speech_seg, noise_seg, plan.snr_db);

        char stem[32];
        std::snprintf(stem, sizeof stem, "%05zu", plan.index);
        const auto mix_path = fs::path(out_dir) / (std::string("mix_") + stem + ".wav");
        const auto ref_path = fs::path(out_dir) / (std::string("ref_") + stem + ".wav");
        write_wav(mix_path.string(), mixed.mixture);
        write_wav(ref_path.string(), mixed.reference);
        manifest.entries[plan.index] =
            ManifestEntry{plan.split, mix_path.string(), ref_path.string(), plan.snr_db};
    }
    manifest.write((fs::path(out_dir) / "manifest.tsv").string());
    return manifest;
}

}  // namespace dtln

#endif  // DTLN_DATASET_HPP
