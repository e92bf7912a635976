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

// Writes a synthetic speech/noise source corpus, so the full
// build-dataset -> train -> eval pipeline runs without external audio.

#include <cstdio>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "dtln/synth.hpp"
#include "dtln/wav.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Synthetic speech/noise corpus generator"};
    std::string out_dir;
    int speech_files = 8;
    int noise_files = 4;
    double seconds = 60.0;
    uint64_t seed = 1;
    app.add_option("--out", out_dir, "output directory (creates speech/ and noise/)")->required();
    app.add_option("--speech-files", speech_files, "number of speech WAVs")->check(CLI::PositiveNumber);
    app.add_option("--noise-files", noise_files, "number of noise WAVs")->check(CLI::PositiveNumber);
    app.add_option("--seconds", seconds, "length of each file")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "generation seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        namespace fs = std::filesystem;
        const auto speech_dir = fs::path(out_dir) / "speech";
        const auto noise_dir = fs::path(out_dir) / "noise";
        fs::create_directories(speech_dir);
        fs::create_directories(noise_dir);
        for (int i = 0; i < speech_files; ++i) {
            dtln::AudioBuffer a;
            a.samples = dtln::synth::speech(seconds, seed + i);
            char name[32];
            std::snprintf(name, sizeof name, "speech_%03d.wav", i);
            dtln::write_wav((speech_dir / name).string(), a);
        }
        for (int i = 0; i < noise_files; ++i) {
            dtln::AudioBuffer a;
            a.samples = dtln::synth::noise(dtln::synth::noise_kind_for(i), seconds, seed + 1000 + i);
            char name[32];
            std::snprintf(name, sizeof name, "noise_%03d.wav", i);
            dtln::write_wav((noise_dir / name).string(), a);
        }
        std::printf("wrote %d speech and %d noise files of %.0f s to %s\n", speech_files, noise_files,
                    seconds, out_dir.c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
