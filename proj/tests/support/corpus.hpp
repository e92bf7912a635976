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

#ifndef DTLN_TESTS_CORPUS_HPP
#define DTLN_TESTS_CORPUS_HPP

#include <filesystem>
#include <string>

#include "dtln/synth.hpp"
#include "dtln/wav.hpp"

namespace corpus {

// Writes `count` synthetic speech WAVs of `seconds` each into dir.
inline void make_speech_dir(const std::filesystem::path& dir, int count, double seconds, uint64_t seed) {
    std::filesystem::create_directories(dir);
    for (int i = 0; i < count; ++i) {
        dtln::AudioBuffer a;
        a.samples = dtln::synth::speech(seconds, seed + i);
        char name[32];
        std::snprintf(name, sizeof name, "speech_%03d.wav", i);
        dtln::write_wav((dir / name).string(), a);
    }
}

inline void make_noise_dir(const std::filesystem::path& dir, int count, double seconds, uint64_t seed) {
    std::filesystem::create_directories(dir);
    for (int i = 0; i < count; ++i) {
        dtln::AudioBuffer a;
        a.samples = dtln::synth::noise(dtln::synth::noise_kind_for(i), seconds, seed + 1000 + i);
        char name[32];
        std::snprintf(name, sizeof name, "noise_%03d.wav", i);
        dtln::write_wav((dir / name).string(), a);
    }
}

}  // namespace corpus

#endif  // DTLN_TESTS_CORPUS_HPP
