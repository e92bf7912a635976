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

#ifndef DTLN_WAV_HPP
#define DTLN_WAV_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "dtln/audio.hpp"
#include "dtln/errors.hpp"

namespace dtln {

// Minimal RIFF/WAVE reader and writer for the corpus this toolkit consumes:
// mono 16 kHz, PCM16 or IEEE float32 data. Everything else is rejected with
// a specific message rather than resampled or downmixed.
static_assert(std::endian::native == std::endian::little, "WAV I/O requires a little-endian host");

namespace wav_detail {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;

inline uint32_t read_u32(std::istream& is) {
    uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

inline uint16_t read_u16(std::istream& is) {
    uint16_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 2);
    return v;
}

inline void write_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
inline void write_u16(std::ostream& os, uint16_t v) { os.write(reinterpret_cast<const char*>(&v), 2); }

}  // namespace wav_detail

inline AudioBuffer read_wav(const std::string& path) {
    using namespace wav_detail;
    std::ifstream is(path, std::ios::binary);
    if (!is) throw AudioError("cannot open WAV file: " + path);

    char tag[4];
    is.read(tag, 4);
    if (!is || std::memcmp(tag, "RIFF", 4) != 0) throw AudioError("malformed WAV header (no RIFF): " + path);
    read_u32(is);  // RIFF size, unused
    is.read(tag, 4);
    if (!is || std::memcmp(tag, "WAVE", 4) != 0) throw AudioError("malformed WAV header (no WAVE): " + path);

    bool have_fmt = false;
    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t rate = 0;
    std::vector<char> data;
    bool have_data = false;

    while (is.read(tag, 4)) {
        const uint32_t chunk_size = read_u32(is);
        if (!is) throw AudioError("malformed WAV chunk header: " + path);
        if (std::memcmp(tag, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw AudioError("malformed fmt chunk: " + path);
            format = read_u16(is);
            channels = read_u16(is);
            rate = read_u32(is);
            read_u32(is);  // byte rate
            read_u16(is);  // block align
            bits = read_u16(is);
            is.ignore(chunk_size - 16);
            have_fmt = true;
            if (chunk_size & 1) is.ignore(1);  // chunks are word-aligned
        } else if (std::memcmp(tag, "data", 4) == 0) {
            data.resize(chunk_size);
            is.read(data.data(), chunk_size);
            if (static_cast<uint32_t>(is.gcount()) != chunk_size)
                throw AudioError("WAV data chunk truncated: " + path);
            have_data = true;
            if (chunk_size & 1) is.ignore(1);
        } else {
            is.ignore(chunk_size + (chunk_size & 1));
        }
    }

    if (!have_fmt) throw AudioError("malformed WAV file (no fmt chunk): " + path);
    if (!have_data) throw AudioError("malformed WAV file (no data chunk): " + path);
    if (channels != 1) throw AudioError("multichannel WAV unsupported (mono only): " + path);
    if (rate != static_cast<uint32_t>(kSampleRate))
        throw AudioError("sample rate " + std::to_string(rate) + " Hz: resampling unsupported (need 16000): " + path);
    if (data.empty()) throw AudioError("WAV has a zero-length data chunk: " + path);

    AudioBuffer out;
    out.sample_rate = kSampleRate;
    if (format == kFormatPcm && bits == 16) {
        const size_t n = data.size() / 2;
        out.samples.resize(n);
        const int16_t* pcm = reinterpret_cast<const int16_t*>(data.data());
        for (size_t i = 0; i < n; ++i) out.samples[i] = static_cast<double>(pcm[i]) / 32768.0;
    } else if (format == kFormatFloat && bits == 32) {
        const size_t n = data.size() / 4;
        out.samples.resize(n);
        const float* f = reinterpret_cast<const float*>(data.data());
        for (size_t i = 0; i < n; ++i) out.samples[i] = static_cast<double>(f[i]);
    } else {
        throw AudioError("unsupported WAV sample format (need PCM16 or float32): " + path);
    }
    if (!all_finite(out.samples)) throw AudioError("WAV contains non-finite samples: " + path);
    return out;
}

// PCM16 with saturating conversion.
inline void write_wav(const std::string& path, const AudioBuffer& audio) {
    using namespace wav_detail;
    if (audio.sample_rate != kSampleRate) throw AudioError("write_wav: sample rate must be 16000 Hz");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw AudioError("cannot open WAV file for writing: " + path);

    const uint32_t n = static_cast<uint32_t>(audio.samples.size());
    const uint32_t data_bytes = n * 2;
    os.write("RIFF", 4);
    write_u32(os, 36 + data_bytes);
    os.write("WAVE", 4);
    os.write("fmt ", 4);
    write_u32(os, 16);
    write_u16(os, kFormatPcm);
    write_u16(os, 1);  // mono
    write_u32(os, kSampleRate);
    write_u32(os, kSampleRate * 2);  // byte rate
    write_u16(os, 2);                // block align
    write_u16(os, 16);               // bits
    os.write("data", 4);
    write_u32(os, data_bytes);
    std::vector<int16_t> pcm(n);
    for (uint32_t i = 0; i < n; ++i) {
        const double scaled = std::lround(audio.samples[i] * 32768.0);
        pcm[i] = static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    }
    os.write(reinterpret_cast<const char*>(pcm.data()), data_bytes);
    if (!os) throw AudioError("write failed: " + path);
}

}  // namespace dtln

#endif  // DTLN_WAV_HPP
