// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "dudoa/common.hpp"
#include "dudoa/stft.hpp"

namespace dudoa {

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(static_cast<std::uint32_t>(p[0]) |
                                      (static_cast<std::uint32_t>(p[1]) << 8));
}

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

inline void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

} // namespace detail

/// Read a RIFF/WAVE file into per-channel float buffers. Supported sample
/// formats: PCM 16-bit, PCM 24-bit, IEEE float 32-bit. Anything else is an
/// error; no resampling or channel mixing happens here.
inline MultichannelBuffer read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open WAV file: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw io_error("not a RIFF/WAVE file: " + path);

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t sample_rate = 0;
    const unsigned char* data = nullptr;
    std::size_t data_len = 0;
    bool have_fmt = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t len = detail::read_u32(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (body + len > bytes.size())
            throw io_error("truncated WAV chunk in " + path);
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (len < 16) throw io_error("malformed fmt chunk in " + path);
            format = detail::read_u16(bytes.data() + body);
            channels = detail::read_u16(bytes.data() + body + 2);
            sample_rate = detail::read_u32(bytes.data() + body + 4);
            bits = detail::read_u16(bytes.data() + body + 14);
            if (format == 0xfffe && len >= 40) // WAVE_FORMAT_EXTENSIBLE
                format = detail::read_u16(bytes.data() + body + 24);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = bytes.data() + body;
            data_len = len;
        }
        pos = body + len + (len & 1); // chunks are word-aligned
    }
    if (!have_fmt || data == nullptr)
        throw io_error("WAV file missing fmt or data chunk: " + path);
    if (channels == 0 || sample_rate == 0)
        throw io_error("WAV file has zero channels or sample rate: " + path);

    std::size_t bytes_per_sample;
    if (format == 1 && bits == 16) {
        bytes_per_sample = 2;
    } else if (format == 1 && bits == 24) {
        bytes_per_sample = 3;
    } else if (format == 3 && bits == 32) {
        bytes_per_sample = 4;
    } else {
        throw io_error("unsupported WAV format (want PCM16/24 or float32): " + path);
    }

    const std::size_t stride = bytes_per_sample * channels;
    const std::size_t frames = data_len / stride;
    MultichannelBuffer buf;
    buf.sample_rate_hz = static_cast<double>(sample_rate);
    buf.channels.assign(channels, std::vector<float>(frames));
    for (std::size_t n = 0; n < frames; ++n) {
        const unsigned char* p = data + n * stride;
        for (std::size_t c = 0; c < channels; ++c, p += bytes_per_sample) {
            float v;
            if (bytes_per_sample == 2) {
                const auto raw = static_cast<std::int16_t>(detail::read_u16(p));
                v = static_cast<float>(raw) / 32768.0f;
            } else if (bytes_per_sample == 3) {
                std::int32_t raw = static_cast<std::int32_t>(p[0]) |
                                   (static_cast<std::int32_t>(p[1]) << 8) |
                                   (static_cast<std::int32_t>(p[2]) << 16);
                if (raw & 0x800000) raw |= ~0xffffff; // sign-extend
                v = static_cast<float>(raw) / 8388608.0f;
            } else {
                std::uint32_t raw = detail::read_u32(p);
                std::memcpy(&v, &raw, sizeof v);
            }
            buf.channels[c][n] = v;
        }
    }
    return buf;
}

/// Write a multichannel buffer as IEEE float32 WAVE. Float output keeps the
/// generated scenes bit-exact through a write/read round trip.
inline void write_wav(const std::string& path, const MultichannelBuffer& buf) {
    buf.validate();
    const std::size_t channels = buf.channels.size();
    const std::size_t frames = buf.channels.front().size();
    const std::uint32_t rate = static_cast<std::uint32_t>(buf.sample_rate_hz);
    if (static_cast<double>(rate) != buf.sample_rate_hz)
        throw io_error("WAV writer requires an integer sample rate");

    const std::uint32_t data_len = static_cast<std::uint32_t>(4 * channels * frames);
    std::vector<unsigned char> out;
    out.reserve(60 + data_len);
    const char riff[] = "RIFF";
    const char wave[] = "WAVEfmt ";
    out.insert(out.end(), riff, riff + 4);
    detail::put_u32(out, 4 + (8 + 18) + (8 + 4) + (8 + data_len));
    out.insert(out.end(), wave, wave + 8);
    detail::put_u32(out, 18); // fmt chunk size with cbSize field
    detail::put_u16(out, 3);  // IEEE float
    detail::put_u16(out, static_cast<std::uint16_t>(channels));
    detail::put_u32(out, rate);
    detail::put_u32(out, rate * static_cast<std::uint32_t>(4 * channels));
    detail::put_u16(out, static_cast<std::uint16_t>(4 * channels));
    detail::put_u16(out, 32);
    detail::put_u16(out, 0); // cbSize
    const char fact[] = "fact";
    out.insert(out.end(), fact, fact + 4);
    detail::put_u32(out, 4);
    detail::put_u32(out, static_cast<std::uint32_t>(frames));
    const char data[] = "data";
    out.insert(out.end(), data, data + 4);
    detail::put_u32(out, data_len);
    for (std::size_t n = 0; n < frames; ++n) {
        for (std::size_t c = 0; c < channels; ++c) {
            std::uint32_t raw;
            const float v = buf.channels[c][n];
            std::memcpy(&raw, &v, sizeof raw);
            detail::put_u32(out, raw);
        }
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot open WAV file for writing: " + path);
    f.write(reinterpret_cast<const char*>(out.data()),
            static_cast<std::streamsize>(out.size()));
    if (!f) throw io_error("failed writing WAV file: " + path);
}

} // namespace dudoa
