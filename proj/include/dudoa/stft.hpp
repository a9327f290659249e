// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "dudoa/common.hpp"
#include "dudoa/fft.hpp"

namespace dudoa {

/// Multichannel time-domain samples, channel-major.
struct MultichannelBuffer {
    std::vector<std::vector<float>> channels;
    double sample_rate_hz = 48000.0;

    std::size_t n_channels() const { return channels.size(); }
    std::size_t n_samples() const { return channels.empty() ? 0 : channels.front().size(); }

    void validate() const {
        if (channels.empty())
            throw config_error("buffer has no channels");
        for (const auto& ch : channels) {
            if (ch.size() != channels.front().size())
                throw config_error("channels have different lengths");
            for (float s : ch)
                if (!std::isfinite(s))
                    throw config_error("buffer contains non-finite samples");
        }
        if (!(sample_rate_hz > 0.0))
            throw config_error("sample rate must be positive");
    }
};

/// Analysis parameters: FFT size, hop, and the retained frequency band.
/// The window is fixed to the periodic Hann function.
struct StftConfig {
    std::size_t fft_size = 2048;
    std::size_t hop = 512;
    double band_low_hz = 80.0;
    double band_high_hz = 8000.0;

    void validate(double sample_rate_hz) const {
        if (fft_size < 2 || fft_size % 2 != 0)
            throw config_error("fft_size must be even and >= 2");
        if (hop == 0 || hop > fft_size)
            throw config_error("hop must be in [1, fft_size]");
        if (!(band_low_hz >= 0.0) || !(band_low_hz < band_high_hz) ||
            !(band_high_hz <= sample_rate_hz / 2.0))
            throw config_error("band must satisfy 0 <= f_min < f_max <= fs/2");
    }

    /// First in-band FFT bin, ceil(f_min * L / fs).
    std::size_t first_bin(double sample_rate_hz) const {
        return static_cast<std::size_t>(
            std::ceil(band_low_hz * static_cast<double>(fft_size) / sample_rate_hz - 1e-9));
    }
    /// Last in-band FFT bin, floor(f_max * L / fs).
    std::size_t last_bin(double sample_rate_hz) const {
        return static_cast<std::size_t>(
            std::floor(band_high_hz * static_cast<double>(fft_size) / sample_rate_hz + 1e-9));
    }
    std::size_t n_band_bins(double sample_rate_hz) const {
        return last_bin(sample_rate_hz) - first_bin(sample_rate_hz) + 1;
    }
    /// Center frequencies of the in-band bins.
    std::vector<double> band_freqs_hz(double sample_rate_hz) const {
        const std::size_t b0 = first_bin(sample_rate_hz), b1 = last_bin(sample_rate_hz);
        std::vector<double> f(b1 - b0 + 1);
        for (std::size_t i = 0; i < f.size(); ++i)
            f[i] = static_cast<double>(b0 + i) * sample_rate_hz / static_cast<double>(fft_size);
        return f;
    }
};

/// Periodic Hann window, w(l) = 0.5 (1 - cos(2 pi l / L)). Sums to L/2.
inline std::vector<double> hann_window(std::size_t length) {
    if (length < 2 || length % 2 != 0)
        throw config_error("hann window length must be even and >= 2");
    std::vector<double> w(length);
    for (std::size_t l = 0; l < length; ++l)
        w[l] = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(l) /
                                     static_cast<double>(length)));
    return w;
}

/// In-band spectra of one analysis frame, all channels.
struct SpectralFrame {
    std::size_t frame_index = 0;
    std::size_t n_channels = 0;
    std::vector<std::complex<double>> spectra; // n_channels x n_bins, channel-major
    std::vector<std::size_t> bin_indices;      // absolute FFT bin numbers

    std::size_t n_bins() const { return bin_indices.size(); }
    std::complex<double> at(std::size_t channel, std::size_t bin) const {
        return spectra[channel * n_bins() + bin];
    }
};

/// Streaming single-frame analyzer; owns the window and DFT plan.
class StftAnalyzer {
public:
    StftAnalyzer(const StftConfig& config, double sample_rate_hz)
        : config_(config),
          window_(hann_window(config.fft_size)),
          dft_(config.fft_size),
          first_bin_(config.first_bin(sample_rate_hz)),
          n_bins_(config.n_band_bins(sample_rate_hz)),
          windowed_(config.fft_size),
          bins_(config.fft_size / 2 + 1) {
        config.validate(sample_rate_hz);
    }

    /// Analyze frame k of the buffer (samples [k hop, k hop + L)).
    SpectralFrame analyze(const MultichannelBuffer& buffer, std::size_t frame_index) const {
        SpectralFrame frame;
        frame.frame_index = frame_index;
        frame.n_channels = buffer.n_channels();
        frame.bin_indices.resize(n_bins_);
        for (std::size_t i = 0; i < n_bins_; ++i)
            frame.bin_indices[i] = first_bin_ + i;
        frame.spectra.resize(buffer.n_channels() * n_bins_);

        const std::size_t start = frame_index * config_.hop;
        for (std::size_t ch = 0; ch < buffer.n_channels(); ++ch) {
            const auto& x = buffer.channels[ch];
            for (std::size_t l = 0; l < config_.fft_size; ++l)
                windowed_[l] = window_[l] * static_cast<double>(x[start + l]);
            dft_.forward(windowed_.data(), bins_.data());
            for (std::size_t i = 0; i < n_bins_; ++i)
                frame.spectra[ch * n_bins_ + i] = bins_[first_bin_ + i];
        }
        return frame;
    }

    std::size_t n_bins() const { return n_bins_; }
    std::size_t first_bin() const { return first_bin_; }

private:
    StftConfig config_;
    std::vector<double> window_;
    mutable RealDft dft_;
    std::size_t first_bin_;
    std::size_t n_bins_;
    mutable std::vector<double> windowed_;
    mutable std::vector<std::complex<double>> bins_;
};

inline std::size_t stft_frame_count(std::size_t n_samples, const StftConfig& config) {
    if (n_samples < config.fft_size) return 0;
    return (n_samples - config.fft_size) / config.hop + 1;
}

/// Batch STFT over the whole buffer; a buffer shorter than one frame yields
/// an empty sequence.
inline std::vector<SpectralFrame> stft(const MultichannelBuffer& buffer,
                                       const StftConfig& config) {
    buffer.validate();
    config.validate(buffer.sample_rate_hz);
    const std::size_t n_frames = stft_frame_count(buffer.n_samples(), config);
    std::vector<SpectralFrame> frames;
    if (n_frames == 0) return frames;
    StftAnalyzer analyzer(config, buffer.sample_rate_hz);
    frames.reserve(n_frames);
    for (std::size_t k = 0; k < n_frames; ++k)
        frames.push_back(analyzer.analyze(buffer, k));
    return frames;
}

} // namespace dudoa
