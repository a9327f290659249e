// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <span>
#include <vector>

#include <dudoa/cpsd.hpp>
#include <dudoa/stft.hpp>

#include "oracles.hpp"

using namespace dudoa;
using cd = std::complex<double>;

namespace {

SpectralFrame make_frame(std::size_t index, std::size_t mics, std::size_t bins,
                         std::mt19937_64* rng = nullptr) {
    SpectralFrame frame;
    frame.frame_index = index;
    frame.n_channels = mics;
    frame.bin_indices.resize(bins);
    for (std::size_t b = 0; b < bins; ++b) frame.bin_indices[b] = 4 + b;
    frame.spectra.assign(mics * bins, cd{0.0, 0.0});
    if (rng)
        for (cd& v : frame.spectra) v = oracles::random_complex(*rng);
    return frame;
}

} // namespace

TEST_CASE("single frame [1, j] gives the hand-computed outer product", "[cpsd]") {
    SpectralFrame frame = make_frame(7, 2, 1);
    frame.spectra = {cd{1.0, 0.0}, cd{0.0, 1.0}};
    const CpsdStack stack = estimate_cpsd(std::span<const SpectralFrame>(&frame, 1));
    REQUIRE(stack.frame_index == 7);
    REQUIRE(stack.n_mics == 2);
    REQUIRE(stack.n_bins() == 1);
    const auto m = stack.matrix(0);
    REQUIRE(m[0] == cd{1.0, 0.0});
    REQUIRE(m[1] == cd{0.0, -1.0});
    REQUIRE(m[2] == cd{0.0, 1.0});
    REQUIRE(m[3] == cd{1.0, 0.0});
    REQUIRE(stack.trace(0) == 2.0);
}

TEST_CASE("all-zero frames give zero matrices", "[cpsd]") {
    std::vector<SpectralFrame> frames;
    for (std::size_t k = 0; k < 5; ++k) frames.push_back(make_frame(k, 3, 4));
    const CpsdStack stack = estimate_cpsd(frames);
    for (const cd& v : stack.matrices) REQUIRE(v == cd{0.0, 0.0});
    for (std::size_t b = 0; b < stack.n_bins(); ++b) REQUIRE(stack.trace(b) == 0.0);
}

TEST_CASE("25-frame average matches the outer-product oracle", "[cpsd][oracle]") {
    std::mt19937_64 rng(0xc05du);
    const std::size_t mics = 4, bins = 6, n = 25;
    std::vector<SpectralFrame> frames;
    for (std::size_t k = 0; k < n; ++k)
        frames.push_back(make_frame(10 + k, mics, bins, &rng));

    const CpsdStack stack = estimate_cpsd(frames);
    REQUIRE(stack.frame_index == 10 + n - 1);
    for (std::size_t b = 0; b < bins; ++b) {
        std::vector<std::vector<cd>> per_frame;
        for (const SpectralFrame& f : frames) {
            std::vector<cd> x(mics);
            for (std::size_t i = 0; i < mics; ++i) x[i] = f.at(i, b);
            per_frame.push_back(std::move(x));
        }
        const std::vector<cd> want = oracles::naive_cpsd_bin(per_frame);
        const auto got = stack.matrix(b);
        std::vector<cd> got_v(got.begin(), got.end());
        REQUIRE(oracles::max_rel_err_complex(got_v, want) < 1e-12);
    }
}

TEST_CASE("CPSD matrices are Hermitian and positive semidefinite", "[cpsd]") {
    std::mt19937_64 rng(0xc05eu);
    const std::size_t mics = 5, bins = 3;
    std::vector<SpectralFrame> frames;
    for (std::size_t k = 0; k < 8; ++k)
        frames.push_back(make_frame(k, mics, bins, &rng));
    const CpsdStack stack = estimate_cpsd(frames);

    for (std::size_t b = 0; b < bins; ++b) {
        const auto m = stack.matrix(b);
        for (std::size_t i = 0; i < mics; ++i) {
            REQUIRE(m[i * mics + i].imag() == 0.0);
            REQUIRE(m[i * mics + i].real() >= 0.0);
            for (std::size_t j = 0; j < mics; ++j)
                REQUIRE(m[i * mics + j] == std::conj(m[j * mics + i]));
        }
        const double tr = stack.trace(b);
        const std::vector<cd> mat(m.begin(), m.end());
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<cd> a(mics);
            for (cd& v : a) v = oracles::random_complex(rng);
            REQUIRE(oracles::quad_form(mat, a).real() >= -1e-9 * tr);
        }
    }
}

TEST_CASE("trace equals the averaged per-channel power sum", "[cpsd]") {
    std::mt19937_64 rng(0xc05fu);
    const std::size_t mics = 3, bins = 5, n = 25;
    std::vector<SpectralFrame> frames;
    for (std::size_t k = 0; k < n; ++k)
        frames.push_back(make_frame(k, mics, bins, &rng));
    const CpsdStack stack = estimate_cpsd(frames);
    for (std::size_t b = 0; b < bins; ++b) {
        double want = 0.0;
        for (const SpectralFrame& f : frames)
            for (std::size_t i = 0; i < mics; ++i)
                want += std::norm(f.at(i, b));
        want /= static_cast<double>(n);
        REQUIRE(oracles::rel_err(stack.trace(b), want) < 1e-12);
    }
}

TEST_CASE("frame validation rejects bad inputs", "[cpsd]") {
    REQUIRE_THROWS_AS(estimate_cpsd(std::span<const SpectralFrame>{}), state_error);

    std::vector<SpectralFrame> mismatched{make_frame(0, 2, 4), make_frame(1, 3, 4)};
    REQUIRE_THROWS_AS(estimate_cpsd(mismatched), config_error);

    std::vector<SpectralFrame> gappy{make_frame(0, 2, 4), make_frame(2, 2, 4)};
    REQUIRE_THROWS_AS(estimate_cpsd(gappy), state_error);
}

TEST_CASE("common multiple-of-hop delay shifts blocks without changing CPSD",
          "[cpsd][stft]") {
    std::mt19937_64 rng(0xde1au);
    StftConfig cfg;
    cfg.fft_size = 64;
    cfg.hop = 16;
    cfg.band_low_hz = 0.0;
    cfg.band_high_hz = 24000.0;
    const std::size_t n_block = 4, delay_hops = 2;
    const std::size_t delay = delay_hops * cfg.hop;
    const std::size_t samples = cfg.fft_size + cfg.hop * (n_block - 1);

    MultichannelBuffer x;
    x.sample_rate_hz = 48000.0;
    x.channels.assign(3, std::vector<float>(samples));
    for (auto& ch : x.channels)
        for (float& v : ch) v = static_cast<float>(oracles::uniform(rng, -1.0, 1.0));

    MultichannelBuffer y = x;
    for (auto& ch : y.channels)
        ch.insert(ch.begin(), delay, 0.0f); // delay every channel identically

    const auto fx = stft(x, cfg);
    const auto fy = stft(y, cfg);
    REQUIRE(fx.size() == n_block);
    REQUIRE(fy.size() == n_block + delay_hops);

    const CpsdStack a = estimate_cpsd(
        std::span<const SpectralFrame>(fx.data(), n_block));
    const CpsdStack b = estimate_cpsd(
        std::span<const SpectralFrame>(fy.data() + delay_hops, n_block));
    REQUIRE(a.matrices.size() == b.matrices.size());
    for (std::size_t i = 0; i < a.matrices.size(); ++i)
        REQUIRE(a.matrices[i] == b.matrices[i]); // identical samples, exact match
}

TEST_CASE("periodic signal with period dividing the hop is block-invariant",
          "[cpsd][stft]") {
    StftConfig cfg;
    cfg.fft_size = 64;
    cfg.hop = 16;
    cfg.band_low_hz = 0.0;
    cfg.band_high_hz = 24000.0;
    const std::size_t samples = cfg.fft_size + cfg.hop * 7;
    const double period = 8.0; // divides both hop and delay below

    MultichannelBuffer x;
    x.sample_rate_hz = 48000.0;
    x.channels.assign(2, std::vector<float>(samples));
    for (std::size_t t = 0; t < samples; ++t) {
        // tile one exact period so the signal repeats bit-identically
        const double ph = 2.0 * oracles::kPi *
                          static_cast<double>(t % static_cast<std::size_t>(period)) / period;
        x.channels[0][t] = static_cast<float>(std::cos(ph));
        x.channels[1][t] = static_cast<float>(std::sin(ph) * 0.5);
    }
    MultichannelBuffer y = x; // delay by 2 hops = 4 full periods
    for (auto& ch : y.channels) {
        std::vector<float> shifted(ch.size());
        for (std::size_t t = 0; t < ch.size(); ++t) {
            const std::size_t src = (t + ch.size() - 2 * cfg.hop) % ch.size();
            shifted[t] = ch[src];
        }
        ch = shifted;
    }

    const auto fx = stft(x, cfg);
    const auto fy = stft(y, cfg);
    const CpsdStack a = estimate_cpsd(std::span<const SpectralFrame>(fx.data(), 4));
    const CpsdStack b = estimate_cpsd(std::span<const SpectralFrame>(fy.data(), 4));
    for (std::size_t i = 0; i < a.matrices.size(); ++i)
        REQUIRE(std::abs(a.matrices[i] - b.matrices[i]) < 1e-12);
}
