// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <dudoa/scene.hpp>
#include <dudoa/wav.hpp>

#include "oracles.hpp"

using namespace dudoa;

namespace {

ArrayGeometry two_mic_line(double spacing) {
    ArrayGeometry g;
    g.kind = GeometryKind::linear_azimuth_only;
    g.positions = {{0.0, 0.0, 0.0}, {spacing, 0.0, 0.0}};
    return g;
}

SceneSpec base_spec(ArrayGeometry geometry, double az, double el,
                    double duration_s, std::uint64_t seed = 11) {
    SceneSpec spec;
    spec.geometry = std::move(geometry);
    spec.trajectory = Trajectory::constant(az, el);
    spec.duration_s = duration_s;
    spec.seed = seed;
    return spec;
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("linear interpolation between trajectory knots", "[scene]") {
    Trajectory t;
    t.samples = {{0.0, 10.0, 0.0}, {10.0, 20.0, 0.0}};
    const Direction mid = ground_truth_at(t, 5.0);
    REQUIRE_THAT(mid.azimuth_deg, Catch::Matchers::WithinAbs(15.0, 1e-12));
    REQUIRE(mid.elevation_deg == 0.0);

    // knots are reproduced exactly
    REQUIRE(ground_truth_at(t, 0.0).azimuth_deg == 10.0);
    REQUIRE(ground_truth_at(t, 10.0).azimuth_deg == 20.0);
}

TEST_CASE("azimuth interpolates along the shorter arc", "[scene]") {
    Trajectory t;
    t.samples = {{0.0, 170.0, 0.0}, {1.0, -170.0, 0.0}};
    REQUIRE_THAT(ground_truth_at(t, 0.5).azimuth_deg,
                 Catch::Matchers::WithinAbs(180.0, 1e-12));
    REQUIRE_THAT(ground_truth_at(t, 0.25).azimuth_deg,
                 Catch::Matchers::WithinAbs(175.0, 1e-12));
    REQUIRE_THAT(ground_truth_at(t, 0.75).azimuth_deg,
                 Catch::Matchers::WithinAbs(-175.0, 1e-12));
}

TEST_CASE("single-knot trajectories are static and unbounded", "[scene]") {
    const Trajectory t = Trajectory::constant(42.0, -7.0);
    REQUIRE(t.is_static());
    REQUIRE(t.covers(0.0, 1e6));
    REQUIRE(ground_truth_at(t, 12345.0).azimuth_deg == 42.0);
    REQUIRE(ground_truth_at(t, 12345.0).elevation_deg == -7.0);
}

TEST_CASE("out-of-span queries and malformed trajectories are rejected",
          "[scene]") {
    Trajectory t;
    t.samples = {{1.0, 0.0, 0.0}, {2.0, 10.0, 0.0}};
    REQUIRE_THROWS_AS(ground_truth_at(t, 0.5), config_error);
    REQUIRE_THROWS_AS(ground_truth_at(t, 2.5), config_error);

    Trajectory bad;
    REQUIRE_THROWS_AS(bad.validate(), config_error); // empty
    bad.samples = {{0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    REQUIRE_THROWS_AS(bad.validate(), config_error); // times not increasing
    bad.samples = {{0.0, 200.0, 0.0}};
    REQUIRE_THROWS_AS(bad.validate(), config_error); // azimuth out of range
    bad.samples = {{0.0, 0.0, 95.0}};
    REQUIRE_THROWS_AS(bad.validate(), config_error); // elevation out of range
}

TEST_CASE("broadside sources hit every mic identically", "[scene]") {
    ArrayGeometry g;
    g.kind = GeometryKind::linear_azimuth_only;
    for (int m = 0; m < 4; ++m)
        g.positions.push_back({0.04 * m, 0.0, 0.0});
    const SceneSpec spec = base_spec(std::move(g), 90.0, 0.0, 0.25);
    const auto [buf, truth] = synthesize(spec);
    REQUIRE(buf.n_channels() == 4);
    REQUIRE(buf.n_samples() == 12000);
    REQUIRE(truth.is_static());

    double peak = 0.0;
    for (float v : buf.channels[0]) peak = std::max(peak, std::abs(double(v)));
    REQUIRE(peak > 0.1); // the source actually produced signal
    for (std::size_t m = 1; m < 4; ++m)
        for (std::size_t n = 0; n < buf.n_samples(); ++n)
            REQUIRE(std::abs(buf.channels[m][n] - buf.channels[0][n]) <=
                    1e-6 * peak);
}

TEST_CASE("endfire spacing of 0.343 m shows a 48-sample lead", "[scene]") {
    const SceneSpec spec = base_spec(two_mic_line(0.343), 0.0, 0.0, 0.5, 23);
    const auto [buf, truth] = synthesize(spec);
    // mic 1 sits closer to the source, so channel 0 trails channel 1
    REQUIRE(oracles::xcorr_peak_lag(buf.channels[0], buf.channels[1], 60) == 48);

    // exact integer delay: the shifted samples agree bit-for-bit
    for (std::size_t n = 48; n < buf.n_samples(); ++n)
        REQUIRE(buf.channels[0][n] == buf.channels[1][n - 48]);
}

TEST_CASE("zero dB SNR calibrates noise power to signal power", "[scene]") {
    SceneSpec clean = base_spec(two_mic_line(0.05), 90.0, 0.0, 1.0, 5);
    SceneSpec noisy = clean;
    noisy.snr_db = 0.0;
    const auto [cbuf, ct] = synthesize(clean);
    const auto [nbuf, nt] = synthesize(noisy);

    for (std::size_t m = 0; m < 2; ++m) {
        std::vector<float> noise(cbuf.n_samples());
        for (std::size_t n = 0; n < noise.size(); ++n)
            noise[n] = nbuf.channels[m][n] - cbuf.channels[m][n];
        const double ps = oracles::mean_power(cbuf.channels[m], 0, cbuf.n_samples());
        const double pn = oracles::mean_power(noise, 0, noise.size());
        const double ratio_db = 10.0 * std::log10(ps / pn);
        REQUIRE(std::abs(ratio_db) < 0.1);
    }
}

TEST_CASE("snr scales with the requested level", "[scene]") {
    SceneSpec clean = base_spec(two_mic_line(0.05), 90.0, 0.0, 1.0, 6);
    SceneSpec noisy = clean;
    noisy.snr_db = 20.0;
    const auto [cbuf, ct] = synthesize(clean);
    const auto [nbuf, nt] = synthesize(noisy);
    std::vector<float> noise(cbuf.n_samples());
    for (std::size_t n = 0; n < noise.size(); ++n)
        noise[n] = nbuf.channels[0][n] - cbuf.channels[0][n];
    const double ps = oracles::mean_power(cbuf.channels[0], 0, cbuf.n_samples());
    const double pn = oracles::mean_power(noise, 0, noise.size());
    REQUIRE(std::abs(10.0 * std::log10(ps / pn) - 20.0) < 0.1);
}

TEST_CASE("identical specs synthesize bit-identical buffers", "[scene]") {
    SceneSpec spec = base_spec(two_mic_line(0.1), 30.0, 0.0, 0.4, 99);
    spec.snr_db = 10.0;
    const auto [a, ta] = synthesize(spec);
    const auto [b, tb] = synthesize(spec);
    REQUIRE(a.channels == b.channels);

    SceneSpec other = spec;
    other.seed = 100;
    const auto [c, tc] = synthesize(other);
    REQUIRE(a.channels != c.channels);
}

TEST_CASE("fractional delay taps follow the windowed-sinc formula",
          "[scene][oracle]") {
    for (double frac : {-0.5, -0.4, -0.125, 0.125, 0.25, 0.5, 0.75, 0.9}) {
        std::array<double, 63> taps;
        detail::fractional_delay_taps(frac, taps);
        for (int t = 0; t < 63; ++t) {
            const double x = static_cast<double>(t - 31) - frac;
            const double sinc = std::sin(oracles::kPi * x) / (oracles::kPi * x);
            const double want = sinc * detail::delay_window(x);
            REQUIRE_THAT(taps[static_cast<std::size_t>(t)],
                         Catch::Matchers::WithinAbs(want, 1e-12));
        }
    }

    std::array<double, 63> identity;
    detail::fractional_delay_taps(0.0, identity);
    for (int t = 0; t < 63; ++t)
        REQUIRE(identity[static_cast<std::size_t>(t)] == (t == 31 ? 1.0 : 0.0));
}

TEST_CASE("delayed sampling reconstructs a band-limited tone", "[scene]") {
    const double fs = 48000.0, f = 1000.0;
    std::vector<double> s(2048);
    for (std::size_t n = 0; n < s.size(); ++n)
        s[n] = std::sin(2.0 * oracles::kPi * f * static_cast<double>(n) / fs);
    for (double pos : {700.25, 901.5, 1200.75, 333.125, 512.0009765625}) {
        const double got = detail::sample_delayed(s, pos);
        const double want = std::sin(2.0 * oracles::kPi * f * pos / fs);
        REQUIRE_THAT(got, Catch::Matchers::WithinAbs(want, 1e-3));
    }
}

TEST_CASE("speech-like sources ring inside gates and stay silent outside",
          "[scene]") {
    SceneSpec spec = base_spec(two_mic_line(0.05), 90.0, 0.0, 0.3, 17);
    spec.source = SourceKind::speech_like;
    const auto [buf, truth] = synthesize(spec);
    const auto& ch = buf.channels[0];
    // 10 Hz gating: on for t in [0, 0.05), off for [0.05, 0.1), repeating
    REQUIRE(oracles::mean_power(ch, 480, 2300) > 0.0);
    REQUIRE(oracles::mean_power(ch, 2500, 4700) == 0.0);
    REQUIRE(oracles::mean_power(ch, 5000, 7100) > 0.0);
    REQUIRE(oracles::mean_power(ch, 7300, 9500) == 0.0);
}

TEST_CASE("active segments silence the source outside their spans", "[scene]") {
    // Mic 0 sits at the axis origin, so its channel is a bit-exact copy of
    // the gated source signal.
    SceneSpec spec = base_spec(two_mic_line(0.05), 0.0, 0.0, 0.3, 21);
    spec.active_segments = {{0.1, 0.2}};
    const auto [buf, truth] = synthesize(spec);
    const auto& ch = buf.channels[0];
    REQUIRE(oracles::mean_power(ch, 0, 4700) == 0.0);
    REQUIRE(oracles::mean_power(ch, 4900, 9500) > 0.0);
    REQUIRE(oracles::mean_power(ch, 9700, 14400) == 0.0);
}

TEST_CASE("file sources must match the scene sample rate", "[scene]") {
    const auto path = temp_path("du_doa_scene_rate.wav");
    MultichannelBuffer wav;
    wav.sample_rate_hz = 44100.0;
    wav.channels = {std::vector<float>(4410, 0.25f)};
    write_wav(path.string(), wav);

    SceneSpec spec = base_spec(two_mic_line(0.05), 90.0, 0.0, 0.1, 3);
    spec.source = SourceKind::file;
    spec.source_path = path.string();
    REQUIRE_THROWS_AS(synthesize(spec), config_error);
    std::remove(path.string().c_str());
}

TEST_CASE("file sources reach broadside channels unchanged", "[scene]") {
    const auto path = temp_path("du_doa_scene_file.wav");
    MultichannelBuffer wav;
    wav.sample_rate_hz = 48000.0;
    wav.channels.assign(1, std::vector<float>(4800));
    for (std::size_t n = 0; n < 4800; ++n)
        wav.channels[0][n] =
            static_cast<float>(0.5 * std::sin(2.0 * oracles::kPi * 440.0 *
                                              static_cast<double>(n) / 48000.0));
    write_wav(path.string(), wav);

    SceneSpec spec = base_spec(two_mic_line(0.05), 0.0, 0.0, 0.1, 3);
    spec.source = SourceKind::file;
    spec.source_path = path.string();
    const auto [buf, truth] = synthesize(spec);
    REQUIRE(buf.channels[0] == wav.channels[0]); // mic 0 has exactly zero delay
    std::remove(path.string().c_str());
}

TEST_CASE("scene validation rejects inconsistent specs", "[scene]") {
    SceneSpec spec = base_spec(two_mic_line(0.05), 90.0, 0.0, 2.0);
    spec.trajectory.samples = {{0.0, 0.0, 0.0}, {1.0, 10.0, 0.0}};
    REQUIRE_THROWS_AS(synthesize(spec), config_error); // trajectory too short

    spec = base_spec(two_mic_line(0.05), 90.0, 0.0, 0.0);
    REQUIRE_THROWS_AS(synthesize(spec), config_error); // zero duration

    spec = base_spec(two_mic_line(0.05), 90.0, 0.0, 0.1);
    spec.source = SourceKind::file; // no path given
    REQUIRE_THROWS_AS(synthesize(spec), config_error);

    spec = base_spec(two_mic_line(0.05), 90.0, 0.0, 0.1);
    spec.active_segments = {{0.2, 0.1}};
    REQUIRE_THROWS_AS(synthesize(spec), config_error);

    spec = base_spec(two_mic_line(0.05), 90.0, 0.0, 0.1);
    spec.snr_db = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(synthesize(spec), config_error);
}

TEST_CASE("moving sources track the interpolated direction", "[scene]") {
    // A source swinging from endfire to broadside changes the inter-channel
    // lag from 14 samples to 0; check both ends of a two-knot trajectory.
    SceneSpec spec = base_spec(two_mic_line(0.1), 0.0, 0.0, 2.0, 31);
    spec.trajectory.samples = {{0.0, 0.0, 0.0}, {2.0, 90.0, 0.0}};
    const auto [buf, truth] = synthesize(spec);

    const std::size_t n = buf.n_samples();
    std::vector<float> head0(buf.channels[0].begin(), buf.channels[0].begin() + 4800);
    std::vector<float> head1(buf.channels[1].begin(), buf.channels[1].begin() + 4800);
    // The tail window is shorter because the lag is still sweeping: over the
    // last 0.05 s the delay stays below 0.55 samples, so the peak sits at 0.
    std::vector<float> tail0(buf.channels[0].end() - 2400, buf.channels[0].end());
    std::vector<float> tail1(buf.channels[1].end() - 2400, buf.channels[1].end());
    // 0.1 m at c = 343 m/s is 14.0 samples at 48 kHz
    REQUIRE(oracles::xcorr_peak_lag(head0, head1, 30) == 14);
    REQUIRE(oracles::xcorr_peak_lag(tail0, tail1, 30) == 0);
    REQUIRE(n == 96000);
}
