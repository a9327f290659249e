// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Independent brute-force reference implementations used to check the
// library's fast paths. Everything here favors obviousness over speed:
// direct sums, dense matrix arithmetic, no shared code with the library
// beyond elementary types.

#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

namespace oracles {

inline constexpr double kPi = 3.14159265358979323846;

using cd = std::complex<double>;

// ---- randomness -----------------------------------------------------------

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
    return lo + u * (hi - lo);
}

inline cd random_complex(std::mt19937_64& rng, double scale = 1.0) {
    return {uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
}

// Random Hermitian positive semidefinite matrix G G^H (+ ridge), row-major.
inline std::vector<cd> random_hermitian_psd(std::mt19937_64& rng, std::size_t m,
                                            double ridge = 0.0) {
    const std::size_t r = m + 1;
    std::vector<cd> g(m * r);
    for (cd& v : g) v = random_complex(rng);
    std::vector<cd> out(m * m, cd{0.0, 0.0});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            cd acc{0.0, 0.0};
            for (std::size_t k = 0; k < r; ++k)
                acc += g[i * r + k] * std::conj(g[j * r + k]);
            out[i * m + j] = acc;
        }
    for (std::size_t i = 0; i < m; ++i) out[i * m + i] += ridge;
    return out;
}

// Random unit-modulus vector (steering-like phases).
inline std::vector<cd> random_phases(std::mt19937_64& rng, std::size_t m) {
    std::vector<cd> a(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double phi = uniform(rng, -kPi, kPi);
        a[i] = {std::cos(phi), std::sin(phi)};
    }
    return a;
}

// ---- spectra --------------------------------------------------------------

// Direct O(n^2) DFT of a real signal; returns all n bins.
inline std::vector<cd> naive_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<cd> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cd acc{0.0, 0.0};
        for (std::size_t l = 0; l < n; ++l) {
            const double ang = -2.0 * kPi * static_cast<double>(k) *
                               static_cast<double>(l) / static_cast<double>(n);
            acc += x[l] * cd{std::cos(ang), std::sin(ang)};
        }
        out[k] = acc;
    }
    return out;
}

// One windowed STFT frame of one channel by direct summation.
inline std::vector<cd> naive_stft_frame(const std::vector<float>& signal,
                                        const std::vector<double>& window,
                                        std::size_t start) {
    std::vector<double> seg(window.size(), 0.0);
    for (std::size_t l = 0; l < window.size(); ++l) {
        const std::size_t idx = start + l;
        const double s = idx < signal.size() ? static_cast<double>(signal[idx]) : 0.0;
        seg[l] = window[l] * s;
    }
    return naive_dft(seg);
}

// CPSD by the obvious per-frame outer-product average. frames[f] holds the
// per-mic spectra values at one frequency bin.
inline std::vector<cd> naive_cpsd_bin(const std::vector<std::vector<cd>>& frames) {
    assert(!frames.empty());
    const std::size_t m = frames.front().size();
    std::vector<cd> acc(m * m, cd{0.0, 0.0});
    for (const std::vector<cd>& x : frames)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                acc[i * m + j] += x[i] * std::conj(x[j]);
    const double inv = 1.0 / static_cast<double>(frames.size());
    for (cd& v : acc) v *= inv;
    return acc;
}

// ---- linear algebra -------------------------------------------------------

inline std::vector<double> mat_mul(const std::vector<double>& a,
                                   const std::vector<double>& b, std::size_t n,
                                   std::size_t k, std::size_t m) {
    // a: n x k, b: k x m -> n x m
    std::vector<double> c(n * m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t j = 0; j < m; ++j)
                c[i * m + j] += a[i * k + p] * b[p * m + j];
    return c;
}

inline std::vector<double> mat_transpose(const std::vector<double>& a, std::size_t n,
                                         std::size_t m) {
    std::vector<double> t(m * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) t[j * n + i] = a[i * m + j];
    return t;
}

inline std::vector<double> mat_identity(std::size_t n) {
    std::vector<double> e(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
    return e;
}

inline std::vector<double> mat_add(const std::vector<double>& a,
                                   const std::vector<double>& b) {
    std::vector<double> c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

inline std::vector<double> mat_sub(const std::vector<double>& a,
                                   const std::vector<double>& b) {
    std::vector<double> c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
    return c;
}

inline std::vector<double> inverse_2x2(const std::vector<double>& s) {
    const double det = s[0] * s[3] - s[1] * s[2];
    assert(det != 0.0);
    return {s[3] / det, -s[1] / det, -s[2] / det, s[0] / det};
}

// a^H M a for complex row-major M.
inline cd quad_form(const std::vector<cd>& m, const std::vector<cd>& a) {
    const std::size_t n = a.size();
    cd acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            acc += std::conj(a[i]) * m[i * n + j] * a[j];
    return acc;
}

// The diagonal-unloading power evaluated straight from its definition,
// with the same denominator floor convention as the library.
inline double du_power_reference(const std::vector<cd>& phi, const std::vector<cd>& a) {
    const std::size_t m = a.size();
    double trace = 0.0;
    for (std::size_t i = 0; i < m; ++i) trace += phi[i * m + i].real();
    std::vector<cd> unloaded(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            unloaded[i * m + j] =
                (i == j ? cd{trace, 0.0} : cd{0.0, 0.0}) - phi[i * m + j];
    const double denom = quad_form(unloaded, a).real();
    const double floor = 1e-12 * std::max(trace * static_cast<double>(m), 1.0);
    return 1.0 / std::max(floor, denom);
}

// ---- signals --------------------------------------------------------------

// Lag of the cross-correlation peak between two equal-length signals,
// searched over [-max_lag, max_lag]; positive lag means b trails a.
inline long xcorr_peak_lag(const std::vector<float>& a, const std::vector<float>& b,
                           long max_lag) {
    assert(a.size() == b.size());
    const long n = static_cast<long>(a.size());
    double best = -1.0;
    long best_lag = 0;
    for (long lag = -max_lag; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (long i = 0; i < n; ++i) {
            const long j = i - lag;
            if (j >= 0 && j < n)
                acc += static_cast<double>(a[i]) * static_cast<double>(b[j]);
        }
        if (acc > best) {
            best = acc;
            best_lag = lag;
        }
    }
    return best_lag;
}

inline double mean_power(const std::vector<float>& x, std::size_t begin,
                         std::size_t end) {
    assert(begin <= end && end <= x.size());
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i)
        acc += static_cast<double>(x[i]) * static_cast<double>(x[i]);
    return end > begin ? acc / static_cast<double>(end - begin) : 0.0;
}

// ---- comparison -----------------------------------------------------------

inline double rel_err(double got, double want) {
    const double scale = std::max(std::abs(want), 1e-30);
    return std::abs(got - want) / scale;
}

inline double max_rel_err_complex(const std::vector<cd>& got,
                                  const std::vector<cd>& want) {
    assert(got.size() == want.size());
    double scale = 1e-30;
    for (const cd& w : want) scale = std::max(scale, std::abs(w));
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i)
        worst = std::max(worst, std::abs(got[i] - want[i]) / scale);
    return worst;
}

} // namespace oracles
