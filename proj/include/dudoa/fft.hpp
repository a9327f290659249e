// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "dudoa/common.hpp"

namespace dudoa {

/// Forward DFT of a real input frame, returning bins 0..L/2.
/// Power-of-two sizes run an iterative radix-2 transform on the half-length
/// complex sequence; other even sizes fall back to a direct O(L^2) sum.
class RealDft {
public:
    explicit RealDft(std::size_t length) : n_(length) {
        if (n_ < 2 || n_ % 2 != 0)
            throw config_error("DFT length must be even and >= 2");
        pow2_ = (n_ & (n_ - 1)) == 0;
        if (pow2_) {
            const std::size_t h = n_ / 2;
            twiddle_.resize(h / 2);
            for (std::size_t k = 0; k < h / 2; ++k) {
                const double a = -2.0 * pi * static_cast<double>(k) / static_cast<double>(h);
                twiddle_[k] = {std::cos(a), std::sin(a)};
            }
            post_.resize(h + 1);
            for (std::size_t k = 0; k <= h; ++k) {
                const double a = -2.0 * pi * static_cast<double>(k) / static_cast<double>(n_);
                post_[k] = {std::cos(a), std::sin(a)};
            }
            work_.resize(h);
        }
    }

    std::size_t length() const { return n_; }

    /// out must hold L/2 + 1 bins.
    void forward(const double* in, std::complex<double>* out) {
        if (!pow2_) {
            direct(in, out);
            return;
        }
        const std::size_t h = n_ / 2;
        // Pack even samples into the real part, odd into the imaginary part.
        for (std::size_t i = 0; i < h; ++i)
            work_[i] = {in[2 * i], in[2 * i + 1]};
        fft_in_place(work_.data(), h);
        // Untangle the two interleaved half-length spectra.
        // Z(k) = E(k) + j O(k) with E, O conjugate-symmetric.
        out[0] = {work_[0].real() + work_[0].imag(), 0.0};
        out[h] = {work_[0].real() - work_[0].imag(), 0.0};
        for (std::size_t k = 1; k <= h / 2; ++k) {
            const std::complex<double> zk = work_[k];
            const std::complex<double> zc = std::conj(work_[h - k]);
            const std::complex<double> even = 0.5 * (zk + zc);
            const std::complex<double> odd = std::complex<double>(0.0, -0.5) * (zk - zc);
            out[k] = even + post_[k] * odd;
            if (k != h - k)
                out[h - k] = std::conj(even) + post_[h - k] * std::conj(odd);
        }
    }

private:
    void direct(const double* in, std::complex<double>* out) const {
        for (std::size_t k = 0; k <= n_ / 2; ++k) {
            double re = 0.0, im = 0.0;
            for (std::size_t l = 0; l < n_; ++l) {
                const double a = -2.0 * pi * static_cast<double>(k) * static_cast<double>(l) /
                                 static_cast<double>(n_);
                re += in[l] * std::cos(a);
                im += in[l] * std::sin(a);
            }
            out[k] = {re, im};
        }
    }

    void fft_in_place(std::complex<double>* x, std::size_t n) const {
        // Bit-reversal permutation.
        for (std::size_t i = 1, j = 0; i < n; ++i) {
            std::size_t bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j |= bit;
            if (i < j) std::swap(x[i], x[j]);
        }
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const std::size_t stride = n / len;
            for (std::size_t i = 0; i < n; i += len) {
                for (std::size_t k = 0; k < len / 2; ++k) {
                    const std::complex<double> w =
                        (len == 2) ? std::complex<double>(1.0, 0.0) : twiddle_[k * stride];
                    const std::complex<double> u = x[i + k];
                    const std::complex<double> v = x[i + k + len / 2] * w;
                    x[i + k] = u + v;
                    x[i + k + len / 2] = u - v;
                }
            }
        }
    }

    std::size_t n_;
    bool pow2_ = false;
    std::vector<std::complex<double>> twiddle_;
    std::vector<std::complex<double>> post_;
    std::vector<std::complex<double>> work_;
};

} // namespace dudoa
