// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dudoa/common.hpp"
#include "dudoa/stft.hpp"

namespace dudoa {

/// Per-bin M x M Hermitian cross-power matrices for one estimation block.
struct CpsdStack {
    std::size_t frame_index = 0; // newest frame in the average
    std::size_t n_mics = 0;
    std::vector<std::complex<double>> matrices; // n_bins x M x M, bin-major row-major
    std::vector<std::size_t> bin_indices;

    std::size_t n_bins() const { return bin_indices.size(); }

    std::span<const std::complex<double>> matrix(std::size_t bin) const {
        return {matrices.data() + bin * n_mics * n_mics, n_mics * n_mics};
    }
    std::span<std::complex<double>> matrix(std::size_t bin) {
        return {matrices.data() + bin * n_mics * n_mics, n_mics * n_mics};
    }

    double trace(std::size_t bin) const {
        const auto m = matrix(bin);
        double t = 0.0;
        for (std::size_t i = 0; i < n_mics; ++i)
            t += m[i * n_mics + i].real();
        return t;
    }
};

/// Average of outer products x x^H over exactly N consecutive frames.
/// The upper triangle is accumulated and mirrored, so every matrix is
/// Hermitian by construction with a real nonnegative diagonal.
inline CpsdStack estimate_cpsd(std::span<const SpectralFrame> frames) {
    if (frames.empty())
        throw state_error("CPSD estimation needs at least one frame");
    const std::size_t n = frames.size();
    const std::size_t mics = frames.front().n_channels;
    const std::size_t bins = frames.front().n_bins();
    for (std::size_t i = 0; i < n; ++i) {
        if (frames[i].n_channels != mics || frames[i].n_bins() != bins)
            throw config_error("CPSD frames have mismatched shapes");
        if (i > 0 && frames[i].frame_index != frames[i - 1].frame_index + 1)
            throw state_error("CPSD frames must have consecutive indices");
    }

    CpsdStack stack;
    stack.frame_index = frames.back().frame_index;
    stack.n_mics = mics;
    stack.bin_indices = frames.front().bin_indices;
    stack.matrices.assign(bins * mics * mics, {0.0, 0.0});

    // Accumulate per bin on planar real/imaginary buffers. Gathering each
    // frame's channel column into contiguous scratch first matters: the frame
    // layout strides by n_bins, so indexing it inside the pair loop would pay
    // a cache line per element.
    std::vector<double> acc_re(mics * mics), acc_im(mics * mics);
    std::vector<double> col_re(mics), col_im(mics);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t b = 0; b < bins; ++b) {
        std::fill(acc_re.begin(), acc_re.end(), 0.0);
        std::fill(acc_im.begin(), acc_im.end(), 0.0);
        double* __restrict xr = col_re.data();
        double* __restrict xi = col_im.data();
        for (const SpectralFrame& frame : frames) {
            for (std::size_t i = 0; i < mics; ++i) {
                const std::complex<double> v = frame.at(i, b);
                xr[i] = v.real();
                xi[i] = v.imag();
            }
            for (std::size_t i = 0; i < mics; ++i) {
                const double xri = xr[i];
                const double xii = xi[i];
                double* __restrict row_re = acc_re.data() + i * mics;
                double* __restrict row_im = acc_im.data() + i * mics;
                // x_i conj(x_j), accumulated over the upper triangle only.
                for (std::size_t j = i; j < mics; ++j) {
                    row_re[j] += xri * xr[j] + xii * xi[j];
                    row_im[j] += xii * xr[j] - xri * xi[j];
                }
            }
        }
        auto mat = stack.matrix(b);
        for (std::size_t i = 0; i < mics; ++i) {
            mat[i * mics + i] = {acc_re[i * mics + i] * inv_n, 0.0};
            for (std::size_t j = i + 1; j < mics; ++j) {
                const std::complex<double> v{acc_re[i * mics + j] * inv_n,
                                             acc_im[i * mics + j] * inv_n};
                mat[i * mics + j] = v;
                mat[j * mics + i] = std::conj(v);
            }
        }
    }
    return stack;
}

} // namespace dudoa
