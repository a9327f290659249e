// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dudoa/array.hpp"
#include "dudoa/common.hpp"
#include "dudoa/cpsd.hpp"

namespace dudoa {

/// Broadband steered response power over the direction grid.
struct SrpMap {
    std::size_t frame_index = 0;
    std::vector<double> values; // aligned with DirectionGrid order
};

/// Raw per-block DOA: the grid argmax, tagged with the block's VAD flag.
struct DoaEstimate {
    std::size_t frame_index = 0;
    double time_s = 0.0;
    Direction direction;
    std::size_t direction_index = 0;
    bool vad = false;
};

/// Relative floor for the unloaded-beamformer denominator; keeps the map
/// finite at the noiseless rank-1 singularity without breaking scale
/// invariance.
inline double du_denominator_floor(double trace, std::size_t n_mics) {
    return 1e-12 * std::max(trace * static_cast<double>(n_mics), 1.0);
}

/// Narrowband diagonal-unloading response power:
/// 1 / max(eps, a^H (tr[Phi] I - Phi) a). The quadratic form is real for
/// Hermitian Phi; any imaginary residue is discarded.
inline double du_power(std::span<const std::complex<double>> cpsd_matrix,
                       std::size_t n_mics, const SteeringVector& steering) {
    double trace = 0.0;
    for (std::size_t i = 0; i < n_mics; ++i)
        trace += cpsd_matrix[i * n_mics + i].real();

    // a^H (tr I - Phi) a = tr * |a|^2 - a^H Phi a
    double quad_re = 0.0;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n_mics; ++i) {
        std::complex<double> row{0.0, 0.0};
        for (std::size_t j = 0; j < n_mics; ++j)
            row += cpsd_matrix[i * n_mics + j] * steering.entries[j];
        quad_re += (std::conj(steering.entries[i]) * row).real();
        norm2 += std::norm(steering.entries[i]);
    }
    const double denom = trace * norm2 - quad_re;
    return 1.0 / std::max(du_denominator_floor(trace, n_mics), denom);
}

namespace detail {

// Cache tile of the direction axis for the quadratic-form kernel.
inline constexpr std::size_t kSrpTile = 64;

// Best-effort read prefetch; correctness never depends on it. The table
// gathers touch dozens of short strided row segments per tile, a pattern
// hardware stream prefetchers do not pick up.
inline void prefetch_ro(const void* p) {
#if defined(__GNUC__) || defined(__clang__)
    __builtin_prefetch(p, 0, 2);
#else
    (void)p;
#endif
}

struct SrpScratch {
    std::vector<double> t_re, t_im; // unloaded matrix, M x (M + pad)
    std::vector<double> a_re, a_im; // widened steering tile, (M + pad) x tile
    std::vector<double> acc;        // per-direction denominators
};

/// Denominators a_d^H (tr I - Phi) a_d for every direction of one bin,
/// written to out[0..D). Returns the trace of Phi. If stream_ahead is given,
/// that byte range (typically another bin's table slice) is additionally
/// prefetched, paced across the whole call so the miss queue never swamps.
inline double srp_bin_denominators(std::span<const std::complex<double>> cpsd_matrix,
                                   std::size_t mics, const SteeringTable& table,
                                   std::size_t bin, SrpScratch& s, double* out,
                                   const void* stream_ahead = nullptr,
                                   std::size_t stream_bytes = 0) {
    const std::size_t dirs = table.dirs();
    double trace = 0.0;
    for (std::size_t i = 0; i < mics; ++i)
        trace += cpsd_matrix[i * mics + i].real();

    // Three zero rows of padding let the pair loop below run in groups of
    // four with no scalar remainder; the padded terms add exact zeros.
    const std::size_t mp = mics + 3;
    s.t_re.assign(mics * mp, 0.0);
    s.t_im.assign(mics * mp, 0.0);
    for (std::size_t i = 0; i < mics; ++i) {
        for (std::size_t j = 0; j < mics; ++j) {
            const std::complex<double> v = cpsd_matrix[i * mics + j];
            s.t_re[i * mp + j] = (i == j ? trace - v.real() : -v.real());
            s.t_im[i * mp + j] = (i == j ? 0.0 : -v.imag());
        }
    }

    s.a_re.assign(mp * kSrpTile, 0.0);
    s.a_im.assign(mp * kSrpTile, 0.0);
    s.acc.resize(kSrpTile);
    double* const __restrict b_re = s.a_re.data();
    double* const __restrict b_im = s.a_im.data();
    const double* const __restrict t_re = s.t_re.data();
    const double* const __restrict t_im = s.t_im.data();
    double* const __restrict acc = s.acc.data();

    // The bin's table slice is contiguous, one dirs-long row per mic.
    const float* const slice_re = table.row_re(bin, 0).data();
    const float* const slice_im = table.row_im(bin, 0).data();

    const char* const ahead_base = static_cast<const char*>(stream_ahead);
    const std::size_t n_tiles = (dirs + kSrpTile - 1) / kSrpTile;
    const std::size_t ahead_lines = stream_bytes / 64;
    const std::size_t ahead_per_tile =
        n_tiles ? (ahead_lines + n_tiles - 1) / n_tiles : 0;

    for (std::size_t d0 = 0; d0 < dirs; d0 += kSrpTile) {
        const std::size_t tile = std::min(kSrpTile, dirs - d0);
        for (std::size_t m = 0; m < mics; ++m) {
            const float* __restrict rr = slice_re + m * dirs + d0;
            const float* __restrict ri = slice_im + m * dirs + d0;
            double* __restrict ar = b_re + m * kSrpTile;
            double* __restrict ai = b_im + m * kSrpTile;
            for (std::size_t t = 0; t < tile; ++t)
                ar[t] = static_cast<double>(rr[t]);
            for (std::size_t t = 0; t < tile; ++t)
                ai[t] = static_cast<double>(ri[t]);
        }
        // The next tile needs 8 cache lines per mic (4 each for re and im).
        // Issuing them in one burst would overflow the miss queue and drop
        // most of them, so they are paced through the pair loop below: two
        // per group body, which is long enough to retire a line. The
        // stream-ahead range gets one further line per group.
        std::size_t pf = 0;
        std::size_t ahead = d0 / kSrpTile * ahead_per_tile;
        const std::size_t ahead_end = std::min(ahead_lines, ahead + ahead_per_tile);
        const auto pace = [&] {
            for (int k = 0; k < 2; ++k) {
                const std::size_t mic = pf >> 3;
                if (mic >= mics) break;
                const std::size_t r = pf & 7;
                const float* base = (r & 4) ? slice_im : slice_re;
                prefetch_ro(base + mic * dirs + d0 + kSrpTile + (r & 3) * 16);
                ++pf;
            }
            if (ahead < ahead_end) {
                prefetch_ro(ahead_base + ahead * 64);
                ++ahead;
            }
        };
        std::fill(acc, acc + tile, 0.0);
        // Diagonal terms: T_mm |a_m|^2 (T_mm real).
        for (std::size_t m = 0; m < mics; ++m) {
            const double tmm = t_re[m * mp + m];
            const double* __restrict ar = b_re + m * kSrpTile;
            const double* __restrict ai = b_im + m * kSrpTile;
            for (std::size_t t = 0; t < tile; ++t)
                acc[t] += tmm * (ar[t] * ar[t] + ai[t] * ai[t]);
        }
        // Off-diagonal pairs via Hermitian symmetry: 2 Re(conj(a_m) T_mn a_n).
        // The n loop runs four pairs at a time (the zero padding absorbs the
        // remainder), so the accumulator tile is loaded and stored once per
        // four pairs instead of once per pair; the per-direction accumulation
        // order is the plain ascending-n order either way.
        for (std::size_t m = 0; m < mics; ++m) {
            const double* __restrict ar_m = b_re + m * kSrpTile;
            const double* __restrict ai_m = b_im + m * kSrpTile;
            for (std::size_t n = m + 1; n < mics; n += 4) {
                pace();
                const double tr0 = 2.0 * t_re[m * mp + n];
                const double ti0 = 2.0 * t_im[m * mp + n];
                const double tr1 = 2.0 * t_re[m * mp + n + 1];
                const double ti1 = 2.0 * t_im[m * mp + n + 1];
                const double tr2 = 2.0 * t_re[m * mp + n + 2];
                const double ti2 = 2.0 * t_im[m * mp + n + 2];
                const double tr3 = 2.0 * t_re[m * mp + n + 3];
                const double ti3 = 2.0 * t_im[m * mp + n + 3];
                const double* __restrict ar0 = b_re + (n + 0) * kSrpTile;
                const double* __restrict ai0 = b_im + (n + 0) * kSrpTile;
                const double* __restrict ar1 = b_re + (n + 1) * kSrpTile;
                const double* __restrict ai1 = b_im + (n + 1) * kSrpTile;
                const double* __restrict ar2 = b_re + (n + 2) * kSrpTile;
                const double* __restrict ai2 = b_im + (n + 2) * kSrpTile;
                const double* __restrict ar3 = b_re + (n + 3) * kSrpTile;
                const double* __restrict ai3 = b_im + (n + 3) * kSrpTile;
                for (std::size_t t = 0; t < tile; ++t) {
                    const double mr = ar_m[t];
                    const double mi = ai_m[t];
                    double sum = acc[t];
                    sum += tr0 * (mr * ar0[t] + mi * ai0[t]) -
                           ti0 * (mr * ai0[t] - mi * ar0[t]);
                    sum += tr1 * (mr * ar1[t] + mi * ai1[t]) -
                           ti1 * (mr * ai1[t] - mi * ar1[t]);
                    sum += tr2 * (mr * ar2[t] + mi * ai2[t]) -
                           ti2 * (mr * ai2[t] - mi * ar2[t]);
                    sum += tr3 * (mr * ar3[t] + mi * ai3[t]) -
                           ti3 * (mr * ai3[t] - mi * ar3[t]);
                    acc[t] = sum;
                }
            }
        }
        for (std::size_t t = 0; t < tile; ++t)
            out[d0 + t] = acc[t];
    }
    return trace;
}

} // namespace detail

/// Reusable buffers for broadband_srp_batch. Callers that process many
/// batches pass the same instance each time to avoid refaulting the large
/// per-bin response buffer on every call.
struct SrpBatchScratch {
    std::vector<double> rows;    // per (stack, bin) response over directions
    std::vector<double> bin_max;
    std::vector<char> bin_active;
};

/// Broadband SRP for a batch of CPSD stacks sharing one grid and table: per
/// bin, evaluate the DU power over all directions, divide by the bin's
/// maximum (uniform norm) and accumulate. Bins with an all-zero CPSD
/// contribute nothing. Each map equals what broadband_srp would produce for
/// its stack alone; batching only changes the evaluation order, which walks
/// bins in the outer loop so one steering-table slice serves the whole batch
/// while it is cache-resident. The per-bin work is split across workers; the
/// final accumulation runs in fixed bin order, so the result is identical
/// for every worker count.
inline std::vector<SrpMap> broadband_srp_batch(std::span<const CpsdStack> stacks,
                                               const DirectionGrid& grid,
                                               const SteeringTable& table,
                                               unsigned workers = 1,
                                               SrpBatchScratch* reuse = nullptr) {
    std::vector<SrpMap> maps(stacks.size());
    if (stacks.empty()) return maps;
    const std::size_t bins = stacks.front().n_bins();
    const std::size_t dirs = grid.size();
    const std::size_t mics = stacks.front().n_mics;
    for (const CpsdStack& stack : stacks)
        if (stack.n_bins() != bins || stack.n_mics != mics)
            throw config_error("batched CPSD stacks have mismatched shapes");
    if (table.bins() != bins || table.dirs() != dirs || table.mics() != mics)
        throw config_error("steering table does not match CPSD stack and grid");

    const std::size_t nk = stacks.size();
    SrpBatchScratch local;
    SrpBatchScratch& s = reuse ? *reuse : local;
    s.rows.resize(nk * bins * dirs); // fully overwritten below where read
    s.bin_max.assign(nk * bins, 0.0);
    s.bin_active.assign(nk * bins, 0);

    const unsigned nw = SteeringTable::resolve_workers(workers, bins);
    auto work = [&](std::size_t b0, std::size_t b1) {
        detail::SrpScratch scratch;
        const std::size_t plane_bytes = mics * dirs * sizeof(float);
        for (std::size_t b = b0; b < b1; ++b) {
            for (std::size_t k = 0; k < nk; ++k) {
                // While the later stacks of this bin run from cache, stream
                // the next bin's table slice in behind them.
                const void* ahead = nullptr;
                if (b + 1 < b1 && (k == 1 || k == 2))
                    ahead = k == 1 ? table.row_re(b + 1, 0).data()
                                   : table.row_im(b + 1, 0).data();
                double* row = s.rows.data() + (k * bins + b) * dirs;
                const double trace = detail::srp_bin_denominators(
                    stacks[k].matrix(b), mics, table, b, scratch, row,
                    ahead, ahead ? plane_bytes : 0);
                if (!(trace > 0.0))
                    continue; // silent bin, skip
                const double floor = du_denominator_floor(trace, mics);
                double mx = 0.0;
                for (std::size_t d = 0; d < dirs; ++d) {
                    row[d] = 1.0 / std::max(floor, row[d]);
                    mx = std::max(mx, row[d]);
                }
                s.bin_max[k * bins + b] = mx;
                s.bin_active[k * bins + b] = 1;
            }
        }
    };
    SteeringTable::run_partitioned(bins, nw, work);

    for (std::size_t k = 0; k < nk; ++k) {
        SrpMap& map = maps[k];
        map.frame_index = stacks[k].frame_index;
        map.values.assign(dirs, 0.0);
        for (std::size_t b = 0; b < bins; ++b) {
            if (!s.bin_active[k * bins + b]) continue;
            const double inv = 1.0 / s.bin_max[k * bins + b];
            const double* row = s.rows.data() + (k * bins + b) * dirs;
            for (std::size_t d = 0; d < dirs; ++d)
                map.values[d] += row[d] * inv;
        }
    }
    return maps;
}

/// Broadband SRP of a single CPSD stack.
inline SrpMap broadband_srp(const CpsdStack& cpsd, const DirectionGrid& grid,
                            const SteeringTable& table, unsigned workers = 1) {
    auto maps = broadband_srp_batch(std::span<const CpsdStack>(&cpsd, 1), grid,
                                    table, workers);
    return std::move(maps.front());
}

/// Grid direction of the map maximum; ties break to the lowest grid index.
inline DoaEstimate argmax_doa(const SrpMap& map, const DirectionGrid& grid) {
    if (map.values.empty() || map.values.size() != grid.size())
        throw config_error("SRP map and grid sizes disagree");
    std::size_t best = 0;
    for (std::size_t d = 1; d < map.values.size(); ++d)
        if (map.values[d] > map.values[best]) best = d;
    DoaEstimate est;
    est.frame_index = map.frame_index;
    est.direction = grid[best];
    est.direction_index = best;
    return est;
}

} // namespace dudoa
