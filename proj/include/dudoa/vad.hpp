// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>

#include "dudoa/cpsd.hpp"

namespace dudoa {

/// Per-block activity decision from the summed CPSD traces.
struct VadDecision {
    std::size_t frame_index = 0;
    bool active = false;
    double band_power = 0.0; // sum of in-band traces
};

/// Active iff the total in-band power exceeds the threshold strictly.
/// band_power is the sum over bins of tr[Phi(k, f)], i.e. the array's total
/// in-band power for the block.
inline VadDecision vad_detect(const CpsdStack& cpsd, double threshold) {
    VadDecision d;
    d.frame_index = cpsd.frame_index;
    for (std::size_t b = 0; b < cpsd.n_bins(); ++b)
        d.band_power += cpsd.trace(b);
    d.active = d.band_power > threshold;
    return d;
}

} // namespace dudoa
