// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

// Umbrella header: the whole du-doa library.

#include "dudoa/array.hpp"
#include "dudoa/common.hpp"
#include "dudoa/config.hpp"
#include "dudoa/cpsd.hpp"
#include "dudoa/csv.hpp"
#include "dudoa/evaluate.hpp"
#include "dudoa/fft.hpp"
#include "dudoa/kalman.hpp"
#include "dudoa/localizer.hpp"
#include "dudoa/pipeline.hpp"
#include "dudoa/plot.hpp"
#include "dudoa/presets.hpp"
#include "dudoa/scene.hpp"
#include "dudoa/stft.hpp"
#include "dudoa/vad.hpp"
#include "dudoa/wav.hpp"
