#pragma once

// Umbrella header for the learnability-lab library.
//
// The toolkit measures how easily each training sample is learned: a small
// MLP trainer logs the probability of every sample's true label after each
// epoch across several seeded runs, and the metrics layer turns those logs
// into per-sample learnability scores, ranks, cross-model correlations, and
// 2D histogram exports.

#include "lblab/csv.hpp"
#include "lblab/dataset.hpp"
#include "lblab/errors.hpp"
#include "lblab/experiment.hpp"
#include "lblab/history.hpp"
#include "lblab/history_io.hpp"
#include "lblab/io_util.hpp"
#include "lblab/manifest.hpp"
#include "lblab/matrix.hpp"
#include "lblab/metrics.hpp"
#include "lblab/model.hpp"
#include "lblab/optimizer.hpp"
#include "lblab/rng.hpp"
#include "lblab/scores_io.hpp"
#include "lblab/synth.hpp"
#include "lblab/trainer.hpp"

namespace lblab {
inline constexpr const char* kVersion = "0.1.0";
}
