#pragma once

// Umbrella header: segmentation of co-evolving multivariate time series into
// behavior regimes via a self-expressive autoencoder with a temporal
// smoothness penalty, plus transition detection and evaluation tooling.

#include "conceptseg/common.hpp"
#include "conceptseg/detect.hpp"
#include "conceptseg/loss.hpp"
#include "conceptseg/metrics.hpp"
#include "conceptseg/mlp.hpp"
#include "conceptseg/pipeline.hpp"
#include "conceptseg/selfexpr.hpp"
#include "conceptseg/series.hpp"
#include "conceptseg/synth.hpp"
#include "conceptseg/train.hpp"
#include "conceptseg/version.hpp"
#include "conceptseg/window.hpp"
