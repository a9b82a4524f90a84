#pragma once

// Umbrella header for the full library: data handling, decomposition,
// augmentation, model, training loop and benchmark reporting.

#include "ondat/adam.hpp"
#include "ondat/augment.hpp"
#include "ondat/bootstrap.hpp"
#include "ondat/checkpoint.hpp"
#include "ondat/csv.hpp"
#include "ondat/experiment.hpp"
#include "ondat/loess.hpp"
#include "ondat/log.hpp"
#include "ondat/matrix.hpp"
#include "ondat/metrics.hpp"
#include "ondat/nhits.hpp"
#include "ondat/report.hpp"
#include "ondat/rng.hpp"
#include "ondat/seasonal_naive.hpp"
#include "ondat/series.hpp"
#include "ondat/stl.hpp"
#include "ondat/synthetic.hpp"
#include "ondat/train.hpp"
