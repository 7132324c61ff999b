#pragma once

#include "tsbow/errors.hpp"
#include "tsbow/rng.hpp"
#include "tsbow/signal.hpp"
#include "tsbow/wavelet.hpp"
#include "tsbow/metrics.hpp"
#include "tsbow/bow.hpp"
#include "tsbow/baselines.hpp"
#include "tsbow/dataio.hpp"
#include "tsbow/eval.hpp"
