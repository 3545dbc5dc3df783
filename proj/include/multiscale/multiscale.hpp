#pragma once

#include "multiscale/cwt.hpp"
#include "multiscale/daubechies.hpp"
#include "multiscale/error.hpp"
#include "multiscale/filter.hpp"
#include "multiscale/fractal.hpp"
#include "multiscale/generators.hpp"
#include "multiscale/io.hpp"
#include "multiscale/phase.hpp"
#include "multiscale/spectral.hpp"
#include "multiscale/time_series.hpp"
