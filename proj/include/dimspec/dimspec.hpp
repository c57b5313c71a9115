// Umbrella header: dimension spectra for carpets, self-similar sets,
// Mandelbrot percolation, Moran constructions, and integer-set densities.
#pragma once

#include "carpet.hpp"
#include "errors.hpp"
#include "figures.hpp"
#include "moran.hpp"
#include "numeric.hpp"
#include "percolation.hpp"
#include "selfsimilar.hpp"
#include "serialize.hpp"
#include "spectrum.hpp"
#include "tail_density.hpp"
#include "truncated_limit.hpp"
