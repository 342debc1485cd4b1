#pragma once

// Umbrella header: the whole separation library.

#include "sphsep/convolve.hpp"
#include "sphsep/harmonics.hpp"
#include "sphsep/ingest.hpp"
#include "sphsep/io.hpp"
#include "sphsep/kernels.hpp"
#include "sphsep/legendre.hpp"
#include "sphsep/linalg.hpp"
#include "sphsep/multiscale.hpp"
#include "sphsep/pipeline.hpp"
#include "sphsep/quadrature.hpp"
#include "sphsep/synthetic.hpp"
