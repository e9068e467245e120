#pragma once

#include "invlat/chain.hpp"
#include "invlat/charpoly.hpp"
#include "invlat/config.hpp"
#include "invlat/ensemble.hpp"
#include "invlat/error.hpp"
#include "invlat/fit.hpp"
#include "invlat/gauge.hpp"
#include "invlat/helmholtz.hpp"
#include "invlat/inverse.hpp"
#include "invlat/io.hpp"
#include "invlat/models.hpp"
#include "invlat/orbit.hpp"
#include "invlat/pipeline.hpp"
#include "invlat/raster.hpp"
#include "invlat/rng.hpp"
#include "invlat/tridiagonal.hpp"
#include "invlat/waveguide.hpp"
