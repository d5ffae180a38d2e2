#pragma once

#include "bench.hpp"
#include "bezier.hpp"
#include "config.hpp"
#include "counters.hpp"
#include "evolve.hpp"
#include "forces.hpp"
#include "freeform.hpp"
#include "freespace.hpp"
#include "geometry.hpp"
#include "image.hpp"
#include "io.hpp"
#include "raster.hpp"
#include "refine.hpp"
#include "synth.hpp"
#include "topology.hpp"
