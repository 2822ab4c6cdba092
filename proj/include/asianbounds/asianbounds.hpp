#pragma once

#include "asianbounds/curves.hpp"
#include "asianbounds/grids.hpp"
#include "asianbounds/numerics.hpp"
#include "asianbounds/rng.hpp"
#include "asianbounds/gaussian_bounds.hpp"
#include "asianbounds/volume.hpp"
#include "asianbounds/mc_oracle.hpp"
#include "asianbounds/vwap.hpp"
#include "asianbounds/cli.hpp"
