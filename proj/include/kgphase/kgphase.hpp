#pragma once

#include "kgphase/errors.hpp"
#include "kgphase/core_state.hpp"
#include "kgphase/spectral.hpp"
#include "kgphase/dynamics.hpp"
#include "kgphase/integrator.hpp"
#include "kgphase/phase_geometry.hpp"
#include "kgphase/io/config.hpp"
#include "kgphase/io/csv.hpp"
#include "kgphase/io/manifest.hpp"
#include "kgphase/io/svg_plot.hpp"
#include "kgphase/io/commands.hpp"
