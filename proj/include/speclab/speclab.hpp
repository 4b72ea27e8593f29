#pragma once

#include "speclab/ball_sampling.hpp"
#include "speclab/bounds_report.hpp"
#include "speclab/disk_steklov.hpp"
#include "speclab/error.hpp"
#include "speclab/geometry.hpp"
#include "speclab/newton.hpp"
#include "speclab/parallel.hpp"
#include "speclab/quadrature.hpp"
#include "speclab/radial_spectrum.hpp"
#include "speclab/trial_maps.hpp"
#include "speclab/tridiagonal.hpp"
