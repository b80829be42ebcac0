#pragma once

#include "accelode/analysis.hpp"
#include "accelode/dynamics.hpp"
#include "accelode/geometry.hpp"
#include "accelode/integrators.hpp"
#include "accelode/io.hpp"
#include "accelode/objective.hpp"
#include "accelode/schemes.hpp"
#include "accelode/types.hpp"
