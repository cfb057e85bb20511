#pragma once

// Umbrella header.

#include "ovb/billiard.hpp"
#include "ovb/errors.hpp"
#include "ovb/geometry.hpp"
#include "ovb/io.hpp"
#include "ovb/numerics.hpp"
#include "ovb/orbits.hpp"
#include "ovb/oval.hpp"
#include "ovb/perturb.hpp"
#include "ovb/vec3.hpp"
#include "ovb/verify.hpp"
