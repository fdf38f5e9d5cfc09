#pragma once

#include "orbits/commands.hpp"
#include "orbits/config.hpp"
#include "orbits/dynamics.hpp"
#include "orbits/errors.hpp"
#include "orbits/format.hpp"
#include "orbits/polyroots.hpp"
#include "orbits/potentials.hpp"
#include "orbits/quadrature.hpp"
#include "orbits/svg.hpp"
#include "orbits/turning.hpp"
#include "orbits/units.hpp"
