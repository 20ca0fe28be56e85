#pragma once

#include "holosim/analytic.hpp"
#include "holosim/holonomy.hpp"
#include "holosim/mc.hpp"
#include "holosim/ou.hpp"
#include "holosim/qubit.hpp"
