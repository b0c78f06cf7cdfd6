#pragma once

#include "sica/adjoint.hpp"
#include "sica/control.hpp"
#include "sica/cost.hpp"
#include "sica/diagnostics.hpp"
#include "sica/errors.hpp"
#include "sica/fbsm.hpp"
#include "sica/grid.hpp"
#include "sica/interval.hpp"
#include "sica/io.hpp"
#include "sica/model.hpp"
#include "sica/sde.hpp"
#include "sica/stats.hpp"
