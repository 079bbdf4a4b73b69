#pragma once

#include "langevin/params.hpp"
#include "langevin/potentials.hpp"
#include "langevin/random.hpp"
#include "langevin/integrator.hpp"
#include "langevin/covariance.hpp"
#include "langevin/stability.hpp"
#include "langevin/ensemble.hpp"
#include "langevin/csv.hpp"
