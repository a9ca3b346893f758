#pragma once

// Umbrella header: small dense complex linear algebra, measurement schedules,
// real path ensembles, the three signalling witnesses, and the grid scanner.

#include "pathsig/common.hpp"
#include "pathsig/ensemble.hpp"
#include "pathsig/linalg.hpp"
#include "pathsig/pathspace.hpp"
#include "pathsig/scan.hpp"
#include "pathsig/witness.hpp"
