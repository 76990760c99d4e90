#pragma once

#include "smlab/fields/drift.hpp"
#include "smlab/fields/fokker_planck.hpp"
#include "smlab/fields/io.hpp"
#include "smlab/fields/oracle.hpp"
#include "smlab/fields/schrodinger.hpp"
#include "smlab/fields/stencil.hpp"
#include "smlab/fields/tridiagonal.hpp"
#include "smlab/fields/wave.hpp"
#include "smlab/grid.hpp"
#include "smlab/params.hpp"
