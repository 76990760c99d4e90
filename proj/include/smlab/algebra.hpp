#pragma once

#include "smlab/algebra/dynamics.hpp"
#include "smlab/algebra/operators.hpp"
#include "smlab/algebra/report.hpp"
#include "smlab/algebra/space.hpp"
