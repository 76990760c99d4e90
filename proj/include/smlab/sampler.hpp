#pragma once

#include "smlab/sampler/density.hpp"
#include "smlab/sampler/ensemble.hpp"
#include "smlab/sampler/estimators.hpp"
#include "smlab/sampler/philox.hpp"
#include "smlab/sampler/simulate.hpp"
