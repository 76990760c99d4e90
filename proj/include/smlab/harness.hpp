#pragma once

#include "smlab/harness/config.hpp"
#include "smlab/harness/experiment.hpp"
#include "smlab/harness/registry.hpp"
#include "smlab/harness/report.hpp"
