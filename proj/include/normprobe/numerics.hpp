#pragma once

#include "normprobe/numerics/bootstrap.hpp"
#include "normprobe/numerics/ftest.hpp"
#include "normprobe/numerics/logistic.hpp"
#include "normprobe/numerics/stats.hpp"
#include "normprobe/numerics/svd.hpp"
