#pragma once

#include "srm/errors.hpp"
#include "srm/so_n.hpp"
#include "srm/metrics.hpp"
#include "srm/flows.hpp"
#include "srm/manakov.hpp"
#include "srm/poisson.hpp"
#include "srm/limits.hpp"
#include "srm/elliptic.hpp"
#include "srm/rolling.hpp"
#include "srm/io.hpp"
