#pragma once

#include "hyperbell/analyzer.hpp"
#include "hyperbell/counting.hpp"
#include "hyperbell/functionals.hpp"
#include "hyperbell/io.hpp"
#include "hyperbell/linalg.hpp"
#include "hyperbell/optimize.hpp"
#include "hyperbell/reference.hpp"
#include "hyperbell/rng.hpp"
#include "hyperbell/states.hpp"
#include "hyperbell/steering.hpp"
#include "hyperbell/version.hpp"
