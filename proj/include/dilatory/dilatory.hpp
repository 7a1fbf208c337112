#pragma once

#include "dilatory/numerics.hpp"
#include "dilatory/algebra.hpp"
#include "dilatory/cpmap.hpp"
#include "dilatory/dilation.hpp"
#include "dilatory/geometry.hpp"
#include "dilatory/laws.hpp"
#include "dilatory/random.hpp"
#include "dilatory/suite.hpp"
#include "dilatory/io.hpp"
