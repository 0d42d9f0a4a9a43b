#pragma once

#include "equistab/error.hpp"
#include "equistab/symmetry.hpp"
#include "equistab/problem.hpp"
#include "equistab/dynamics.hpp"
#include "equistab/loops.hpp"
#include "equistab/equivariance.hpp"
#include "equistab/action.hpp"
#include "equistab/optimizer.hpp"
#include "equistab/floquet.hpp"
#include "equistab/morse.hpp"
#include "equistab/io.hpp"
#include "equistab/report.hpp"
