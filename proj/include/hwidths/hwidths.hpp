#pragma once

#include "hwidths/errors.hpp"
#include "hwidths/generators.hpp"
#include "hwidths/gramian.hpp"
#include "hwidths/hankel.hpp"
#include "hwidths/io.hpp"
#include "hwidths/linalg.hpp"
#include "hwidths/parallel.hpp"
#include "hwidths/parametric.hpp"
#include "hwidths/quadrature.hpp"
#include "hwidths/reduction.hpp"
#include "hwidths/system.hpp"
#include "hwidths/tolerances.hpp"
#include "hwidths/types.hpp"
#include "hwidths/verify.hpp"
#include "hwidths/widths.hpp"
