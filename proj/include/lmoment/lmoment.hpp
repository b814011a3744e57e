#pragma once

#include "lmoment/characters.hpp"
#include "lmoment/error.hpp"
#include "lmoment/exponential_sums.hpp"
#include "lmoment/gamma.hpp"
#include "lmoment/hecke.hpp"
#include "lmoment/lvalues.hpp"
#include "lmoment/moment.hpp"
#include "lmoment/numeric.hpp"
#include "lmoment/parallel.hpp"
#include "lmoment/primes.hpp"
#include "lmoment/quadrature.hpp"
#include "lmoment/voronoi.hpp"
#include "lmoment/weight_table.hpp"
#include "lmoment/weights.hpp"
