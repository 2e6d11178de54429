#pragma once

// Umbrella header: numerical calculus on stratified (Carnot) groups in
// exponential coordinates of the first kind.

#include "carnot/algebra.hpp"
#include "carnot/calculus.hpp"
#include "carnot/catalog.hpp"
#include "carnot/errors.hpp"
#include "carnot/graph.hpp"
#include "carnot/group.hpp"
#include "carnot/linalg.hpp"
#include "carnot/measure.hpp"
#include "carnot/polynomial.hpp"
#include "carnot/rational.hpp"
#include "carnot/report.hpp"
#include "carnot/scenario.hpp"
#include "carnot/splitting.hpp"
