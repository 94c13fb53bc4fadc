#pragma once

// Thermodynamics of the long-range-hopping Bose-Hubbard model from the
// single-site variational pressure formula, with a finite-size
// exact-diagonalization cross-check.

#include "bhmf/fock.hpp"
#include "bhmf/gibbs.hpp"
#include "bhmf/legendre.hpp"
#include "bhmf/matrix.hpp"
#include "bhmf/model.hpp"
#include "bhmf/optimize.hpp"
#include "bhmf/oracle.hpp"
#include "bhmf/phase.hpp"
#include "bhmf/spectrum.hpp"
#include "bhmf/sweep.hpp"
#include "bhmf/varsolve.hpp"
