#pragma once

#include "automorphic/errors.hpp"
#include "automorphic/quadrature.hpp"
#include "automorphic/parallel.hpp"
#include "automorphic/specfun.hpp"
#include "automorphic/lattice.hpp"
#include "automorphic/epstein.hpp"
#include "automorphic/eisenstein.hpp"
#include "automorphic/hamiltonian.hpp"
#include "automorphic/spectral.hpp"
