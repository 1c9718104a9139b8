#pragma once

#include <random>

#include "schuriter/systems.hpp"

namespace schuriter {

using Rng = std::mt19937_64;

// Entries with independent standard complex normal distribution.
CMatrix ginibre(Index rows, Index cols, Rng& rng);

// QR of a Ginibre matrix with the phases of R moved into Q.
CMatrix haar_unitary(Index n, Rng& rng);

/// rows x cols corner of a Haar unitary whose size is chosen so that a
/// random number of singular values equal 1.
CMatrix random_contraction(Index rows, Index cols, Rng& rng);

/// Corner of a Haar unitary of size dim + defect_rank, redrawn until it is
/// completely non-unitary.  ker D_A has dimension dim - defect_rank.
CMatrix random_cnu_contraction(Index dim, Index defect_rank, Rng& rng,
                               const Tolerance& tol = {});

/// Haar unitary split into a system with io_dim inputs and outputs, redrawn
/// until the system is simple.
DiscreteSystem random_conservative_system(Index io_dim, Index state_dim,
                                          Rng& rng, const Tolerance& tol = {});

}  // namespace schuriter
