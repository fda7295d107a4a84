#pragma once

// Seeded random matrices.  Everything here is a deterministic function of the
// generator state, so results reproduce for a fixed seed.

#include <cstdint>
#include <random>

#include "qichan/linalg.hpp"

namespace qichan {

using Rng = std::mt19937_64;

/// Generator for restart `stream` of a run seeded with `seed`.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

ComplexMatrix random_ginibre(Index rows, Index cols, Rng& rng);
/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix).
ComplexMatrix random_unitary(Index d, Rng& rng);
/// rows×cols isometry, cols <= rows.
ComplexMatrix random_isometry(Index rows, Index cols, Rng& rng);
ComplexVector random_unit_vector(Index d, Rng& rng);
/// Density matrix of the given rank (induced measure).
ComplexMatrix random_density(Index d, Rng& rng, Index rank = -1);

}  // namespace qichan
