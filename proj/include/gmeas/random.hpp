#pragma once

#include <random>
#include <vector>

#include "gmeas/operator.hpp"
#include "gmeas/tester.hpp"

namespace gmeas {

/// All generators draw from an explicitly seeded engine; a given seed and
/// parameter set always produces the same instance.
using Rng = std::mt19937_64;

/// d x n matrix of independent standard complex Gaussians.
Matrix ginibre(Index rows, Index cols, Rng& rng);
/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
Matrix random_unitary(Index d, Rng& rng);
/// Normalized Wishart state W W^dagger / Tr with W of size d x rank (rank 0: full).
HermitianOperator random_state(Index d, Rng& rng, Index rank = 0);
/// Random PSD operator of the given rank with unit spectral norm scale.
HermitianOperator random_psd(Index d, Index rank, Rng& rng);
/// Channel from a Haar isometry C^{d_in} -> C^{d_out} (x) C^{kraus_rank}.
Channel random_channel(Index d_in, Index d_out, Index kraus_rank, Rng& rng);

/// Haar-rotated PVM: the basis is split into n nonempty blocks (n <= d).
std::vector<HermitianOperator> random_pvm(Index d, Index n, Rng& rng);
/// POVM S^{-1/2} G_u S^{-1/2} with G_u Wishart of rank ranks[u] (random ranks if
/// empty; raised as needed so that the ranks add up to at least d).
std::vector<HermitianOperator> random_povm(Index d, Index n, Rng& rng, std::vector<Index> ranks = {});

/// pvm: projective; generic: Wishart ranks drawn uniformly; low_rank: rank one
/// elements, ranks summing to one more than the dimension when possible.
enum class PovmKind { pvm, generic, low_rank };

/// M_u = chi_{I (x) sigma}(Lambda_u) for a random POVM Lambda on out (x) s(sigma)H.
Tester random_tester(Index d_in, Index d_out, Index n, const HermitianOperator& sigma, Rng& rng,
                     PovmKind kind = PovmKind::generic);

}  // namespace gmeas
