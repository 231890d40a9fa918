#include "gmeas/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmeas/errors.hpp"

namespace gmeas {

Matrix ginibre(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(normal(rng), normal(rng));
  return m;
}

Matrix random_unitary(Index d, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(ginibre(d, d, rng));
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    const Complex diag = r(j, j);
    if (std::abs(diag) > 0.0) q.col(j) *= diag / std::abs(diag);
  }
  return q;
}

HermitianOperator random_psd(Index d, Index rank, Rng& rng) {
  if (rank < 0 || rank > d) throw DimensionMismatch("random_psd: rank out of range");
  const Matrix w = ginibre(d, rank, rng);
  return HermitianOperator::hermitian_part(w * w.adjoint());
}

HermitianOperator random_state(Index d, Rng& rng, Index rank) {
  const HermitianOperator x = random_psd(d, rank == 0 ? d : rank, rng);
  return x / x.trace();
}

Channel random_channel(Index d_in, Index d_out, Index kraus_rank, Rng& rng) {
  if (kraus_rank < 1) throw DimensionMismatch("random_channel: Kraus rank must be positive");
  const Index big = d_out * kraus_rank;
  if (big < d_in) throw DimensionMismatch("random_channel: isometry needs d_out * kraus_rank >= d_in");
  Eigen::HouseholderQR<Matrix> qr(ginibre(big, d_in, rng));
  const Matrix v = qr.householderQ() * Matrix::Identity(big, d_in);
  std::vector<Matrix> kraus;
  for (Index k = 0; k < kraus_rank; ++k) {
    Matrix op(d_out, d_in);
    for (Index o = 0; o < d_out; ++o) op.row(o) = v.row(o * kraus_rank + k);
    kraus.push_back(std::move(op));
  }
  return Channel::from_kraus(std::move(kraus));
}

std::vector<HermitianOperator> random_pvm(Index d, Index n, Rng& rng) {
  if (n < 1 || n > d) throw DimensionMismatch("random_pvm: need 1 <= n <= d");
  // Random composition of d into n positive parts.
  std::vector<Index> cuts(static_cast<std::size_t>(d - 1));
  std::iota(cuts.begin(), cuts.end(), 1);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(static_cast<std::size_t>(n - 1));
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(d);
  const Matrix u = random_unitary(d, rng);
  std::vector<HermitianOperator> out;
  Index start = 0;
  for (const Index stop : cuts) {
    const Matrix block = u.middleCols(start, stop - start);
    out.push_back(HermitianOperator::hermitian_part(block * block.adjoint()));
    start = stop;
  }
  return out;
}

std::vector<HermitianOperator> random_povm(Index d, Index n, Rng& rng, std::vector<Index> ranks) {
  if (n < 1) throw DimensionMismatch("random_povm: need at least one outcome");
  if (ranks.empty()) {
    std::uniform_int_distribution<Index> pick(1, d);
    for (Index u = 0; u < n; ++u) ranks.push_back(pick(rng));
  }
  if (static_cast<Index>(ranks.size()) != n) throw DimensionMismatch("random_povm: one rank per outcome");
  if (std::accumulate(ranks.begin(), ranks.end(), Index{0}) < d) {
    // Raise ranks so the elements can span the space.
    for (Index k = 0; std::accumulate(ranks.begin(), ranks.end(), Index{0}) < d; ++k) {
      auto& r = ranks[static_cast<std::size_t>(k % n)];
      r = std::min(d, r + 1);
    }
  }
  std::vector<HermitianOperator> g;
  HermitianOperator sum = HermitianOperator::zero(d);
  for (const Index r : ranks) {
    g.push_back(random_psd(d, r, rng));
    sum += g.back();
  }
  const HermitianOperator w = pinv_sqrt(sum);
  std::vector<HermitianOperator> out;
  for (const auto& x : g) out.push_back(congruence(w.matrix(), x));
  return out;
}

Tester random_tester(Index d_in, Index d_out, Index n, const HermitianOperator& sigma, Rng& rng, PovmKind kind) {
  if (sigma.dim() != d_in) throw DimensionMismatch("random_tester: sigma has the wrong size");
  const Projection q = support(sigma);
  const Index r = q.rank();
  const Index d = d_out * r;
  std::vector<HermitianOperator> lambda;
  switch (kind) {
    case PovmKind::pvm:
      lambda = random_pvm(d, std::min(n, d), rng);
      while (static_cast<Index>(lambda.size()) < n) lambda.push_back(HermitianOperator::zero(d));
      break;
    case PovmKind::generic:
      lambda = random_povm(d, n, rng);
      break;
    case PovmKind::low_rank: {
      std::vector<Index> ranks(static_cast<std::size_t>(n), 1);
      for (Index k = n; k < d + 1; ++k) ranks[static_cast<std::size_t>(k % n)] += 1;
      lambda = random_povm(d, n, rng, ranks);
      break;
    }
  }
  const HermitianOperator sigma_r = congruence(q.range().adjoint(), sigma);
  const Matrix root = kron(Matrix::Identity(d_out, d_out), sqrt_psd(sigma_r).matrix());
  const Matrix corner = kron(Matrix::Identity(d_out, d_out), q.range());
  std::vector<HermitianOperator> elements;
  for (const auto& l : lambda) elements.push_back(congruence(corner, congruence(root, l)));
  return make_tester(d_in, d_out, std::move(elements));
}

}  // namespace gmeas
