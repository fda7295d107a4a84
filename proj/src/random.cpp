#include "qichan/random.hpp"

#include <cmath>

namespace qichan {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

ComplexMatrix random_ginibre(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = cplx(re, im) / std::sqrt(2.0);
    }
  return m;
}

ComplexMatrix random_isometry(Index rows, Index cols, Rng& rng) {
  if (cols > rows) throw DimensionError("isometry needs cols <= rows");
  const ComplexMatrix g = random_ginibre(rows, cols, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(rows, cols);
  const ComplexMatrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index j = 0; j < cols; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    if (a > 0) q.col(j) *= d / a;
  }
  return q;
}

ComplexMatrix random_unitary(Index d, Rng& rng) { return random_isometry(d, d, rng); }

ComplexVector random_unit_vector(Index d, Rng& rng) {
  ComplexVector v = random_ginibre(d, 1, rng).col(0);
  return v / v.norm();
}

ComplexMatrix random_density(Index d, Rng& rng, Index rank) {
  if (rank <= 0) rank = d;
  const ComplexMatrix g = random_ginibre(d, rank, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

}  // namespace qichan
