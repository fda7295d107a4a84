#include "qichan/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qichan {

namespace {

std::vector<Index> digits_of(Index idx, std::span<const Index> dims) {
  std::vector<Index> d(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    d[k] = idx % dims[k];
    idx /= dims[k];
  }
  return d;
}

Index index_of(const std::vector<Index>& digits, std::span<const Index> dims) {
  Index idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + digits[k];
  return idx;
}

Index product(std::span<const Index> dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

void check_factor_list(std::span<const Index> dims, std::span<const Index> which,
                       const ComplexMatrix& rho) {
  if (rho.rows() != rho.cols() || rho.rows() != product(dims))
    throw DimensionError("operator size does not match the factor dimensions");
  for (Index k : which) {
    if (k < 0 || k >= static_cast<Index>(dims.size()))
      throw DimensionError("factor index out of range");
  }
}

}  // namespace

ComplexMatrix identity(Index d) { return ComplexMatrix::Identity(d, d); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::Ones(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

ComplexMatrix outer(const ComplexVector& a, const ComplexVector& b) { return a * b.adjoint(); }

ComplexVector basis_vector(Index d, Index k) {
  ComplexVector v = ComplexVector::Zero(d);
  v(k) = 1.0;
  return v;
}

ComplexMatrix matrix_unit(Index d, Index i, Index j) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

ComplexMatrix pauli(int k) {
  ComplexMatrix m(2, 2);
  const cplx i{0.0, 1.0};
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -i, i, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw std::out_of_range("pauli index must be 0..3");
  }
  return m;
}

bool is_hermitian(const ComplexMatrix& m, double eps) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= eps;
}

bool is_unitary(const ComplexMatrix& m, double eps) {
  return m.rows() == m.cols() && is_isometry(m, eps);
}

bool is_isometry(const ComplexMatrix& m, double eps) {
  const ComplexMatrix g = m.adjoint() * m;
  return (g - identity(m.cols())).cwiseAbs().maxCoeff() <= eps;
}

bool is_psd(const ComplexMatrix& m, double eps) {
  return is_hermitian(m, eps) && min_eigenvalue(m) >= -eps;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

HermitianEigen eigh(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) throw NumericalError("hermitian eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  return hermitian_function(m, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

double trace_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

ComplexMatrix maximizing_unitary(const ComplexMatrix& m) {
  // m = W S V^*  =>  Re tr(U m) is maximal for U = V W^*, value tr S.
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixV() * svd.matrixU().adjoint();
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, std::span<const Index> dims,
                            std::span<const Index> keep) {
  check_factor_list(dims, keep, rho);
  std::vector<Index> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  std::vector<Index> traced;
  for (Index k = 0; k < static_cast<Index>(dims.size()); ++k)
    if (!std::binary_search(kept.begin(), kept.end(), k)) traced.push_back(k);

  std::vector<Index> kept_dims, traced_dims;
  for (Index k : kept) kept_dims.push_back(dims[k]);
  for (Index k : traced) traced_dims.push_back(dims[k]);
  const Index nk = product(kept_dims);
  const Index nt = product(traced_dims);

  // full index for (kept digits, traced digits)
  auto full = [&](Index a, Index t) {
    const auto da = digits_of(a, kept_dims);
    const auto dt = digits_of(t, traced_dims);
    std::vector<Index> digits(dims.size());
    for (std::size_t q = 0; q < kept.size(); ++q) digits[kept[q]] = da[q];
    for (std::size_t q = 0; q < traced.size(); ++q) digits[traced[q]] = dt[q];
    return index_of(digits, dims);
  };

  std::vector<Index> table(nk * nt);
  for (Index a = 0; a < nk; ++a)
    for (Index t = 0; t < nt; ++t) table[a * nt + t] = full(a, t);

  ComplexMatrix out = ComplexMatrix::Zero(nk, nk);
  for (Index a = 0; a < nk; ++a)
    for (Index b = 0; b < nk; ++b) {
      cplx s = 0.0;
      for (Index t = 0; t < nt; ++t) s += rho(table[a * nt + t], table[b * nt + t]);
      out(a, b) = s;
    }
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& rho, std::span<const Index> dims,
                                std::span<const Index> transposed) {
  check_factor_list(dims, transposed, rho);
  const Index n = rho.rows();
  ComplexMatrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto di = digits_of(i, dims);
    for (Index j = 0; j < n; ++j) {
      auto si = di;
      auto sj = digits_of(j, dims);
      for (Index k : transposed) std::swap(si[k], sj[k]);
      out(i, j) = rho(index_of(si, dims), index_of(sj, dims));
    }
  }
  return out;
}

ComplexMatrix reshape_vector(const ComplexVector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw DimensionError("vector length does not match reshape");
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
  return m;
}

ComplexMatrix complete_to_unitary(const ComplexMatrix& m, const ComplexMatrix& seed_columns,
                                  double eps) {
  const Index n = m.rows();
  if (m.cols() > n) throw DimensionError("more columns than rows");
  if (!is_isometry(m, eps)) throw InvariantError("columns are not orthonormal");
  ComplexMatrix out(n, n);
  out.leftCols(m.cols()) = m;
  Index filled = m.cols();
  for (Index c = 0; c < seed_columns.cols() && filled < n; ++c) {
    ComplexVector v = seed_columns.col(c);
    // two Gram-Schmidt passes for stability
    for (int pass = 0; pass < 2; ++pass)
      v -= out.leftCols(filled) * (out.leftCols(filled).adjoint() * v);
    const double nv = v.norm();
    if (nv > 1e-8) out.col(filled++) = v / nv;
  }
  if (filled < n) throw NumericalError("seed columns do not span the complement");
  return out;
}

}  // namespace qichan
