#include "magctrl/dense.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include <lapacke.h>

#include "magctrl/parallel.hpp"

namespace magctrl {

std::vector<cplx> assemble(const ControlSystem& sys, const std::vector<double>& u) {
  const std::int64_t n64 = sys.grid.size();
  if (n64 > 4096)
    throw std::invalid_argument("assemble: dimension " + std::to_string(n64) +
                                " exceeds the dense cap 4096");
  const int n = static_cast<int>(n64);
  std::vector<cplx> H(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  WaveFunction basis(sys.grid);
  for (int j = 0; j < n; ++j) {
    std::fill(basis.v.begin(), basis.v.end(), cplx{0.0, 0.0});
    basis.v[static_cast<std::size_t>(j)] = cplx{1.0, 0.0};
    WaveFunction col = apply_hamiltonian(sys, u, basis);
    std::copy(col.v.begin(), col.v.end(),
              H.begin() + static_cast<std::ptrdiff_t>(j) * n);
  }
  return H;
}

EigData eig_hermitian(std::vector<cplx> H, int n) {
  EigData e;
  e.n = n;
  e.lam.resize(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'U', n,
      reinterpret_cast<lapack_complex_double*>(H.data()), n, e.lam.data());
  if (info != 0)
    throw std::runtime_error("eig_hermitian: zheevd failed, info " + std::to_string(info));
  e.Q = std::move(H);
  return e;
}

void eig_evolve(const EigData& eig, double tau, std::vector<cplx>& psi) {
  const int n = eig.n;
  if (psi.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("eig_evolve: size mismatch");
  std::vector<cplx> t(static_cast<std::size_t>(n));
  // t = e^{-i tau Lambda} Q^dagger psi; columns are contiguous
  parallel_for(n, [&](std::int64_t j) {
    const cplx* col = eig.Q.data() + j * n;
    cplx s{0.0, 0.0};
    for (int i = 0; i < n; ++i) s += std::conj(col[i]) * psi[static_cast<std::size_t>(i)];
    t[static_cast<std::size_t>(j)] =
        s * std::polar(1.0, -tau * eig.lam[static_cast<std::size_t>(j)]);
  });
  // psi = Q t, parallel over row blocks
  parallel_for_blocks(static_cast<std::size_t>(n), [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) psi[i] = cplx{0.0, 0.0};
    for (int j = 0; j < n; ++j) {
      const cplx* col = eig.Q.data() + static_cast<std::ptrdiff_t>(j) * n;
      const cplx tj = t[static_cast<std::size_t>(j)];
      for (std::size_t i = lo; i < hi; ++i) psi[i] += col[i] * tj;
    }
  });
}

namespace ref {
void eig_evolve(const EigData& eig, double tau, std::vector<cplx>& psi) {
  const int n = eig.n;
  std::vector<cplx> t(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const cplx* col = eig.Q.data() + static_cast<std::ptrdiff_t>(j) * n;
    cplx s{0.0, 0.0};
    for (int i = 0; i < n; ++i) s += std::conj(col[i]) * psi[static_cast<std::size_t>(i)];
    t[static_cast<std::size_t>(j)] =
        s * std::polar(1.0, -tau * eig.lam[static_cast<std::size_t>(j)]);
  }
  const std::size_t nb = blocked_count(static_cast<std::size_t>(n));
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t lo = b * static_cast<std::size_t>(kReduceBlock);
    const std::size_t hi = std::min(static_cast<std::size_t>(n), lo + static_cast<std::size_t>(kReduceBlock));
    for (std::size_t i = lo; i < hi; ++i) psi[i] = cplx{0.0, 0.0};
    for (int j = 0; j < n; ++j) {
      const cplx* col = eig.Q.data() + static_cast<std::ptrdiff_t>(j) * n;
      const cplx tj = t[static_cast<std::size_t>(j)];
      for (std::size_t i = lo; i < hi; ++i) psi[i] += col[i] * tj;
    }
  }
}
}  // namespace ref

std::vector<double> lstsq(std::vector<double> A, int rows, int cols,
                          std::vector<double> b) {
  if (A.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) ||
      b.size() != static_cast<std::size_t>(rows))
    throw std::invalid_argument("lstsq: shape mismatch");
  const int nrhs = 1;
  const int ldb = std::max(rows, cols);
  std::vector<double> bb(static_cast<std::size_t>(ldb), 0.0);
  std::copy(b.begin(), b.end(), bb.begin());
  std::vector<double> sv(static_cast<std::size_t>(std::min(rows, cols)));
  lapack_int rank = 0;
  const lapack_int info =
      LAPACKE_dgelsd(LAPACK_COL_MAJOR, rows, cols, nrhs, A.data(), rows,
                     bb.data(), ldb, sv.data(), 1e-12, &rank);
  if (info != 0)
    throw std::runtime_error("lstsq: dgelsd failed, info " + std::to_string(info));
  bb.resize(static_cast<std::size_t>(cols));
  return bb;
}

}  // namespace magctrl
