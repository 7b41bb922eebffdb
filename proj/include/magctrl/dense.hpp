#pragma once
#include <memory>
#include <vector>

#include "magctrl/system.hpp"

namespace magctrl {

// Column-major n x n complex matrix of H(u); refuses dimensions above 4096.
std::vector<cplx> assemble(const ControlSystem& sys, const std::vector<double>& u);

struct EigData {
  int n = 0;
  std::vector<cplx> Q;        // eigenvectors, column-major
  std::vector<double> lam;    // ascending eigenvalues
};

// Hermitian eigendecomposition (divide and conquer); consumes the matrix.
EigData eig_hermitian(std::vector<cplx> H, int n);

// psi' = Q e^{-i tau Lambda} Q^dagger psi
void eig_evolve(const EigData& eig, double tau, std::vector<cplx>& psi);

// Minimum-norm least squares via SVD; A column-major rows x cols, returns x.
std::vector<double> lstsq(std::vector<double> A, int rows, int cols,
                          std::vector<double> b);

namespace ref {
void eig_evolve(const EigData& eig, double tau, std::vector<cplx>& psi);
}

}  // namespace magctrl
