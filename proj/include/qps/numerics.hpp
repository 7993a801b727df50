#pragma once

// Dense complex linear algebra shared by every other module: Hermitian
// eigendecomposition, matrix exponentials of Hamiltonians, commutator
// diagnostics. All matrices are column-major Eigen types; values are
// immutable after construction and safe to share across worker threads.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qps {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

namespace tol {
inline constexpr double algebraic = 1e-10;  // unitarity / hermiticity identities
inline constexpr double spectral = 1e-8;    // eigendecomposition reconstructions
}  // namespace tol

// max |A - A^dagger|
double hermiticity_error(const CMatrix& a);

// max |U^dagger U - I|
double unitarity_error(const CMatrix& u);

void require_square(const CMatrix& a, const std::string& what);
void require_same_dim(const CMatrix& a, const CMatrix& b, const std::string& what);
void require_hermitian(const CMatrix& a, double tolerance = tol::algebraic,
                       const std::string& what = "matrix");
void require_unitary(const CMatrix& u, double tolerance = tol::algebraic,
                     const std::string& what = "matrix");

struct SpectralDecomp {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // unitary, column k pairs with eigenvalues[k]

  int dim() const { return static_cast<int>(eigenvalues.size()); }

  CMatrix reconstruct() const;

  // V diag(exp(i * scale * lambda)) V^dagger
  CMatrix unitary_exp(double scale) const;

  // V diag(exp(i * scale * lambda)) V^dagger v, without forming the matrix
  CVector unitary_exp_apply(double scale, const CVector& v) const;
};

SpectralDecomp eig_hermitian(const CMatrix& a, double tolerance = tol::algebraic);

// exp(-i H dt / hbar) through exact eigendecomposition
CMatrix propagator_from_hamiltonian(const CMatrix& h, double dt, double hbar,
                                    double tolerance = tol::algebraic);

// i (A B - B A); hermitian when A and B are
CMatrix commutator_i(const CMatrix& a, const CMatrix& b);

// diagonal of -[A, B]^2 in the computational frame; entrywise >= 0 for
// hermitian pairs since -[A,B]^2 = (i[A,B])^2
RVector commutator_sq_diagonal(const CMatrix& a, const CMatrix& b);

}  // namespace qps
