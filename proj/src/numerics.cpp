#include "qps/numerics.hpp"

#include <cmath>

namespace qps {

double hermiticity_error(const CMatrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_error(const CMatrix& u) {
  CMatrix g = u.adjoint() * u;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

void require_square(const CMatrix& a, const std::string& what) {
  if (a.rows() != a.cols())
    throw std::invalid_argument(what + ": matrix is not square (" +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ")");
}

void require_same_dim(const CMatrix& a, const CMatrix& b, const std::string& what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(what + ": dimension mismatch (" + std::to_string(a.rows()) +
                                "x" + std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
}

void require_hermitian(const CMatrix& a, double tolerance, const std::string& what) {
  require_square(a, what);
  const double err = hermiticity_error(a);
  if (err > tolerance)
    throw std::invalid_argument(what + ": not hermitian, max|A-A^+| = " + std::to_string(err));
}

void require_unitary(const CMatrix& u, double tolerance, const std::string& what) {
  require_square(u, what);
  const double err = unitarity_error(u);
  if (err > tolerance)
    throw std::invalid_argument(what + ": not unitary, max|U^+U-I| = " + std::to_string(err));
}

CMatrix SpectralDecomp::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
}

CMatrix SpectralDecomp::unitary_exp(double scale) const {
  CVector phases = (Complex(0.0, scale) * eigenvalues.cast<Complex>()).array().exp();
  return eigenvectors * phases.asDiagonal() * eigenvectors.adjoint();
}

CVector SpectralDecomp::unitary_exp_apply(double scale, const CVector& v) const {
  CVector w = eigenvectors.adjoint() * v;
  w.array() *= (Complex(0.0, scale) * eigenvalues.cast<Complex>()).array().exp();
  return eigenvectors * w;
}

SpectralDecomp eig_hermitian(const CMatrix& a, double tolerance) {
  require_hermitian(a, tolerance, "eig_hermitian input");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
  return SpectralDecomp{solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix propagator_from_hamiltonian(const CMatrix& h, double dt, double hbar, double tolerance) {
  if (dt <= 0.0) throw std::invalid_argument("propagator_from_hamiltonian: dt must be > 0");
  if (hbar <= 0.0) throw std::invalid_argument("propagator_from_hamiltonian: hbar must be > 0");
  return eig_hermitian(h, tolerance).unitary_exp(-dt / hbar);
}

CMatrix commutator_i(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "commutator_i");
  return Complex(0.0, 1.0) * (a * b - b * a);
}

RVector commutator_sq_diagonal(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "commutator_sq_diagonal");
  const CMatrix k = a * b - b * a;
  // diag(-K K) without the full product
  const auto n = k.rows();
  RVector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = -(k.row(i) * k.col(i)).value().real();
  return d;
}

}  // namespace qps
