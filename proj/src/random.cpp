#include "entroflux/random.hpp"

#include <Eigen/QR>

namespace entroflux {

double Rng::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(engine_);
}

double Rng::normal() {
  std::normal_distribution<double> d(0.0, 1.0);
  return d(engine_);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im) / std::sqrt(2.0);
}

Matrix Rng::ginibre(int n) {
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = complex_normal();
  return g;
}

Matrix Rng::hermitian(int n) {
  Matrix g = ginibre(n);
  return (g + g.adjoint()) / 2.0;
}

RealMatrix Rng::real_symmetric(int n) {
  RealMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = normal();
  return (g + g.transpose()) / 2.0;
}

Matrix Rng::unitary(int n) {
  Eigen::HouseholderQR<Matrix> qr(ginibre(n));
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

Matrix Rng::density(int n) {
  Matrix g = ginibre(n);
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

Matrix Rng::faithful_density(int n, double floor) {
  Matrix rho = density(n) + floor * Matrix::Identity(n, n);
  return rho / rho.trace().real();
}

RealMatrix Rng::real_density(int n) {
  RealMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = normal();
  RealMatrix rho = g * g.transpose() + 1e-3 * RealMatrix::Identity(n, n);
  return rho / rho.trace();
}

Matrix Rng::projection(int n, int rank) {
  Matrix u = unitary(n);
  Matrix p = Matrix::Zero(n, n);
  for (int i = 0; i < rank; ++i) p += u.col(i) * u.col(i).adjoint();
  return p;
}

}  // namespace entroflux
