#include "entroflux/quadrature.hpp"

#include <map>

#include <Eigen/Eigenvalues>

namespace entroflux {

namespace {

template <class T, class NormFn>
T simpson_doubling(const std::function<T(double)>& f, double a, double b, double atol,
                   int max_nodes, const NormFn& norm, const T& zero) {
  if (a == b) return zero;
  int n = 8;
  // The explicit return type matters: with Eigen values a deduced return
  // type would be an expression referencing the dead local accumulator.
  auto composite = [&](int intervals) -> T {
    const double h = (b - a) / intervals;
    T acc = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) acc = acc + f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return T(acc * (h / 3.0));
  };
  T prev = composite(n);
  while (n <= max_nodes) {
    n *= 2;
    T cur = composite(n);
    if (norm(cur - prev) <= atol) return cur;
    prev = cur;
  }
  throw QuadratureFailureError(norm(prev));
}

}  // namespace

double simpson_adaptive(const std::function<double(double)>& f, double a, double b, double atol,
                        int max_nodes) {
  return simpson_doubling<double>(f, a, b, atol, max_nodes,
                                  [](double x) { return std::abs(x); }, 0.0);
}

Matrix simpson_adaptive_matrix(const std::function<Matrix(double)>& f, double a, double b,
                               double atol, int max_nodes) {
  if (a == b) {
    Matrix probe = f(a);
    return Matrix::Zero(probe.rows(), probe.cols());
  }
  Matrix probe = f(a);
  Matrix zero = Matrix::Zero(probe.rows(), probe.cols());
  return simpson_doubling<Matrix>(
      f, a, b, atol, max_nodes, [](const Matrix& m) { return m.cwiseAbs().maxCoeff(); }, zero);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    // Jacobi matrix of the Legendre recurrence; nodes are its eigenvalues and
    // weights 2 * (first eigenvector component)^2.
    RealMatrix jac = RealMatrix::Zero(n, n);
    for (int i = 1; i < n; ++i) {
      const double bi = i / std::sqrt(4.0 * i * i - 1.0);
      jac(i, i - 1) = bi;
      jac(i - 1, i) = bi;
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(jac);
    std::vector<double> xs(n), ws(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = solver.eigenvalues()[i];
      const double v = solver.eigenvectors()(0, i);
      ws[i] = 2.0 * v * v;
    }
    it = cache.emplace(n, std::make_pair(std::move(xs), std::move(ws))).first;
  }
  nodes = it->second.first;
  weights = it->second.second;
}

double gauss_adaptive(const std::function<double(double)>& f, double a, double b,
                      const QuadratureSpec& spec) {
  std::vector<double> x, w;
  gauss_legendre(spec.points, x, w);
  auto composite = [&](int panels) {
    double acc = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = a + p * h;
      for (int i = 0; i < spec.points; ++i)
        acc += w[i] * f(lo + 0.5 * h * (x[i] + 1.0));
      // scale applied after the node loop for a touch less rounding
    }
    return acc * 0.5 * h;
  };
  int panels = 1;
  double prev = composite(panels);
  for (int d = 0; d < spec.max_doublings; ++d) {
    panels *= 2;
    const double cur = composite(panels);
    const double scale = std::max({1.0, std::abs(cur), std::abs(prev)});
    if (std::abs(cur - prev) <= spec.rel_tol * scale) return cur;
    prev = cur;
  }
  throw QuadratureFailureError(std::abs(prev));
}

}  // namespace entroflux
