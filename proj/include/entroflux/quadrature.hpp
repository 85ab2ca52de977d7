#ifndef ENTROFLUX_QUADRATURE_HPP
#define ENTROFLUX_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "entroflux/types.hpp"

namespace entroflux {

// Composite Simpson with node doubling until successive values change by at
// most atol; throws QuadratureFailure past max_nodes intervals.
double simpson_adaptive(const std::function<double(double)>& f, double a, double b,
                        double atol = defaults::quad_atol, int max_nodes = 1 << 16);

// Same scheme for matrix-valued integrands (entrywise max-norm control).
Matrix simpson_adaptive_matrix(const std::function<Matrix(double)>& f, double a, double b,
                               double atol = defaults::quad_atol, int max_nodes = 1 << 14);

struct QuadratureSpec {
  int points = 64;        // Gauss-Legendre points per panel
  int max_doublings = 10; // panel-count doublings before giving up
  double rel_tol = 1e-8;
};

// Gauss-Legendre nodes/weights on [-1, 1] (Golub-Welsch).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Adaptive composite Gauss-Legendre on [a, b]; open rule, endpoints are
// never evaluated.
double gauss_adaptive(const std::function<double(double)>& f, double a, double b,
                      const QuadratureSpec& spec = {});

}  // namespace entroflux

#endif
