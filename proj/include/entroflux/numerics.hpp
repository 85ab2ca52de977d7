#ifndef ENTROFLUX_NUMERICS_HPP
#define ENTROFLUX_NUMERICS_HPP

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "entroflux/types.hpp"

namespace entroflux {

// Spectral decomposition of a Hermitian matrix. Eigenvalues ascending,
// eigenvector phases fixed so that the largest-magnitude component of each
// column is real positive (bit-stable across repeated runs).
struct SpectralDecomposition {
  RealVector eigenvalues;
  Matrix eigenvectors;

  Matrix reconstruct() const;
  double unitarity_defect() const;
};

// Dense Hermitian matrix with a Hermiticity certificate and a lazily
// computed, shared spectral decomposition.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix m, double htol = defaults::htol);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }
  double hermiticity_defect() const { return defect_; }

  // Eigendecomposition; computed once, shared between copies.
  const SpectralDecomposition& spectral() const;

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator-(const HermitianOperator& other) const;
  HermitianOperator operator*(double s) const;

 private:
  struct Cache {
    std::once_flag flag;
    SpectralDecomposition dec;
  };
  Matrix mat_;
  double defect_;
  std::shared_ptr<Cache> cache_;
};

// Scalar function for use in the functional calculus, together with its
// behaviour outside [floor, inf).
class OperatorFunction {
 public:
  enum class Policy { Error, Clamp };

  OperatorFunction(std::function<double(double)> f, std::string label,
                   Policy policy = Policy::Error, double floor = 0.0)
      : real_(std::move(f)), label_(std::move(label)), policy_(policy), floor_(floor) {}
  OperatorFunction(std::function<Complex(double)> f, std::string label)
      : complex_(std::move(f)), label_(std::move(label)), policy_(Policy::Error),
        floor_(-std::numeric_limits<double>::infinity()) {}

  bool is_real() const { return static_cast<bool>(real_); }
  const std::string& label() const { return label_; }
  double apply_real(double x) const;
  Complex apply_complex(double x) const;

 private:
  std::function<double(double)> real_;
  std::function<Complex(double)> complex_;
  std::string label_;
  Policy policy_;
  double floor_;
};

// f(A) by the spectral theorem. The real-valued overloads return Hermitian
// results; the complex one a plain matrix.
HermitianOperator matfun(const HermitianOperator& a, const OperatorFunction& f);
HermitianOperator matfun(const HermitianOperator& a, const std::function<double(double)>& f);
Matrix matfun_complex(const HermitianOperator& a, const std::function<Complex(double)>& f);

// Schatten p-norm from singular values; p = inf gives the operator norm.
double schatten_norm(const Matrix& a, double p);

// Partial trace over the factors not listed in `keep`. `dims` are the tensor
// factor dimensions in slot order, their product must equal dim(a).
HermitianOperator partial_trace(const HermitianOperator& a, const std::vector<int>& dims,
                                const std::vector<int>& keep);
Matrix partial_trace(const Matrix& a, const std::vector<int>& dims, const std::vector<int>& keep);

// Heisenberg evolution e^{itH} A e^{-itH}; complex t supported (the inverse
// factor is e^{-itH}, not the adjoint).
Matrix evolve(const Matrix& a, const HermitianOperator& h, Complex t);

// Kronecker embedding of operators at distinct slots, identity elsewhere.
Matrix tensor_embed(const std::vector<std::pair<Matrix, int>>& ops, const std::vector<int>& dims);
// Embedding of an operator acting on the pair of slots (a, b), a < b.
Matrix tensor_embed_pair(const Matrix& op, int slot_a, int slot_b, const std::vector<int>& dims);

Matrix kron(const Matrix& a, const Matrix& b);

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }
double commutator_norm(const Matrix& a, const Matrix& b);

// exp(A) for Hermitian A, via the spectral path shared by all functional calculus.
Matrix hermitian_exp(const Matrix& a);
// log det(1 + e^X) for Hermitian X, overflow-safe (softplus of eigenvalues).
double log_det_one_plus_exp(const Matrix& x_hermitian);
// log tr(e^X) for Hermitian X, overflow-safe.
double log_tr_exp(const Matrix& x_hermitian);

}  // namespace entroflux

#endif
