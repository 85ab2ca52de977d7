#include "entroflux/numerics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace entroflux {

Matrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
}

double SpectralDecomposition::unitarity_defect() const {
  const auto n = eigenvectors.cols();
  return (eigenvectors.adjoint() * eigenvectors - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

namespace {

void fix_phases(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double m = std::abs(vectors(r, c));
      if (m > best + 1e-14) {
        best = m;
        imax = r;
      }
    }
    const Complex z = vectors(imax, c);
    if (std::abs(z) > 0) vectors.col(c) *= std::conj(z) / std::abs(z);
  }
}

SpectralDecomposition compute_spectral(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw Error("eigensolver did not converge");
  SpectralDecomposition dec;
  dec.eigenvalues = solver.eigenvalues();
  dec.eigenvectors = solver.eigenvectors();
  fix_phases(dec.eigenvectors);
  return dec;
}

}  // namespace

HermitianOperator::HermitianOperator(Matrix m, double htol) : cache_(std::make_shared<Cache>()) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DimensionMismatchError("HermitianOperator needs a nonempty square matrix");
  const double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
  defect_ = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (defect_ > htol * scale) throw NonHermitianError(defect_ / scale);
  // Work with the exactly Hermitian part from here on.
  mat_ = 0.5 * (m + m.adjoint());
}

const SpectralDecomposition& HermitianOperator::spectral() const {
  std::call_once(cache_->flag, [&] { cache_->dec = compute_spectral(mat_); });
  return cache_->dec;
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
  return HermitianOperator(mat_ + other.mat_);
}
HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
  return HermitianOperator(mat_ - other.mat_);
}
HermitianOperator HermitianOperator::operator*(double s) const {
  return HermitianOperator(mat_ * s);
}

double OperatorFunction::apply_real(double x) const {
  if (!real_) throw Error("OperatorFunction '" + label_ + "' is complex-valued");
  if (x < floor_) {
    if (policy_ == Policy::Error)
      throw DomainError("argument " + std::to_string(x) + " outside domain of '" + label_ + "'");
    x = floor_;
  }
  return real_(x);
}

Complex OperatorFunction::apply_complex(double x) const {
  if (complex_) return complex_(x);
  return Complex(apply_real(x), 0.0);
}

HermitianOperator matfun(const HermitianOperator& a, const OperatorFunction& f) {
  if (!f.is_real()) throw Error("matfun: use matfun_complex for complex-valued functions");
  const auto& dec = a.spectral();
  RealVector vals(dec.eigenvalues.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) vals[i] = f.apply_real(dec.eigenvalues[i]);
  return HermitianOperator(dec.eigenvectors * vals.asDiagonal() * dec.eigenvectors.adjoint(),
                           1e-10);
}

HermitianOperator matfun(const HermitianOperator& a, const std::function<double(double)>& f) {
  return matfun(a, OperatorFunction(f, "anonymous", OperatorFunction::Policy::Clamp,
                                    -std::numeric_limits<double>::infinity()));
}

Matrix matfun_complex(const HermitianOperator& a, const std::function<Complex(double)>& f) {
  const auto& dec = a.spectral();
  Vector vals(dec.eigenvalues.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) vals[i] = f(dec.eigenvalues[i]);
  return dec.eigenvectors * vals.asDiagonal() * dec.eigenvectors.adjoint();
}

double schatten_norm(const Matrix& a, double p) {
  if (a.rows() != a.cols()) throw DimensionMismatchError("schatten_norm: square matrix expected");
  if (!(p >= 1.0)) throw BadExponentError("schatten_norm requires p >= 1");
  Eigen::JacobiSVD<Matrix> svd(a);
  const RealVector& sv = svd.singularValues();
  if (std::isinf(p)) return sv.size() ? sv.maxCoeff() : 0.0;
  const double smax = sv.size() ? sv.maxCoeff() : 0.0;
  if (smax == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) acc += std::pow(sv[i] / smax, p);
  return smax * std::pow(acc, 1.0 / p);
}

namespace {

int product(const std::vector<int>& dims) {
  int p = 1;
  for (int d : dims) p *= d;
  return p;
}

}  // namespace

Matrix partial_trace(const Matrix& a, const std::vector<int>& dims, const std::vector<int>& keep) {
  const int total = product(dims);
  if (a.rows() != total || a.cols() != total)
    throw DimensionMismatchError("partial_trace: dims do not match the matrix size");
  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  std::vector<bool> is_kept(dims.size(), false);
  for (int s : kept) {
    if (s < 0 || s >= static_cast<int>(dims.size()) || is_kept[s])
      throw DimensionMismatchError("partial_trace: bad slot index");
    is_kept[s] = true;
  }
  int dkeep = 1, dtrace = 1;
  for (size_t s = 0; s < dims.size(); ++s) (is_kept[s] ? dkeep : dtrace) *= dims[s];

  // Strides of each slot in the row-major multi-index of the full space.
  std::vector<int> stride(dims.size());
  int acc = 1;
  for (int s = static_cast<int>(dims.size()) - 1; s >= 0; --s) {
    stride[s] = acc;
    acc *= dims[s];
  }
  std::vector<int> kept_slots, traced_slots;
  for (size_t s = 0; s < dims.size(); ++s) (is_kept[s] ? kept_slots : traced_slots).push_back(s);

  auto offset = [&](const std::vector<int>& slots, int linear) {
    int off = 0;
    for (int si = static_cast<int>(slots.size()) - 1; si >= 0; --si) {
      const int s = slots[si];
      off += (linear % dims[s]) * stride[s];
      linear /= dims[s];
    }
    return off;
  };

  Matrix out = Matrix::Zero(dkeep, dkeep);
  for (int i = 0; i < dkeep; ++i) {
    const int oi = offset(kept_slots, i);
    for (int j = 0; j < dkeep; ++j) {
      const int oj = offset(kept_slots, j);
      Complex sum = 0.0;
      for (int k = 0; k < dtrace; ++k) {
        const int ok = offset(traced_slots, k);
        sum += a(oi + ok, oj + ok);
      }
      out(i, j) = sum;
    }
  }
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& a, const std::vector<int>& dims,
                                const std::vector<int>& keep) {
  return HermitianOperator(partial_trace(a.matrix(), dims, keep), 1e-10);
}

Matrix evolve(const Matrix& a, const HermitianOperator& h, Complex t) {
  if (a.rows() != h.dim() || a.cols() != h.dim())
    throw DimensionMismatchError("evolve: dimensions do not match");
  const Complex i(0.0, 1.0);
  Matrix u = matfun_complex(h, [&](double x) { return std::exp(i * t * x); });
  Matrix uinv = matfun_complex(h, [&](double x) { return std::exp(-i * t * x); });
  return u * a * uinv;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix tensor_embed(const std::vector<std::pair<Matrix, int>>& ops, const std::vector<int>& dims) {
  std::vector<const Matrix*> slot_op(dims.size(), nullptr);
  for (const auto& [op, slot] : ops) {
    if (slot < 0 || slot >= static_cast<int>(dims.size()) || slot_op[slot] != nullptr)
      throw DimensionMismatchError("tensor_embed: slots must be distinct and in range");
    if (op.rows() != dims[slot] || op.cols() != dims[slot])
      throw DimensionMismatchError("tensor_embed: operator does not fit its slot");
    slot_op[slot] = &op;
  }
  Matrix out = Matrix::Identity(1, 1);
  for (size_t s = 0; s < dims.size(); ++s) {
    if (slot_op[s])
      out = kron(out, *slot_op[s]);
    else
      out = kron(out, Matrix::Identity(dims[s], dims[s]));
  }
  return out;
}

Matrix tensor_embed_pair(const Matrix& op, int slot_a, int slot_b, const std::vector<int>& dims) {
  if (slot_a >= slot_b) throw DimensionMismatchError("tensor_embed_pair: need slot_a < slot_b");
  const int da = dims[slot_a], db = dims[slot_b];
  if (op.rows() != da * db) throw DimensionMismatchError("tensor_embed_pair: size mismatch");
  const int total = product(dims);
  std::vector<int> stride(dims.size());
  int acc = 1;
  for (int s = static_cast<int>(dims.size()) - 1; s >= 0; --s) {
    stride[s] = acc;
    acc *= dims[s];
  }
  auto split = [&](int idx, int& ia, int& ib, int& rest) {
    rest = 0;
    for (size_t s = 0; s < dims.size(); ++s) {
      const int comp = (idx / stride[s]) % dims[s];
      if (static_cast<int>(s) == slot_a)
        ia = comp;
      else if (static_cast<int>(s) == slot_b)
        ib = comp;
      else
        rest = rest * dims[s] + comp;
    }
  };
  Matrix out = Matrix::Zero(total, total);
  for (int r = 0; r < total; ++r) {
    int ra, rb, rrest;
    split(r, ra, rb, rrest);
    for (int c = 0; c < total; ++c) {
      int ca, cb, crest;
      split(c, ca, cb, crest);
      if (rrest != crest) continue;
      out(r, c) = op(ra * db + rb, ca * db + cb);
    }
  }
  return out;
}

double commutator_norm(const Matrix& a, const Matrix& b) {
  return commutator(a, b).cwiseAbs().maxCoeff();
}

Matrix hermitian_exp(const Matrix& a) {
  HermitianOperator h(a, 1e-9);
  return matfun(h, [](double x) { return std::exp(x); }).matrix();
}

namespace {
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }
}  // namespace

double log_det_one_plus_exp(const Matrix& x_hermitian) {
  HermitianOperator h(x_hermitian, 1e-9);
  const RealVector& ev = h.spectral().eigenvalues;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) acc += softplus(ev[i]);
  return acc;
}

double log_tr_exp(const Matrix& x_hermitian) {
  HermitianOperator h(x_hermitian, 1e-9);
  const RealVector& ev = h.spectral().eigenvalues;
  const double m = ev.maxCoeff();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) acc += std::exp(ev[i] - m);
  return m + std::log(acc);
}

}  // namespace entroflux
