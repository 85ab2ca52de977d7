#include "entroflux/classical.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace entroflux {

namespace {

// Dirichlet Laplacian contribution 1 - Delta on the site range [lo, hi]
// (indices into the full lattice), added into the position block.
void add_position_block(RealMatrix& hq, int lo, int hi) {
  for (int x = lo; x <= hi; ++x) {
    hq(x, x) += 2.0;  // 1 (pinning) + 2 (Laplacian diagonal) - 1 (identity already there)
    if (x + 1 <= hi) {
      hq(x, x + 1) -= 1.0;
      hq(x + 1, x) -= 1.0;
    }
  }
}

}  // namespace

ChainOperators::ChainOperators(const ChainConfig& cfg) : cfg_(cfg) {
  if (!(cfg.m > cfg.n && cfg.n >= 0)) throw DimensionMismatchError("chain needs m > n >= 0");
  if (!(cfg.beta_l > 0 && cfg.beta_r > 0 && cfg.beta > 0))
    throw DomainError("chain temperatures must be positive");
  sites_ = 2 * cfg.m + 1;
  const int s = sites_;

  // position blocks: identity is the pinning term, the rest is the Laplacian
  auto position_block = [&](const std::vector<std::pair<int, int>>& ranges) {
    RealMatrix hq = RealMatrix::Zero(s, s);
    for (auto [lo, hi] : ranges) {
      for (int x = lo; x <= hi; ++x) hq(x, x) = 1.0;
      add_position_block(hq, lo, hi);
    }
    return hq;
  };
  auto momentum_block = [&](const std::vector<std::pair<int, int>>& ranges) {
    RealMatrix hp = RealMatrix::Zero(s, s);
    for (auto [lo, hi] : ranges)
      for (int x = lo; x <= hi; ++x) hp(x, x) = 1.0;
    return hp;
  };
  auto assemble = [&](const std::vector<std::pair<int, int>>& ranges) {
    RealMatrix full = RealMatrix::Zero(2 * s, 2 * s);
    full.topLeftCorner(s, s) = momentum_block(ranges);
    full.bottomRightCorner(s, s) = position_block(ranges);
    return full;
  };

  const int m = cfg.m, n = cfg.n;
  const std::pair<int, int> left{0, m - n - 1};
  const std::pair<int, int> middle{m - n, m + n};
  const std::pair<int, int> right{m + n + 1, 2 * m};
  h_ = assemble({{0, 2 * m}});
  h0_ = assemble({left, middle, right});
  const RealMatrix h_left = assemble({left});
  const RealMatrix h_right = assemble({right});
  k_x_ = cfg.x_l() * h_left + cfg.x_r() * h_right;

  Eigen::LLT<RealMatrix> llt(cfg.beta * h_ - k_x_);
  if (llt.info() != Eigen::Success)
    throw DomainError("reference covariance is not positive definite");
  d_x_ = llt.solve(RealMatrix::Identity(2 * s, 2 * s));
  d_x_ = 0.5 * (d_x_ + d_x_.transpose());

  Eigen::SelfAdjointEigenSolver<RealMatrix> es(h_.bottomRightCorner(s, s));
  if (es.info() != Eigen::Success) throw Error("chain eigensolver failed");
  hq_vecs_ = es.eigenvectors();
  freq_sq_ = es.eigenvalues();
}

RealMatrix ChainOperators::k_of(double y_l, double y_r) const {
  const int m = cfg_.m, n = cfg_.n;
  const int s = sites_;
  auto assemble_range = [&](int lo, int hi) {
    RealMatrix full = RealMatrix::Zero(2 * s, 2 * s);
    for (int x = lo; x <= hi; ++x) full(x, x) = 1.0;
    RealMatrix hq = RealMatrix::Zero(s, s);
    for (int x = lo; x <= hi; ++x) hq(x, x) = 1.0;
    add_position_block(hq, lo, hi);
    full.bottomRightCorner(s, s) = hq;
    return full;
  };
  return y_l * assemble_range(0, m - n - 1) + y_r * assemble_range(m + n + 1, 2 * m);
}

RealMatrix ChainOperators::trig(const std::function<double(double)>& f) const {
  RealVector vals(freq_sq_.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) vals[i] = f(std::sqrt(freq_sq_[i]));
  return hq_vecs_ * vals.asDiagonal() * hq_vecs_.transpose();
}

RealMatrix ChainOperators::propagator(double t) const {
  // dp/dt = -hq q, dq/dt = p: block trigonometric flow of the eigenmodes
  const int s = sites_;
  RealMatrix e(2 * s, 2 * s);
  const RealMatrix cos_t = trig([t](double w) { return std::cos(w * t); });
  const RealMatrix wsin = trig([t](double w) { return w * std::sin(w * t); });
  const RealMatrix sinw = trig([t](double w) { return std::sin(w * t) / w; });
  e.topLeftCorner(s, s) = cos_t;
  e.topRightCorner(s, s) = -wsin;
  e.bottomLeftCorner(s, s) = sinw;
  e.bottomRightCorner(s, s) = cos_t;
  return e;
}

double ChainOperators::energy_conservation_defect() const {
  const RealMatrix e = propagator(1.0);
  return (e.transpose() * h_ * e - h_).cwiseAbs().maxCoeff() / h_.cwiseAbs().maxCoeff();
}

double ChainOperators::liouville_defect() const {
  Eigen::PartialPivLU<RealMatrix> lu(propagator(1.0));
  double log_abs = 0.0;
  double sign = lu.permutationP().determinant();
  const auto& u = lu.matrixLU();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    log_abs += std::log(std::abs(u(i, i)));
    if (u(i, i) < 0) sign = -sign;
  }
  return std::abs(sign * std::exp(log_abs) - 1.0);
}

ChainOperators chain_build(const ChainConfig& cfg) { return ChainOperators(cfg); }

namespace {

// -1/2 log det(1 - D A) for a symmetric positive definite covariance D and
// symmetric A; finite exactly when the pencil stays positive, so the domain
// test runs over the spectrum of the symmetrized product.
ExtReal gaussian_log_det(const RealMatrix& covariance, const RealMatrix& a) {
  Eigen::LLT<RealMatrix> llt(covariance);
  if (llt.info() != Eigen::Success) throw DomainError("covariance lost positivity");
  const RealMatrix c = llt.matrixL();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(c.transpose() * a * c);
  const RealVector& s = es.eigenvalues();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double arg = 1.0 - s[i];
    if (arg <= 0.0) return ExtReal::pos_infinity();
    acc += std::log(arg);
  }
  return ExtReal(-0.5 * acc);
}

}  // namespace

ExtReal chain_gt(const ChainOperators& ops, double t, double y_l, double y_r) {
  const RealMatrix ky = ops.k_of(y_l, y_r);
  const RealMatrix e = ops.propagator(t);
  const RealMatrix a = e.transpose() * ky * e - ky;
  return gaussian_log_det(ops.covariance(), a);
}

std::vector<ExtReal> chain_et_diagonal(const ChainOperators& ops, double t,
                                       const std::vector<double>& alphas) {
  // determinant argument is linear in alpha along Y = alpha X: one
  // symmetric spectrum serves the whole grid
  const RealMatrix e = ops.propagator(t);
  const RealMatrix a = e.transpose() * ops.k_x() * e - ops.k_x();
  Eigen::LLT<RealMatrix> llt(ops.covariance());
  if (llt.info() != Eigen::Success) throw DomainError("covariance lost positivity");
  const RealMatrix c = llt.matrixL();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(RealMatrix(c.transpose() * a * c));
  const RealVector& s = es.eigenvalues();
  std::vector<ExtReal> out;
  out.reserve(alphas.size());
  for (double alpha : alphas) {
    double acc = 0.0;
    bool outside = false;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double arg = 1.0 - alpha * s[i];
      if (arg <= 0.0) {
        outside = true;
        break;
      }
      acc += std::log(arg);
    }
    out.push_back(outside ? ExtReal::pos_infinity() : ExtReal(-0.5 * acc));
  }
  return out;
}

MeanEntropyProduction::MeanEntropyProduction(const ChainOperators& ops) {
  const int s = ops.sites();
  const int d = 2 * s;
  // unitary diagonalizing i h^{1/2} j h^{1/2}, assembled from the position
  // block eigenbasis
  RealVector eps(s);
  for (int i = 0; i < s; ++i) eps[i] = std::sqrt(ops.freq_sq_[i]);
  Matrix w(d, d);
  const Complex i_unit(0.0, 1.0);
  w.topLeftCorner(s, s) = ops.hq_vecs_.cast<Complex>();
  w.topRightCorner(s, s) = ops.hq_vecs_.cast<Complex>();
  w.bottomLeftCorner(s, s) = -i_unit * ops.hq_vecs_.cast<Complex>();
  w.bottomRightCorner(s, s) = i_unit * ops.hq_vecs_.cast<Complex>();
  w /= std::sqrt(2.0);
  freq_.resize(d);
  freq_.head(s) = -eps;
  freq_.tail(s) = eps;

  // h^{1/2} and h^{-1/2} in block form
  RealMatrix hroot = RealMatrix::Zero(d, d), hroot_inv = RealMatrix::Zero(d, d);
  hroot.topLeftCorner(s, s) = RealMatrix::Identity(s, s);
  hroot_inv.topLeftCorner(s, s) = RealMatrix::Identity(s, s);
  RealVector root_vals(s), inv_vals(s);
  for (int i = 0; i < s; ++i) {
    root_vals[i] = eps[i];
    inv_vals[i] = 1.0 / eps[i];
  }
  hroot.bottomRightCorner(s, s) =
      ops.hq_vecs_ * root_vals.asDiagonal() * ops.hq_vecs_.transpose();
  hroot_inv.bottomRightCorner(s, s) =
      ops.hq_vecs_ * inv_vals.asDiagonal() * ops.hq_vecs_.transpose();

  const RealMatrix p_tilde = hroot * ops.covariance() * hroot;
  const RealMatrix q_tilde = hroot_inv * ops.k_x() * hroot_inv;
  const Matrix p_mixed = w.adjoint() * p_tilde.cast<Complex>() * w.conjugate();
  const Matrix q_mixed = w.transpose() * q_tilde.cast<Complex>() * w;
  weights_ = p_mixed.cwiseProduct(q_mixed.transpose());
  static_term_ = (ops.covariance() * ops.k_x()).trace();
}

double MeanEntropyProduction::at(double t) const {
  if (t == 0.0) return 0.0;
  Complex acc = 0.0;
  const Eigen::Index d = freq_.size();
  Vector phase(d);
  for (Eigen::Index a = 0; a < d; ++a) phase[a] = std::exp(Complex(0.0, -t * freq_[a]));
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) acc += phase[a] * phase[b] * weights_(a, b);
  return (static_term_ - acc.real()) / (2.0 * t);
}

ExtReal chain_gc_gplus_t(const ChainOperators& ops, double t, double y_l, double y_r,
                         double freeze_time) {
  const RealMatrix e_star = ops.propagator(freeze_time);
  RealMatrix d_plus = e_star * ops.covariance() * e_star.transpose();
  d_plus = 0.5 * (d_plus + d_plus.transpose());
  const RealMatrix ky = ops.k_of(y_l, y_r);
  const RealMatrix e = ops.propagator(t);
  const RealMatrix a = e.transpose() * ky * e - ky;
  return gaussian_log_det(d_plus, a);
}

ExtReal chain_g_closed(double beta, double x_l, double x_r, double y_l, double y_r) {
  const double dy = y_r - y_l;
  const double dx = x_r - x_l;
  const double arg = 1.0 + dy * (dx - dy) / ((beta - x_r) * (beta - x_l));
  if (arg <= 0.0) return ExtReal::pos_infinity();
  return ExtReal(-chain_kappa() * std::log(arg));
}

ExtReal chain_e_closed(double t_left, double t_right, double alpha) {
  const double ratio = (t_left - t_right) * (t_left - t_right) / (t_left * t_right);
  const double arg = 1.0 + ratio * alpha * (1.0 - alpha);
  if (arg <= 0.0) return ExtReal::pos_infinity();
  return ExtReal(-chain_kappa() * std::log(arg));
}

ChainSteady chain_steady(double beta_l, double beta_r) {
  const double t_left = 1.0 / beta_l, t_right = 1.0 / beta_r;
  ChainSteady out;
  out.flux = chain_kappa() * (t_left - t_right);
  out.entropy_production =
      chain_kappa() * (t_left - t_right) * (t_left - t_right) / (t_left * t_right);
  out.clt_d11 = chain_kappa() * (t_left * t_left + t_right * t_right);
  out.clt_d12 = -out.clt_d11;
  return out;
}

ChainRatePoint chain_rate(double beta, double x_l, double x_r, double theta) {
  const double beta0 = beta - 0.5 * (x_l + x_r);
  const double delta = 0.5 * (x_l - x_r);
  const double sh = std::sinh(0.5 * theta);
  const double rate =
      chain_kappa() * (2.0 * sh * sh - (delta / beta0) * std::sinh(theta) -
                       std::log((1.0 - delta * delta / (beta0 * beta0)) *
                                std::cosh(0.5 * theta) * std::cosh(0.5 * theta)));
  ChainRatePoint out;
  out.s_l = chain_kappa() / beta0 * std::sinh(theta);
  out.s_r = -out.s_l;
  out.rate = rate;
  return out;
}

Matrix chain_onshell_s(double k, int n) {
  Matrix s = Matrix::Zero(2, 2);
  const Complex phase = std::exp(Complex(0.0, 2.0 * k * n));
  s(0, 1) = phase;
  s(1, 0) = phase;
  return s;
}

}  // namespace entroflux
