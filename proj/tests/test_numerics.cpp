#include <doctest.h>

#include <cmath>

#include "entroflux/numerics.hpp"
#include "entroflux/random.hpp"

using namespace entroflux;

namespace {

Matrix pauli(int k) {
  Matrix m(2, 2);
  switch (k) {
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

}  // namespace

TEST_CASE("eigendecomposition basics") {
  HermitianOperator sz(pauli(3));
  CHECK(sz.spectral().eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(sz.spectral().eigenvalues[1] == doctest::Approx(1.0));

  HermitianOperator sx(pauli(1));
  CHECK(sx.spectral().eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(sx.spectral().eigenvalues[1] == doctest::Approx(1.0));

  Rng rng(11);
  HermitianOperator a(rng.hermitian(8));
  const auto& dec = a.spectral();
  CHECK((dec.reconstruct() - a.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(dec.unitarity_defect() < 1e-10);
  for (int i = 0; i + 1 < 8; ++i) CHECK(dec.eigenvalues[i] <= dec.eigenvalues[i + 1]);
}

TEST_CASE("eigenvector phase fixing is stable") {
  Rng rng(5);
  Matrix m = rng.hermitian(6);
  HermitianOperator a(m), b(m);
  CHECK((a.spectral().eigenvectors - b.spectral().eigenvectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("non-Hermitian input rejected") {
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  CHECK_THROWS_AS(HermitianOperator{m}, NonHermitianError);
}

TEST_CASE("matfun on diagonal matrices") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 0.0;
  d(1, 1) = std::log(2.0);
  HermitianOperator a(d);
  Matrix e = matfun(a, [](double x) { return std::exp(x); }).matrix();
  CHECK(e(0, 0).real() == doctest::Approx(1.0));
  CHECK(e(1, 1).real() == doctest::Approx(2.0));

  Matrix p = Matrix::Zero(2, 2);
  p(0, 0) = 4.0;
  p(1, 1) = 9.0;
  Matrix r = matfun(HermitianOperator(p), [](double x) { return std::sqrt(x); }).matrix();
  CHECK(r(0, 0).real() == doctest::Approx(2.0));
  CHECK(r(1, 1).real() == doctest::Approx(3.0));
}

TEST_CASE("matfun log/exp round trip on a density matrix support") {
  Rng rng(3);
  Matrix rho = rng.faithful_density(4);
  HermitianOperator a(rho);
  HermitianOperator lg = matfun(a, OperatorFunction([](double x) { return std::log(x); }, "log",
                                                    OperatorFunction::Policy::Error, 1e-300));
  Matrix back = matfun(lg, [](double x) { return std::exp(x); }).matrix();
  CHECK((back - rho).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("domain policy") {
  Matrix d = Matrix::Zero(2, 2);
  d(1, 1) = 1.0;
  HermitianOperator a(d);
  OperatorFunction bad([](double x) { return std::log(x); }, "log", OperatorFunction::Policy::Error,
                       1e-30);
  CHECK_THROWS_AS(matfun(a, bad), DomainError);
  OperatorFunction clamped([](double x) { return std::log(x); }, "log",
                           OperatorFunction::Policy::Clamp, 1e-30);
  CHECK_NOTHROW(matfun(a, clamped));
}

TEST_CASE("schatten norms") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = -4.0;
  CHECK(schatten_norm(d, 1.0) == doctest::Approx(7.0));
  CHECK(schatten_norm(d, std::numeric_limits<double>::infinity()) == doctest::Approx(4.0));
  CHECK_THROWS_AS(schatten_norm(d, 0.5), BadExponentError);

  // p -> ||A||_p is monotonically decreasing.
  Rng rng(17);
  Matrix a = rng.ginibre(5);
  double prev = schatten_norm(a, 1.0);
  for (double p : {1.5, 2.0, 4.0, std::numeric_limits<double>::infinity()}) {
    const double cur = schatten_norm(a, p);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("partial trace") {
  Rng rng(23);
  Matrix a = rng.hermitian(2);
  Matrix b = rng.hermitian(3);
  Matrix ab = kron(a, b);
  // tr_2(A (x) B) = tr(B) A
  Matrix red = partial_trace(ab, {2, 3}, {0});
  CHECK((red - b.trace() * a).cwiseAbs().maxCoeff() < 1e-12);

  // tr_1(rho_ch (x) rho) = rho
  Matrix rho = rng.density(3);
  Matrix chaotic = Matrix::Identity(2, 2) / 2.0;
  Matrix red2 = partial_trace(kron(chaotic, rho), {2, 3}, {1});
  CHECK((red2 - rho).cwiseAbs().maxCoeff() < 1e-12);

  // trace preservation on a random bipartite state
  Matrix big = rng.density(6);
  Matrix red3 = partial_trace(big, {2, 3}, {0});
  CHECK(std::abs(red3.trace().real() - 1.0) < 1e-12);

  // duality: tr(tr_2(A) X) = tr(A (X (x) 1))
  Matrix x = rng.hermitian(2);
  const Complex lhs = (partial_trace(ab, {2, 3}, {0}) * x).trace();
  const Complex rhs = (ab * kron(x, Matrix::Identity(3, 3))).trace();
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("evolve") {
  HermitianOperator h(pauli(3));
  Matrix a = pauli(1);
  // e^{i pi sz} = -1, so conjugation at t = pi is trivial.
  Matrix at = evolve(a, h, M_PI);
  CHECK((at - a).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((evolve(a, h, 0.0) - a).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(7);
  HermitianOperator hr(rng.hermitian(5));
  Matrix ar = rng.ginibre(5);
  const double s = 0.7, t = 1.3;
  Matrix two_steps = evolve(evolve(ar, hr, s), hr, t);
  Matrix one_step = evolve(ar, hr, s + t);
  CHECK((two_steps - one_step).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("tensor embed") {
  Matrix sz = pauli(3);
  std::vector<int> dims = {2, 2};
  Matrix a = tensor_embed({{sz, 0}}, dims);
  Matrix b = tensor_embed({{sz, 1}}, dims);
  CHECK(commutator_norm(a, b) < 1e-14);

  Rng rng(9);
  Matrix x = rng.hermitian(2);
  Matrix y = rng.hermitian(3);
  Matrix ex = tensor_embed({{x, 0}}, {2, 3});
  Matrix ey = tensor_embed({{y, 1}}, {2, 3});
  CHECK(std::abs((ex * ey).trace() - x.trace() * y.trace()) < 1e-12);

  // spectrum of A (x) 1 is sp(A) with multiplicity
  HermitianOperator hx(x);
  HermitianOperator hex(ex);
  const auto& se = hex.spectral().eigenvalues;
  const auto& sx = hx.spectral().eigenvalues;
  std::vector<double> expect;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) expect.push_back(sx[i]);
  std::sort(expect.begin(), expect.end());
  for (int i = 0; i < 6; ++i) CHECK(se[i] == doctest::Approx(expect[i]).epsilon(1e-10));

  // two-slot embedding agrees with a kron + identity layout
  Matrix v = rng.hermitian(6);
  Matrix emb = tensor_embed_pair(v, 0, 1, {2, 3, 2});
  Matrix expect2 = kron(v, Matrix::Identity(2, 2));
  CHECK((emb - expect2).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("Hoelder and Minkowski") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = rng.ginibre(5);
    Matrix b = rng.ginibre(5);
    const double p = 1.0 + 4.0 * rng.uniform();
    const double q = p / (p - 1.0);
    CHECK(schatten_norm(a * b, 1.0) <=
          schatten_norm(a, p) * schatten_norm(b, q) * (1.0 + 1e-12) + 1e-12);
    const double pm = 1.0 + 9.0 * rng.uniform();
    CHECK(schatten_norm(a + b, pm) <=
          schatten_norm(a, pm) + schatten_norm(b, pm) + 1e-12);
  }
}

TEST_CASE("adjoint norm identity and AB-BA") {
  Rng rng(33);
  Matrix a = rng.ginibre(4);
  for (double p : {1.0, 2.0, 3.5}) {
    CHECK(schatten_norm(a, p) == doctest::Approx(schatten_norm(Matrix(a.adjoint()), p)));
  }
  Matrix ha = rng.hermitian(4), hb = rng.hermitian(4);
  for (double p : {1.0, 2.0, 3.5})
    CHECK(schatten_norm(ha * hb, p) == doctest::Approx(schatten_norm(hb * ha, p)));
}

TEST_CASE("Lie product formula converges") {
  Rng rng(41);
  const double inf = std::numeric_limits<double>::infinity();
  Matrix a = rng.hermitian(4);
  Matrix b = rng.hermitian(4);
  a /= schatten_norm(a, inf);
  b /= schatten_norm(b, inf);
  Matrix target = hermitian_exp(a + b);
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {1, 2, 4, 8, 16, 32, 64}) {
    Matrix ea = hermitian_exp(a / n);
    Matrix eb = hermitian_exp(b / n);
    Matrix prod = Matrix::Identity(4, 4);
    for (int k = 0; k < n; ++k) prod = prod * (ea * eb);
    const double err = schatten_norm(prod - target, std::numeric_limits<double>::infinity());
    CHECK(err <= prev * (1.0 + 1e-9));
    prev = err;
  }
  CHECK(prev < 5e-2);
}

TEST_CASE("Araki-Lieb-Thirring sequence decreases to tr e^{A+B}") {
  Rng rng(43);
  Matrix a = rng.hermitian(4), b = rng.hermitian(4);
  const double limit = std::exp(log_tr_exp(a + b));
  double prev = std::numeric_limits<double>::infinity();
  for (double p : {1.0, 2.0, 4.0, 8.0, 64.0}) {
    Matrix prod = hermitian_exp(b / p) * hermitian_exp(a / p);
    const double val = std::pow(schatten_norm(prod, p), p);
    CHECK(val <= prev * (1.0 + 1e-10));
    CHECK(val >= limit - 1e-10);
    prev = val;
  }
  CHECK(prev == doctest::Approx(limit).epsilon(1e-2));
}

TEST_CASE("partial trace over middle factors and unsorted keep sets") {
  Rng rng(47);
  Matrix a = rng.hermitian(2), b = rng.hermitian(3), c = rng.hermitian(2);
  Matrix abc = kron(kron(a, b), c);
  // tracing out the middle factor leaves tr(B) * A (x) C
  Matrix kept = partial_trace(abc, {2, 3, 2}, {0, 2});
  CHECK((kept - b.trace() * kron(a, c)).cwiseAbs().maxCoeff() < 1e-12);
  // keep order does not matter, slots come back in slot order
  Matrix kept2 = partial_trace(abc, {2, 3, 2}, {2, 0});
  CHECK((kept - kept2).cwiseAbs().maxCoeff() == 0.0);
  // duality on the kept pair
  Matrix x = rng.hermitian(4);
  const Complex lhs = (kept * x).trace();
  const Complex rhs = (abc * tensor_embed_pair(x, 0, 2, {2, 3, 2})).trace();
  CHECK(std::abs(lhs - rhs) < 1e-12);

  CHECK_THROWS_AS(partial_trace(abc, {2, 3}, {0}), DimensionMismatchError);
  CHECK_THROWS_AS(partial_trace(abc, {2, 3, 2}, {0, 0}), DimensionMismatchError);
}
