#ifndef ENTROFLUX_RANDOM_HPP
#define ENTROFLUX_RANDOM_HPP

#include <random>

#include "entroflux/types.hpp"

namespace entroflux {

// Seeded generators for reproducible property tests. All sampling goes
// through a caller-owned engine; nothing here keeps global state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();
  Complex complex_normal();

  Matrix ginibre(int n);              // iid complex Gaussian entries
  Matrix hermitian(int n);            // GUE-normalised Hermitian sample
  RealMatrix real_symmetric(int n);
  Matrix unitary(int n);              // Haar via QR with phase fixing
  Matrix density(int n);              // Hilbert-Schmidt measure, GG*/tr
  Matrix faithful_density(int n, double floor = 1e-3);
  RealMatrix real_density(int n);     // real symmetric unit-trace positive
  Matrix projection(int n, int rank);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace entroflux

#endif
