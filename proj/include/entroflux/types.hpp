#ifndef ENTROFLUX_TYPES_HPP
#define ENTROFLUX_TYPES_HPP

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace entroflux {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace defaults {
// Hermiticity tolerance, relative to the largest matrix entry.
inline constexpr double htol = 1e-12;
// Reconstruction tolerance for spectral decompositions.
inline constexpr double rtol = 1e-10;
// Kernel threshold: eigenvalues below ktol * lambda_max count as zero.
inline constexpr double ktol = 1e-12;
// Commutation tolerance for families of observables.
inline constexpr double ctol = 1e-10;
// Atom binning tolerance (scaled by the value magnitude).
inline constexpr double btol = 1e-9;
// Default absolute tolerance for time-integral node doubling.
inline constexpr double quad_atol = 1e-9;
}  // namespace defaults

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonHermitianError : Error {
  double defect;
  explicit NonHermitianError(double d)
      : Error("matrix fails Hermiticity check, defect = " + std::to_string(d)), defect(d) {}
};

struct DimensionMismatchError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct BadExponentError : Error {
  using Error::Error;
};

struct BadProbabilityError : Error {
  using Error::Error;
};

struct NonCommutingFamilyError : Error {
  double defect;
  explicit NonCommutingFamilyError(double d)
      : Error("family is not commuting, max defect = " + std::to_string(d)), defect(d) {}
};

struct NonFaithfulDensityError : Error {
  using Error::Error;
};

struct QuadratureFailureError : Error {
  double estimated_error;
  explicit QuadratureFailureError(double e)
      : Error("quadrature failed to reach tolerance, estimate = " + std::to_string(e)),
        estimated_error(e) {}
};

struct StepSelectionFailureError : Error {
  using Error::Error;
};

struct DimensionTooLargeError : Error {
  using Error::Error;
};

struct GaugeViolationError : Error {
  using Error::Error;
};

struct ZeroTimeError : Error {
  using Error::Error;
};

// Extended real line with explicit sentinels. Floating infinities never
// enter matrix code; support-condition branches test the tag instead.
class ExtReal {
 public:
  ExtReal() : value_(0.0), tag_(Tag::Finite) {}
  ExtReal(double v) : value_(v), tag_(Tag::Finite) {}  // NOLINT(google-explicit-constructor)

  static ExtReal neg_infinity() { return ExtReal(Tag::NegInf); }
  static ExtReal pos_infinity() { return ExtReal(Tag::PosInf); }

  bool finite() const { return tag_ == Tag::Finite; }
  bool is_neg_infinity() const { return tag_ == Tag::NegInf; }
  bool is_pos_infinity() const { return tag_ == Tag::PosInf; }

  double value() const {
    if (!finite()) throw DomainError("ExtReal: value() on an infinite sentinel");
    return value_;
  }
  // Collapses to a floating representation (used only at output boundaries).
  double as_double() const {
    if (tag_ == Tag::NegInf) return -std::numeric_limits<double>::infinity();
    if (tag_ == Tag::PosInf) return std::numeric_limits<double>::infinity();
    return value_;
  }

  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    if (a.tag_ != b.tag_) return false;
    return a.tag_ != Tag::Finite || a.value_ == b.value_;
  }

 private:
  enum class Tag { Finite, NegInf, PosInf };
  explicit ExtReal(Tag t) : value_(0.0), tag_(t) {}
  double value_;
  Tag tag_;
};

}  // namespace entroflux

#endif
