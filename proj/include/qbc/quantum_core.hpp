#pragma once

// Single-qubit linear algebra in the canonical basis B0 = {|0>, |0perp>}.

#include <Eigen/Core>
#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "qbc/errors.hpp"
#include "qbc/rng.hpp"

namespace qbc {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Vector2 = Eigen::Vector2cd;
using Bit = std::uint8_t;

namespace tolerance {
inline constexpr double kNormalization = 1e-12;
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-12;
inline constexpr double kEigenvalue = 1e-10;
inline constexpr double kCompleteness = 1e-10;
inline constexpr double kProjector = 1e-10;
}  // namespace tolerance

void require_bit(Bit b, const char* what);

// The two non-orthogonal preparation states share the real overlap cos(theta);
// phi is the relative phase of |1> on |0perp>.
struct StateGeometry {
  double theta = 0.78539816339744830962;  // pi/4
  double phi = 0.0;

  void validate() const;
};

class PureState {
 public:
  PureState(Complex amplitude0, Complex amplitude1);

  static PureState zero();
  static PureState zero_perp();
  // cos(theta)|0> + e^{i phi} sin(theta)|0perp>
  static PureState one(double theta, double phi);
  // sin(theta)|0> - e^{i phi} cos(theta)|0perp>
  static PureState one_perp(double theta, double phi);
  // |b> of the protocol for the given geometry.
  static PureState prepared(Bit b, const StateGeometry& g);

  Complex amplitude0() const { return v_(0); }
  Complex amplitude1() const { return v_(1); }
  const Vector2& vector() const { return v_; }

 private:
  explicit PureState(const Vector2& v) : v_(v) {}
  Vector2 v_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(const Matrix2& entries);

  static DensityMatrix maximally_mixed();
  static DensityMatrix diagonal(double p0);

  const Matrix2& entries() const { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }
  // Closed-form eigenvalues of the 2x2 Hermitian matrix, ascending.
  std::array<double, 2> eigenvalues() const;

 private:
  Matrix2 m_;
};

DensityMatrix density_from_pure(const PureState& psi);

class KrausChannel {
 public:
  // Operators with zero Frobenius norm are dropped; completeness is checked.
  explicit KrausChannel(std::vector<Matrix2> operators);

  static KrausChannel identity();
  static KrausChannel unitary(const Matrix2& u);

  const std::vector<Matrix2>& operators() const { return ops_; }

 private:
  std::vector<Matrix2> ops_;
};

// outer o inner: inner acts first. Kraus set is the products K_i L_j.
KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner);
// Rightmost channel acts first, matching the written composition order.
KrausChannel compose(std::initializer_list<KrausChannel> outer_to_inner);

DensityMatrix apply_channel(const KrausChannel& channel, const DensityMatrix& rho);

class MeasurementBasis {
 public:
  MeasurementBasis(const Matrix2& projector0, const Matrix2& projector1);
  // Rank-one projectors onto two orthonormal vectors.
  static MeasurementBasis from_states(const PureState& outcome0, const PureState& outcome1);

  const Matrix2& projector(Bit outcome) const;

 private:
  Matrix2 p0_;
  Matrix2 p1_;
};

// C0 assigns 0 to |0> and 1 to |0perp>; C1 assigns 1 to |1> and 0 to |1perp>.
MeasurementBasis commitment_observable(Bit c, const StateGeometry& g);

double measure_probability(const DensityMatrix& rho, const MeasurementBasis& basis, Bit outcome);
Bit born_sample(const DensityMatrix& rho, const MeasurementBasis& basis, Rng& rng);

// Pauli matrices in B0.
Matrix2 pauli_x();
Matrix2 pauli_y();
Matrix2 pauli_z();

}  // namespace qbc
