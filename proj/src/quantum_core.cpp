#include "qbc/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qbc {
namespace {

bool is_hermitian(const Matrix2& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os << what << " (got " << value << ")";
  return os.str();
}

}  // namespace

void require_bit(Bit b, const char* what) {
  if (b > 1) throw ValidationError(std::string(what) + " must be 0 or 1");
}

void StateGeometry::validate() const {
  if (!(theta > 0.0 && theta < std::numbers::pi / 2))
    throw ValidationError(describe("theta must lie in (0, pi/2)", theta));
  if (!std::isfinite(phi)) throw ValidationError("phi must be finite");
}

PureState::PureState(Complex amplitude0, Complex amplitude1) : v_(amplitude0, amplitude1) {
  const double norm = std::norm(amplitude0) + std::norm(amplitude1);
  if (std::abs(norm - 1.0) > tolerance::kNormalization)
    throw ValidationError(describe("pure state is not normalized", norm));
}

PureState PureState::zero() { return PureState(1.0, 0.0); }
PureState PureState::zero_perp() { return PureState(0.0, 1.0); }

PureState PureState::one(double theta, double phi) {
  return PureState(std::cos(theta), std::polar(std::sin(theta), phi));
}

PureState PureState::one_perp(double theta, double phi) {
  return PureState(std::sin(theta), -std::polar(std::cos(theta), phi));
}

PureState PureState::prepared(Bit b, const StateGeometry& g) {
  require_bit(b, "prepared bit");
  return b == 0 ? zero() : one(g.theta, g.phi);
}

DensityMatrix::DensityMatrix(const Matrix2& entries) : m_(entries) {
  if (!is_hermitian(m_, tolerance::kHermitian)) throw ValidationError("density matrix is not Hermitian");
  const Complex tr = m_.trace();
  if (std::abs(tr - 1.0) > tolerance::kTrace) throw ValidationError(describe("density matrix trace != 1", tr.real()));
  if (eigenvalues()[0] < -tolerance::kEigenvalue)
    throw ValidationError(describe("density matrix has a negative eigenvalue", eigenvalues()[0]));
}

DensityMatrix DensityMatrix::maximally_mixed() { return diagonal(0.5); }

DensityMatrix DensityMatrix::diagonal(double p0) {
  Matrix2 m = Matrix2::Zero();
  m(0, 0) = p0;
  m(1, 1) = 1.0 - p0;
  return DensityMatrix(m);
}

std::array<double, 2> DensityMatrix::eigenvalues() const {
  const double a = m_(0, 0).real();
  const double d = m_(1, 1).real();
  const double half_gap = 0.5 * (a - d);
  const double radius = std::sqrt(half_gap * half_gap + std::norm(m_(0, 1)));
  const double mean = 0.5 * (a + d);
  return {mean - radius, mean + radius};
}

DensityMatrix density_from_pure(const PureState& psi) {
  return DensityMatrix(psi.vector() * psi.vector().adjoint());
}

KrausChannel::KrausChannel(std::vector<Matrix2> operators) {
  ops_.reserve(operators.size());
  for (auto& k : operators)
    if (k.norm() > 0.0) ops_.push_back(std::move(k));
  Matrix2 sum = Matrix2::Zero();
  for (const auto& k : ops_) sum += k.adjoint() * k;
  const double err = (sum - Matrix2::Identity()).cwiseAbs().maxCoeff();
  if (err > tolerance::kCompleteness) throw ValidationError(describe("Kraus set is not complete", err));
}

KrausChannel KrausChannel::identity() { return KrausChannel({Matrix2::Identity()}); }
KrausChannel KrausChannel::unitary(const Matrix2& u) { return KrausChannel({u}); }

KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner) {
  std::vector<Matrix2> ops;
  ops.reserve(outer.operators().size() * inner.operators().size());
  for (const auto& k : outer.operators())
    for (const auto& l : inner.operators()) ops.push_back(k * l);
  return KrausChannel(std::move(ops));
}

KrausChannel compose(std::initializer_list<KrausChannel> outer_to_inner) {
  KrausChannel result = KrausChannel::identity();
  for (const auto& ch : outer_to_inner) result = compose(result, ch);
  return result;
}

DensityMatrix apply_channel(const KrausChannel& channel, const DensityMatrix& rho) {
  Matrix2 out = Matrix2::Zero();
  for (const auto& k : channel.operators()) out += k * rho.entries() * k.adjoint();
  // Remove rounding asymmetry before revalidation.
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(out);
}

MeasurementBasis::MeasurementBasis(const Matrix2& projector0, const Matrix2& projector1)
    : p0_(projector0), p1_(projector1) {
  for (const Matrix2* p : {&p0_, &p1_}) {
    if (!is_hermitian(*p, tolerance::kProjector)) throw ValidationError("projector is not Hermitian");
    if (((*p) * (*p) - *p).cwiseAbs().maxCoeff() > tolerance::kProjector)
      throw ValidationError("projector is not idempotent");
  }
  if ((p0_ + p1_ - Matrix2::Identity()).cwiseAbs().maxCoeff() > tolerance::kProjector)
    throw ValidationError("projectors do not resolve the identity");
}

MeasurementBasis MeasurementBasis::from_states(const PureState& outcome0, const PureState& outcome1) {
  return MeasurementBasis(outcome0.vector() * outcome0.vector().adjoint(),
                          outcome1.vector() * outcome1.vector().adjoint());
}

const Matrix2& MeasurementBasis::projector(Bit outcome) const {
  require_bit(outcome, "outcome");
  return outcome == 0 ? p0_ : p1_;
}

MeasurementBasis commitment_observable(Bit c, const StateGeometry& g) {
  require_bit(c, "commitment");
  if (c == 0) return MeasurementBasis::from_states(PureState::zero(), PureState::zero_perp());
  return MeasurementBasis::from_states(PureState::one_perp(g.theta, g.phi), PureState::one(g.theta, g.phi));
}

double measure_probability(const DensityMatrix& rho, const MeasurementBasis& basis, Bit outcome) {
  const double p = (basis.projector(outcome) * rho.entries()).trace().real();
  return std::clamp(p, 0.0, 1.0);
}

Bit born_sample(const DensityMatrix& rho, const MeasurementBasis& basis, Rng& rng) {
  return rng.uniform() < measure_probability(rho, basis, 0) ? Bit{0} : Bit{1};
}

Matrix2 pauli_x() {
  Matrix2 m;
  m << 0, 1, 1, 0;
  return m;
}

Matrix2 pauli_y() {
  Matrix2 m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Matrix2 pauli_z() {
  Matrix2 m;
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace qbc
