#include "gamow/semigroup.hpp"

#include <cmath>
#include <string>

namespace gamow {

namespace {

void require_index(const ComplexPole& pole, int k) {
  if (k < 0 || k >= pole.order()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "index " + std::to_string(k) + " outside 0.." + std::to_string(pole.order() - 1));
  }
}

template <typename Real>
Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> closed_form_evolution(
    const ComplexPole& pole, double t) {
  using C = std::complex<Real>;
  const int r = pole.order();
  const Real time = t;
  const C z(static_cast<Real>(pole.energy()), static_cast<Real>(-0.5) * static_cast<Real>(pole.width()));
  const C phase = std::exp(C(0, -1) * z * time);

  // powers[nu] = (-i t)^nu
  std::vector<C> powers(static_cast<std::size_t>(r));
  powers[0] = C(1);
  for (int nu = 1; nu < r; ++nu) powers[nu] = powers[nu - 1] * C(0, -time);

  Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic> u =
      Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic>::Zero(r, r);
  for (int k = 0; k < r; ++k) {
    for (int nu = 0; nu <= k; ++nu) {
      u(k - nu, k) = phase * static_cast<Real>(binomial(k, nu)) * powers[nu];
    }
  }
  return u;
}

bool is_shifted_nilpotent(const CMatrix& m, cplx& shift) {
  const Eigen::Index r = m.rows();
  shift = m(0, 0);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (m(i, i) != shift) return false;
    for (Eigen::Index j = 0; j < i; ++j) {
      if (m(i, j) != cplx(0.0)) return false;
    }
  }
  return true;
}

void require_finite(const CMatrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

}  // namespace

void require_forward_time(double t) {
  if (!(t >= 0.0)) {
    throw Error(ErrorCode::ArrowOfTimeViolation,
                "evolution is a semigroup: requires t >= 0, got t = " + std::to_string(t));
  }
  if (!std::isfinite(t)) throw Error(ErrorCode::NonFinite, "time must be finite");
}

GamowOperator hamiltonian_matrix(const ComplexPole& pole) {
  const int r = pole.order();
  CMatrix h = CMatrix::Zero(r, r);
  for (int k = 0; k < r; ++k) h(k, k) = pole.position();
  for (int k = 1; k < r; ++k) h(k - 1, k) = static_cast<double>(k);
  return {pole, std::move(h)};
}

CMatrix evolution_matrix(const ComplexPole& pole, double t) {
  require_forward_time(t);
  return closed_form_evolution<double>(pole, t);
}

CMatrixLD evolution_matrix_extended(const ComplexPole& pole, double t) {
  require_forward_time(t);
  return closed_form_evolution<long double>(pole, t);
}

GamowState evolve_ket(const ComplexPole& pole, int k, double t) {
  require_forward_time(t);
  require_index(pole, k);
  const cplx phase = std::exp(cplx(0, -1) * pole.position() * t);
  CVector c = CVector::Zero(pole.order());
  cplx power(1.0);
  for (int nu = 0; nu <= k; ++nu) {
    c(k - nu) = phase * static_cast<double>(binomial(k, nu)) * power;
    power *= cplx(0, -t);
  }
  return {pole, std::move(c)};
}

GamowState evolve_state(const GamowState& state, double t) {
  require_forward_time(t);
  const ComplexPole& pole = state.pole();
  CVector out = CVector::Zero(pole.order());
  for (int k = 0; k < pole.order(); ++k) {
    if (state[k] == cplx(0.0)) continue;
    out += state[k] * evolve_ket(pole, k, t).coeffs();
  }
  return {pole, std::move(out)};
}

CMatrix expm_oracle(const CMatrix& matrix, double t) {
  if (matrix.rows() != matrix.cols()) {
    throw Error(ErrorCode::InvalidArgument, "matrix exponential needs a square matrix");
  }
  require_finite(matrix, "matrix");
  if (!std::isfinite(t)) throw Error(ErrorCode::NonFinite, "time must be finite");
  const Eigen::Index r = matrix.rows();
  if (r == 0) return CMatrix(0, 0);

  cplx z;
  if (!is_shifted_nilpotent(matrix, z)) return expm_scaling_squaring(matrix, t);

  CMatrix nilpotent = matrix;
  nilpotent.diagonal().setZero();
  const cplx step(0.0, -t);
  CMatrix sum = CMatrix::Identity(r, r);
  CMatrix term = CMatrix::Identity(r, r);
  for (Eigen::Index nu = 1; nu < r; ++nu) {
    term = (term * nilpotent) * (step / static_cast<double>(nu));
    sum += term;
  }
  CMatrix out = std::exp(-cplx(0, 1) * z * t) * sum;
  require_finite(out, "matrix exponential");
  return out;
}

CMatrix expm_scaling_squaring(const CMatrix& matrix, double t) {
  if (matrix.rows() != matrix.cols()) {
    throw Error(ErrorCode::InvalidArgument, "matrix exponential needs a square matrix");
  }
  require_finite(matrix, "matrix");
  const Eigen::Index r = matrix.rows();
  CMatrix a = matrix * cplx(0.0, -t);
  require_finite(a, "scaled matrix");

  const double norm1 = r == 0 ? 0.0 : a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  a /= std::ldexp(1.0, squarings);

  constexpr int kDegree = 18;
  // Horner: I + a(I + a/2(I + a/3(...)))
  CMatrix result = CMatrix::Identity(r, r);
  for (int j = kDegree; j >= 1; --j) {
    result = CMatrix::Identity(r, r) + (a * result) / static_cast<double>(j);
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  require_finite(result, "matrix exponential");
  return result;
}

}  // namespace gamow
