#include "gamow/core.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gamow {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ArrowOfTimeViolation: return "ArrowOfTimeViolation";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::DivergentPoint: return "DivergentPoint";
    case ErrorCode::WeightLengthMismatch: return "WeightLengthMismatch";
    case ErrorCode::BadGrid: return "BadGrid";
    case ErrorCode::NoSignal: return "NoSignal";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::AllFitsFailed: return "AllFitsFailed";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

ComplexPole::ComplexPole(double energy, double width, int order)
    : energy_(energy), width_(width), order_(order) {
  if (!std::isfinite(energy) || !std::isfinite(width)) {
    throw Error(ErrorCode::InvalidArgument, "pole energy and width must be finite");
  }
  if (!(width > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "pole width must be > 0 (pole strictly below the real axis)");
  }
  if (order < 1) {
    throw Error(ErrorCode::InvalidArgument, "pole order must be >= 1");
  }
}

cplx pole_position(const ComplexPole& pole) { return pole.position(); }

GamowState::GamowState(ComplexPole pole, CVector coeffs)
    : pole_(pole), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != pole_.order()) {
    throw Error(ErrorCode::InvalidArgument,
                "state has " + std::to_string(coeffs_.size()) +
                    " coefficients but the pole has order " + std::to_string(pole_.order()));
  }
}

GamowState GamowState::basis(const ComplexPole& pole, int k) {
  if (k < 0 || k >= pole.order()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "basis index " + std::to_string(k) + " outside 0.." +
                    std::to_string(pole.order() - 1));
  }
  CVector c = CVector::Zero(pole.order());
  c(k) = 1.0;
  return {pole, std::move(c)};
}

GamowState GamowState::zero(const ComplexPole& pole) {
  return {pole, CVector::Zero(pole.order())};
}

GamowOperator::GamowOperator(ComplexPole pole, CMatrix matrix)
    : pole_(pole), matrix_(std::move(matrix)) {
  if (matrix_.rows() != pole_.order() || matrix_.cols() != pole_.order()) {
    throw Error(ErrorCode::InvalidArgument,
                "operator matrix must be " + std::to_string(pole_.order()) + "x" +
                    std::to_string(pole_.order()));
  }
}

GamowOperator GamowOperator::dyad(const ComplexPole& pole, int k, int l) {
  const int r = pole.order();
  if (k < 0 || k >= r || l < 0 || l >= r) {
    throw Error(ErrorCode::IndexOutOfRange, "dyad index outside the pole subspace");
  }
  CMatrix m = CMatrix::Zero(r, r);
  m(k, l) = 1.0;
  return {pole, std::move(m)};
}

TimeGrid::TimeGrid(double t0, double dt, int steps) : t0_(t0), dt_(dt), steps_(steps) {
  if (!std::isfinite(t0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::InvalidArgument, "time grid values must be finite");
  }
  if (t0 < 0.0) {
    throw Error(ErrorCode::ArrowOfTimeViolation,
                "time grid must start at t >= 0 (semigroup domain)");
  }
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be > 0");
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "time grid needs steps >= 1");
}

TimeGrid TimeGrid::span(double t_max, int steps) {
  if (t_max < 0.0) {
    throw Error(ErrorCode::ArrowOfTimeViolation,
                "t-max must satisfy t >= 0 (semigroup domain)");
  }
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "time grid needs steps >= 1");
  return {0.0, t_max / steps, steps};
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(size());
  for (int i = 0; i <= steps_; ++i) out[static_cast<std::size_t>(i)] = at(i);
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "binomial requires n >= 0");
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  // After step i the accumulator holds C(n - k + i, i), so the division is exact.
  unsigned __int128 acc = 1;
  for (int i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (acc > std::numeric_limits<std::uint64_t>::max()) {
      throw Error(ErrorCode::Overflow,
                  "C(" + std::to_string(n) + "," + std::to_string(k) +
                      ") exceeds the exact 64-bit range");
    }
  }
  return static_cast<std::uint64_t>(acc);
}

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace gamow
