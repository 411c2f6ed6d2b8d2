#include "gamow/lineshape.hpp"

#include <cmath>
#include <numbers>

namespace gamow {

namespace {

// Plain repeated multiplication keeps conj(w)^m == conj(w^m) bit for bit,
// which the parity relations of the line shapes rely on.
cplx integer_power(cplx w, int m) {
  cplx out(1.0);
  for (int i = 0; i < m; ++i) out *= w;
  return out;
}

void require_width(double width) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw Error(ErrorCode::InvalidArgument, "line width must be finite and > 0");
  }
}

}  // namespace

std::vector<double> Series::real_values() const {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i].real();
  return out;
}

void Series::validate() const {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::InvalidArgument, "series abscissae and values differ in length");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) {
      throw Error(ErrorCode::InvalidArgument,
                  "series abscissae must be strictly increasing (row " + std::to_string(i) + ")");
    }
  }
}

std::vector<double> grid_points(const UniformGrid& grid) {
  if (grid.points < 2 || !(grid.stop > grid.start) || !std::isfinite(grid.start) ||
      !std::isfinite(grid.stop)) {
    throw Error(ErrorCode::BadGrid, "grid needs points >= 2 and finite stop > start");
  }
  const double step = (grid.stop - grid.start) / (grid.points - 1);
  std::vector<double> x(static_cast<std::size_t>(grid.points));
  for (int i = 0; i < grid.points; ++i) x[i] = grid.start + i * step;
  x.back() = grid.stop;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw Error(ErrorCode::BadGrid, "grid spacing below resolution");
  }
  return x;
}

Series sample_series(const std::function<double(double)>& f, const UniformGrid& grid,
                     std::string label) {
  Series s;
  s.x = grid_points(grid);
  s.y.reserve(s.x.size());
  for (const double x : s.x) s.y.emplace_back(f(x), 0.0);
  s.label = std::move(label);
  return s;
}

Series sample_complex_series(const std::function<cplx(double)>& f, const UniformGrid& grid,
                     std::string label) {
  Series s;
  s.x = grid_points(grid);
  s.y.reserve(s.x.size());
  for (const double x : s.x) s.y.push_back(f(x));
  s.label = std::move(label);
  s.complex_values = true;
  return s;
}

cplx pole_term(double energy, cplx z, int m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "pole term power must be >= 1");
  const cplx w = energy - z;
  if (std::abs(w) < 1e-300) {
    throw Error(ErrorCode::DivergentPoint, "evaluation point coincides with the pole");
  }
  return integer_power(1.0 / w, m);
}

double lorentzian(double energy, double resonance_energy, double width) {
  require_width(width);
  const double d = energy - resonance_energy;
  return (width / (2.0 * std::numbers::pi)) / (d * d + 0.25 * width * width);
}

double lorentzian_derivative(double energy, double resonance_energy, double width, int k) {
  require_width(width);
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 0");
  double factorial = 1.0;
  for (int i = 2; i <= k; ++i) factorial *= i;
  const cplx term = pole_term(energy, cplx(resonance_energy, -0.5 * width), k + 1);
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return -(sign * factorial * term.imag()) / std::numbers::pi;
}

double higher_order_lineshape(double energy, const ComplexPole& pole,
                              std::span<const double> weights) {
  if (weights.empty() || weights.size() > static_cast<std::size_t>(pole.order())) {
    throw Error(ErrorCode::WeightLengthMismatch,
                "need between 1 and " + std::to_string(pole.order()) + " weights, got " +
                    std::to_string(weights.size()));
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] == 0.0) continue;
    sum += weights[k] *
           lorentzian_derivative(energy, pole.energy(), pole.width(), static_cast<int>(k));
  }
  return sum;
}

}  // namespace gamow
