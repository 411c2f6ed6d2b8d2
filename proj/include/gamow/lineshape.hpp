#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gamow/core.hpp"

namespace gamow {

/// Sampled data: strictly increasing abscissae (energy or time) with real or
/// complex values. Real series carry zero imaginary parts and
/// complex_values == false.
struct Series {
  std::vector<double> x;
  std::vector<cplx> y;
  std::string label;
  bool complex_values = false;

  std::size_t size() const noexcept { return x.size(); }
  std::vector<double> real_values() const;

  /// Throws InvalidArgument if lengths differ or x is not strictly increasing.
  void validate() const;
};

struct UniformGrid {
  double start = 0.0;
  double stop = 1.0;
  int points = 2;
};

/// x_i = start + i (stop - start) / (points - 1); the last point is stop.
/// Throws BadGrid unless points >= 2 and stop > start.
std::vector<double> grid_points(const UniformGrid& grid);

Series sample_series(const std::function<double(double)>& f, const UniformGrid& grid,
                     std::string label = {});
Series sample_complex_series(const std::function<cplx(double)>& f, const UniformGrid& grid,
                     std::string label = {});

/// 1 / (E - z)^m for m >= 1. Throws DivergentPoint if |E - z| < 1e-300.
cplx pole_term(double energy, cplx z, int m);

/// Breit-Wigner density (Gamma / 2 pi) / ((E - E_R)^2 + Gamma^2 / 4).
double lorentzian(double energy, double resonance_energy, double width);

/// k-th derivative of the Breit-Wigner density with respect to E:
///   -(1/pi) Im[(-1)^k k! / (E - z_R)^(k+1)].
/// Differentiating in E_R instead flips the sign for odd k.
double lorentzian_derivative(double energy, double resonance_energy, double width, int k);

/// sum_k weights[k] * lorentzian_derivative(E, E_R, Gamma, k). The weights are
/// free inputs; at most pole.order() of them (derivatives up to r - 1).
/// The result is not clamped and may be negative.
double higher_order_lineshape(double energy, const ComplexPole& pole,
                              std::span<const double> weights);

}  // namespace gamow
