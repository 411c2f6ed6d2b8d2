#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gamow/error.hpp"

namespace gamow {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// A resonance pole z_R = E_R - i*Gamma/2 of order r on the decaying sheet.
///
/// Order 1 is the ordinary Gamow vector; order r >= 2 carries a Jordan chain
/// of r generalized vectors. Units: hbar = 1, time is inverse energy.
class ComplexPole {
 public:
  /// Throws InvalidArgument unless Gamma > 0, order >= 1 and both reals are finite.
  ComplexPole(double energy, double width, int order = 1);

  double energy() const noexcept { return energy_; }
  double width() const noexcept { return width_; }
  int order() const noexcept { return order_; }

  /// E_R - i*Gamma/2.
  cplx position() const noexcept { return {energy_, -0.5 * width_}; }

  bool operator==(const ComplexPole&) const = default;

 private:
  double energy_;
  double width_;
  int order_;
};

cplx pole_position(const ComplexPole& pole);

/// Coefficients over the Jordan basis |k>, k = 0..r-1, of the subspace
/// belonging to one pole.
class GamowState {
 public:
  GamowState(ComplexPole pole, CVector coeffs);

  /// The basis vector |k>.
  static GamowState basis(const ComplexPole& pole, int k);
  static GamowState zero(const ComplexPole& pole);

  const ComplexPole& pole() const noexcept { return pole_; }
  const CVector& coeffs() const noexcept { return coeffs_; }
  cplx operator[](int k) const { return coeffs_(k); }

 private:
  ComplexPole pole_;
  CVector coeffs_;
};

/// An operator sum_{k,l} M(k,l) |k><l| on the pole subspace. Bras are the
/// dual basis of the kets, <m|k> = delta_mk.
class GamowOperator {
 public:
  GamowOperator(ComplexPole pole, CMatrix matrix);

  /// The dyad |k><l|.
  static GamowOperator dyad(const ComplexPole& pole, int k, int l);

  const ComplexPole& pole() const noexcept { return pole_; }
  const CMatrix& matrix() const noexcept { return matrix_; }
  int dimension() const noexcept { return pole_.order(); }

 private:
  ComplexPole pole_;
  CMatrix matrix_;
};

/// Uniform forward grid t_i = t0 + i*dt, i = 0..steps (steps + 1 points).
/// Only non-negative times exist on the evolution semigroup.
class TimeGrid {
 public:
  TimeGrid(double t0, double dt, int steps);

  /// Grid covering [0, t_max] with the given number of intervals.
  static TimeGrid span(double t_max, int steps);

  double t0() const noexcept { return t0_; }
  double dt() const noexcept { return dt_; }
  int steps() const noexcept { return steps_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(steps_) + 1; }
  double at(int i) const noexcept { return t0_ + i * dt_; }
  std::vector<double> times() const;

 private:
  double t0_;
  double dt_;
  int steps_;
};

/// Exact binomial coefficient; zero outside 0 <= k <= n. Throws Overflow when
/// the value does not fit in 64 bits (n > 67 for central k).
std::uint64_t binomial(int n, int k);

/// Largest modulus over all entries.
double max_abs(const CMatrix& m);

}  // namespace gamow
