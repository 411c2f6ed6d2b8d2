#pragma once

#include <span>
#include <vector>

#include "gamow/core.hpp"

namespace gamow {

/// W^(n) = sum_k C(n, k) |k><n-k|: entry (k, n-k) holds C(n, k).
/// Requires 0 <= n < pole.order(), otherwise IndexOutOfRange.
GamowOperator build_density(const ComplexPole& pole, int n);

/// W(t) = U(t) W U(t)^dagger with the closed-form semigroup U(t); kets evolve
/// on the left and bras by the conjugate action on the right. Evaluated in
/// extended precision because the polynomial terms cancel for W^(n).
GamowOperator evolve_density(const GamowOperator& w, double t);

struct ExponentialCheck {
  bool is_exponential = true;
  double max_deviation = 0.0;  ///< max over t of max-entry |e^{Gamma t} W(t) - W(0)|
  double worst_time = 0.0;
};

/// Tests W(t) = e^{-Gamma t} W(0) over the sample times. Throws EmptyGrid for
/// an empty time list and InvalidArgument unless tol > 0.
ExponentialCheck check_exponential(const GamowOperator& w0, std::span<const double> times,
                                   double tol);
ExponentialCheck check_exponential(const GamowOperator& w0, const TimeGrid& grid, double tol);

inline constexpr double kDefaultRankTolerance = 1e-10;

struct ExponentialSubspace {
  /// Canonical basis: reduced echelon form with unknowns ordered by
  /// anti-diagonal k + l, so member n is normalised to 1 on |0><n|.
  /// Entries below tol times the member's largest entry are set to zero.
  std::vector<GamowOperator> basis;
  /// Singular values of the constraint system, descending.
  Eigen::VectorXd singular_values;
  Eigen::Index constraint_rows = 0;
};

/// All operators sum c_kl |k><l| whose evolution is purely exponential.
///
/// e^{Gamma t} W(t) is a polynomial of degree <= 2(r-1) in t whose
/// coefficients are linear in c. It is sampled at 2r+1 Chebyshev nodes on
/// t in [0, 2], expanded in Chebyshev polynomials of s = t - 1, and every
/// non-constant coefficient is required to vanish. The solution space is the
/// SVD nullspace of that system with singular values <= tol * sigma_max.
ExponentialSubspace exponential_subspace_report(const ComplexPole& pole,
                                                double tol = kDefaultRankTolerance);
std::vector<GamowOperator> exponential_subspace(const ComplexPole& pole,
                                                double tol = kDefaultRankTolerance);

/// ||W - P W||_F / ||W||_F where P projects onto span(basis) in the
/// Frobenius inner product. Zero W gives 0; an empty basis gives 1.
double projection_residual(const std::vector<GamowOperator>& basis, const GamowOperator& w);

/// Number of singular values above rel_tol * sigma_max.
int numerical_rank(const CMatrix& m, double rel_tol = kDefaultRankTolerance);

/// max-entry |M - M^dagger|.
double hermiticity_defect(const CMatrix& m);

}  // namespace gamow
