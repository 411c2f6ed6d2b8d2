#pragma once

#include "gamow/core.hpp"

namespace gamow {

using cplx_ld = std::complex<long double>;
using CMatrixLD = Eigen::Matrix<cplx_ld, Eigen::Dynamic, Eigen::Dynamic>;

/// Throws ArrowOfTimeViolation unless t >= 0 (NaN is rejected as well).
void require_forward_time(double t);

/// The restricted Hamiltonian on the pole subspace: z_R on the diagonal and
/// H(k-1, k) = k above it, so that H|k> = z_R|k> + k|k-1>.
GamowOperator hamiltonian_matrix(const ComplexPole& pole);

/// Closed-form U(t) = exp(-i H t). Column k holds the evolved |k>:
///   U(k - nu, k) = exp(-i z_R t) * C(k, nu) * (-i t)^nu.
CMatrix evolution_matrix(const ComplexPole& pole, double t);

/// Same as evolution_matrix, evaluated in extended precision. Used where
/// large polynomial terms cancel (density conjugation).
CMatrixLD evolution_matrix_extended(const ComplexPole& pole, double t);

/// exp(-i H t)|k>; only indices <= k are populated.
GamowState evolve_ket(const ComplexPole& pole, int k, double t);

/// Linear extension of evolve_ket to an arbitrary state.
GamowState evolve_state(const GamowState& state, double t);

/// Independent oracle for exp(-i * matrix * t).
///
/// When the matrix is upper triangular with a constant diagonal z (so that
/// matrix = zI + N with N strictly upper triangular, hence nilpotent) the
/// series exp(-izt) * sum_{nu < r} (-it)^nu N^nu / nu! terminates and is
/// summed exactly. Otherwise expm_scaling_squaring is used.
CMatrix expm_oracle(const CMatrix& matrix, double t);

/// exp(-i * matrix * t) by scaling and squaring of a degree-18 Taylor
/// polynomial. The argument is scaled by 2^-s so that its 1-norm is <= 1/2;
/// the truncated tail is then bounded by (1/2)^19 / 19! * 2 < 2e-23 relative
/// to the scaled exponential, well below double rounding.
CMatrix expm_scaling_squaring(const CMatrix& matrix, double t);

}  // namespace gamow
