#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gamow/core.hpp"
#include "gamow/lineshape.hpp"

namespace gamow {

/// One pole of the amplitude model: sum_{j=1}^{order} residues[j-1] / (E - z)^j.
struct ModelPole {
  cplx z;
  int order = 1;
  std::vector<cplx> residues;
};

/// a(E) = sum over poles of the Laurent pole terms; the observable is |a(E)|^2.
///
/// This is the minimal pole-term realisation of a higher-order resonance in a
/// cross section; it carries no background and no unitarity constraint.
struct PoleModel {
  std::vector<ModelPole> poles;

  /// Throws InvalidArgument unless every pole has Im z < 0, order >= 1,
  /// residues.size() == order and a nonzero leading residue.
  void validate() const;
  int total_residues() const;
};

struct FitOptions {
  int max_iterations = 500;
  double damping_init = 1e-3;
  /// Bound on max_j |J_j . r| / (|J_j| |r|), the cosine between the residual
  /// and each Jacobian column.
  double tol_grad = 1e-10;
  /// Relative bound on the scaled parameter step.
  double tol_step = 1e-12;

  void validate() const;
};

struct FitResult {
  PoleModel model;
  double residual_rms = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_cosine = 0.0;
  /// Objective sum_i (I(E_i) - y_i)^2 after the start and every accepted step.
  std::vector<double> objective_history;
};

/// Raised when max_iterations is exhausted with the gradient above tol_grad.
/// Carries the last iterate for diagnostics.
class NonConvergenceError : public Error {
 public:
  explicit NonConvergenceError(FitResult partial);
  const FitResult& partial() const noexcept { return partial_; }

 private:
  FitResult partial_;
};

cplx model_amplitude(const PoleModel& model, double energy);
double model_intensity(const PoleModel& model, double energy);

namespace detail {

/// The least-squares problem behind fit_poles in its real parameterisation
/// (gauge fixed on the largest residue of `init`). Exposed for Jacobian tests.
class FitProblem {
 public:
  FitProblem(const Series& data, const PoleModel& init);
  ~FitProblem();
  FitProblem(const FitProblem&) = delete;
  FitProblem& operator=(const FitProblem&) = delete;

  int parameter_count() const;
  Eigen::VectorXd initial_parameters() const;
  PoleModel model(const Eigen::VectorXd& params) const;
  Eigen::VectorXd residual(const Eigen::VectorXd& params) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& params) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace detail

/// Damped least squares (Levenberg-Marquardt) for sum_i (|a(E_i)|^2 - y_i)^2.
///
/// Parameters per pole: Re z, u with Im z = -exp(u), then Re/Im of each residue.
/// |a|^2 is blind to a global phase of the residues, so the residue with the
/// largest modulus in `init` is rotated real and its imaginary part held at
/// zero; the returned model has that residue real and non-negative.
/// For order >= 2 the residues are not identifiable from |a|^2 alone:
/// |A_1 (E - z) + A_2|^2 is unchanged when its zero is mirrored across the
/// real axis, so two residue sets fit equally well. Pole positions are unique.
/// Jacobians are analytic. Accepted steps never increase the objective.
///
/// Errors: InvalidArgument for bad data, NoSignal if every y is below 1e-12,
/// IllConditioned if the damped normal equations cannot be solved,
/// NonConvergenceError as described above.
FitResult fit_poles(const Series& data, const PoleModel& init, const FitOptions& opts = {});

/// Deterministic single-pole starting point of the given order around z_init.
///
/// For fixed z the intensity times |E - z|^(2m) is a non-negative polynomial
/// of degree 2m - 2; it is fitted by linear least squares and split as
/// |p(E)|^2 by taking one root from each conjugate pair, and p expanded in
/// powers of (E - z) gives the residues.
PoleModel initial_model(const Series& data, cplx z_init, int order);

struct OrderCandidate {
  int order = 0;
  bool succeeded = false;
  FitResult fit;
  std::string failure;  ///< error text when !succeeded
  /// |A_order| > 10 * residual_rms: the leading residue is resolved at the
  /// fit's own residual scale. Reported only.
  bool leading_residue_resolved = false;
};

struct OrderSelection {
  int order = 0;
  double threshold = 0.0;
  std::vector<OrderCandidate> fits;
  const OrderCandidate& selected() const;
};

/// Fits orders 1..max_order from initial_model(data, z_init, m) and picks the
/// smallest order whose residual_rms <= (1 + threshold) * best + floor, with
/// floor = 1e-10 * rms(y) so that fits at rounding level count as equal.
/// Fit failures other than NoSignal are recorded per candidate; if all fail,
/// AllFitsFailed.
OrderSelection select_order(const Series& data, cplx z_init, int max_order,
                            double threshold = 0.05, const FitOptions& opts = {});

}  // namespace gamow
