#include "gamow/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gamow {

namespace {

constexpr double kSignalFloor = 1e-12;
constexpr double kMaxDamping = 1e32;

// Where each pole's parameters start in the real parameter vector, and which
// residue is held real to fix the global phase.
struct Layout {
  std::vector<int> offsets;
  int gauge_pole = 0;
  int gauge_residue = 0;
  int size = 0;

  explicit Layout(const PoleModel& model, int gauge_p, int gauge_r)
      : gauge_pole(gauge_p), gauge_residue(gauge_r) {
    for (std::size_t p = 0; p < model.poles.size(); ++p) {
      offsets.push_back(size);
      size += 2 + 2 * model.poles[p].order;
      if (static_cast<int>(p) == gauge_pole) size -= 1;
    }
  }

  // Index of Re A_j / Im A_j (j zero-based); Im of the gauge residue is absent.
  int re_index(int p, int j) const { return offsets[p] + 2 + slot(p, j); }
  int im_index(int p, int j) const {
    if (p == gauge_pole && j == gauge_residue) return -1;
    return offsets[p] + 2 + slot(p, j) + 1;
  }

 private:
  int slot(int p, int j) const {
    int s = 2 * j;
    if (p == gauge_pole && j > gauge_residue) s -= 1;
    return s;
  }
};

Eigen::VectorXd pack(const PoleModel& model, const Layout& layout) {
  Eigen::VectorXd p(layout.size);
  for (std::size_t i = 0; i < model.poles.size(); ++i) {
    const int pi = static_cast<int>(i);
    const ModelPole& pole = model.poles[i];
    p(layout.offsets[pi]) = pole.z.real();
    p(layout.offsets[pi] + 1) = std::log(-pole.z.imag());
    for (int j = 0; j < pole.order; ++j) {
      p(layout.re_index(pi, j)) = pole.residues[j].real();
      if (const int im = layout.im_index(pi, j); im >= 0) p(im) = pole.residues[j].imag();
    }
  }
  return p;
}

PoleModel unpack(const Eigen::VectorXd& p, const PoleModel& shape, const Layout& layout) {
  PoleModel model = shape;
  for (std::size_t i = 0; i < model.poles.size(); ++i) {
    const int pi = static_cast<int>(i);
    ModelPole& pole = model.poles[i];
    pole.z = cplx(p(layout.offsets[pi]), -std::exp(p(layout.offsets[pi] + 1)));
    for (int j = 0; j < pole.order; ++j) {
      const int im = layout.im_index(pi, j);
      pole.residues[j] = cplx(p(layout.re_index(pi, j)), im >= 0 ? p(im) : 0.0);
    }
  }
  return model;
}

struct Evaluation {
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;
  double objective = 0.0;
};

Evaluation evaluate(const Eigen::VectorXd& params, const PoleModel& shape, const Layout& layout,
                    const std::vector<double>& energies, const std::vector<double>& values,
                    bool with_jacobian) {
  const PoleModel model = unpack(params, shape, layout);
  const Eigen::Index n = static_cast<Eigen::Index>(energies.size());
  Evaluation ev;
  ev.residual.resize(n);
  if (with_jacobian) ev.jacobian.setZero(n, layout.size);

  std::vector<cplx> inv_powers;
  std::vector<cplx> d_amp(static_cast<std::size_t>(layout.size));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = energies[i];
    cplx amp(0.0);
    std::fill(d_amp.begin(), d_amp.end(), cplx(0.0));
    for (std::size_t pidx = 0; pidx < model.poles.size(); ++pidx) {
      const int pi = static_cast<int>(pidx);
      const ModelPole& pole = model.poles[pidx];
      const cplx w = e - pole.z;
      if (std::abs(w) < 1e-300) {
        throw Error(ErrorCode::DivergentPoint, "sample coincides with a model pole");
      }
      const cplx inv = 1.0 / w;
      inv_powers.assign(static_cast<std::size_t>(pole.order) + 2, cplx(1.0));
      for (int j = 1; j <= pole.order + 1; ++j) inv_powers[j] = inv_powers[j - 1] * inv;
      cplx da_dz(0.0);
      for (int j = 1; j <= pole.order; ++j) {
        amp += pole.residues[j - 1] * inv_powers[j];
        da_dz += static_cast<double>(j) * pole.residues[j - 1] * inv_powers[j + 1];
      }
      if (!with_jacobian) continue;
      const int off = layout.offsets[pi];
      d_amp[off] = da_dz;
      d_amp[off + 1] = da_dz * cplx(0.0, pole.z.imag());  // dz/du = -i e^u = i Im z
      for (int j = 1; j <= pole.order; ++j) {
        d_amp[layout.re_index(pi, j - 1)] = inv_powers[j];
        if (const int im = layout.im_index(pi, j - 1); im >= 0) {
          d_amp[im] = cplx(0.0, 1.0) * inv_powers[j];
        }
      }
    }
    ev.residual(i) = std::norm(amp) - values[i];
    if (with_jacobian) {
      for (int k = 0; k < layout.size; ++k) {
        ev.jacobian(i, k) = 2.0 * (std::conj(amp) * d_amp[k]).real();
      }
    }
  }
  ev.objective = ev.residual.squaredNorm();
  if (!std::isfinite(ev.objective) || (with_jacobian && !ev.jacobian.allFinite())) {
    throw Error(ErrorCode::NonFinite, "model evaluation overflowed");
  }
  return ev;
}

double gradient_cosine(const Evaluation& ev) {
  const double rnorm = ev.residual.norm();
  if (rnorm == 0.0) return 0.0;
  const Eigen::VectorXd g = ev.jacobian.transpose() * ev.residual;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double cn = ev.jacobian.col(j).norm();
    if (cn == 0.0) continue;
    worst = std::max(worst, std::abs(g(j)) / (cn * rnorm));
  }
  return worst;
}

void check_data(const Series& data) {
  data.validate();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const cplx v = data.y[i];
    if (!std::isfinite(data.x[i]) || !std::isfinite(v.real()) || v.imag() != 0.0 || v.real() < 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "fit data must be finite, real and non-negative (row " + std::to_string(i) + ")");
    }
  }
  const bool any_signal =
      std::any_of(data.y.begin(), data.y.end(), [](cplx v) { return v.real() >= kSignalFloor; });
  if (!any_signal) throw Error(ErrorCode::NoSignal, "all intensities are below 1e-12");
}

// Rotates all residues by one common phase so that the largest one is real
// and positive. Returns its (pole, residue) position.
std::pair<int, int> fix_gauge(PoleModel& model) {
  int gp = 0, gr = 0;
  double best = -1.0;
  for (std::size_t p = 0; p < model.poles.size(); ++p) {
    for (std::size_t j = 0; j < model.poles[p].residues.size(); ++j) {
      const double a = std::abs(model.poles[p].residues[j]);
      if (a > best) {
        best = a;
        gp = static_cast<int>(p);
        gr = static_cast<int>(j);
      }
    }
  }
  if (best > 0.0) {
    const cplx phase = std::conj(model.poles[gp].residues[gr]) / best;
    for (ModelPole& pole : model.poles) {
      for (cplx& a : pole.residues) a *= phase;
    }
    model.poles[gp].residues[gr] = best;
  }
  return {gp, gr};
}

double rms(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return v.empty() ? 0.0 : std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

namespace detail {

struct FitProblem::Impl {
  PoleModel shape;
  Layout layout;
  std::vector<double> x;
  std::vector<double> values;
};

namespace {
std::pair<PoleModel, std::pair<int, int>> gauge_fixed(const PoleModel& init) {
  PoleModel shape = init;
  const auto g = fix_gauge(shape);
  return {std::move(shape), g};
}
}  // namespace

FitProblem::FitProblem(const Series& data, const PoleModel& init) {
  init.validate();
  data.validate();
  auto [shape, g] = gauge_fixed(init);
  Layout layout(shape, g.first, g.second);
  impl_ = std::make_unique<Impl>(Impl{std::move(shape), std::move(layout), data.x, data.real_values()});
}

FitProblem::~FitProblem() = default;

int FitProblem::parameter_count() const { return impl_->layout.size; }

Eigen::VectorXd FitProblem::initial_parameters() const { return pack(impl_->shape, impl_->layout); }

PoleModel FitProblem::model(const Eigen::VectorXd& params) const {
  return unpack(params, impl_->shape, impl_->layout);
}

Eigen::VectorXd FitProblem::residual(const Eigen::VectorXd& params) const {
  return evaluate(params, impl_->shape, impl_->layout, impl_->x, impl_->values, false).residual;
}

Eigen::MatrixXd FitProblem::jacobian(const Eigen::VectorXd& params) const {
  return evaluate(params, impl_->shape, impl_->layout, impl_->x, impl_->values, true).jacobian;
}

}  // namespace detail

void PoleModel::validate() const {
  for (std::size_t p = 0; p < poles.size(); ++p) {
    const ModelPole& pole = poles[p];
    const std::string where = "pole " + std::to_string(p) + ": ";
    if (!std::isfinite(pole.z.real()) || !std::isfinite(pole.z.imag())) {
      throw Error(ErrorCode::InvalidArgument, where + "position must be finite");
    }
    if (!(pole.z.imag() < 0.0)) {
      throw Error(ErrorCode::InvalidArgument, where + "Im z must be < 0 (decaying resonance)");
    }
    if (pole.order < 1) throw Error(ErrorCode::InvalidArgument, where + "order must be >= 1");
    if (pole.residues.size() != static_cast<std::size_t>(pole.order)) {
      throw Error(ErrorCode::InvalidArgument, where + "needs exactly `order` residues");
    }
    if (pole.residues.back() == cplx(0.0)) {
      throw Error(ErrorCode::InvalidArgument, where + "leading residue must be nonzero");
    }
  }
}

int PoleModel::total_residues() const {
  int n = 0;
  for (const ModelPole& p : poles) n += p.order;
  return n;
}

void FitOptions::validate() const {
  if (max_iterations < 1 || !(damping_init > 0.0) || !(tol_grad > 0.0) || !(tol_step > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fit options must all be positive");
  }
}

NonConvergenceError::NonConvergenceError(FitResult partial)
    : Error(ErrorCode::NonConvergence,
            "no convergence after " + std::to_string(partial.iterations) +
                " iterations (gradient cosine " + std::to_string(partial.gradient_cosine) + ")"),
      partial_(std::move(partial)) {}

cplx model_amplitude(const PoleModel& model, double energy) {
  cplx amp(0.0);
  for (const ModelPole& pole : model.poles) {
    for (int j = 1; j <= pole.order; ++j) {
      amp += pole.residues[static_cast<std::size_t>(j - 1)] * pole_term(energy, pole.z, j);
    }
  }
  return amp;
}

double model_intensity(const PoleModel& model, double energy) {
  return std::norm(model_amplitude(model, energy));
}

FitResult fit_poles(const Series& data, const PoleModel& init, const FitOptions& opts) {
  opts.validate();
  init.validate();
  if (init.poles.empty()) throw Error(ErrorCode::InvalidArgument, "initial model has no poles");
  check_data(data);

  PoleModel shape = init;
  const auto [gauge_pole, gauge_residue] = fix_gauge(shape);
  const Layout layout(shape, gauge_pole, gauge_residue);
  if (data.size() < static_cast<std::size_t>(layout.size)) {
    throw Error(ErrorCode::InvalidArgument,
                "need at least " + std::to_string(layout.size) + " samples for this model");
  }
  const std::vector<double> values = data.real_values();

  Eigen::VectorXd params = pack(shape, layout);
  Evaluation current;
  try {
    current = evaluate(params, shape, layout, data.x, values, true);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonFinite) throw;
    throw Error(ErrorCode::IllConditioned,
                "least-squares system is not representable at the initial model");
  }

  FitResult result;
  result.objective_history.push_back(current.objective);
  double lambda = opts.damping_init;
  double nu = 2.0;
  bool converged = false;

  int iter = 0;
  while (iter < opts.max_iterations) {
    ++iter;
    if (current.objective == 0.0 || gradient_cosine(current) <= opts.tol_grad) {
      converged = true;
      break;
    }
    const Eigen::MatrixXd normal = current.jacobian.transpose() * current.jacobian;
    const Eigen::VectorXd gradient = current.jacobian.transpose() * current.residual;
    Eigen::VectorXd scale = normal.diagonal();
    const double scale_floor = std::max(scale.maxCoeff(), 1e-300) * 1e-15;
    scale = scale.cwiseMax(scale_floor);

    Eigen::MatrixXd damped = normal;
    damped.diagonal() += lambda * scale;
    Eigen::LDLT<Eigen::MatrixXd> solver(damped);
    Eigen::VectorXd step;
    bool solved = solver.info() == Eigen::Success && solver.isPositive();
    if (solved) {
      step = solver.solve(-gradient);
      solved = step.allFinite();
    }
    if (!solved) {
      lambda *= nu;
      nu *= 2.0;
      if (lambda > kMaxDamping) {
        throw Error(ErrorCode::IllConditioned,
                    "normal equations stay singular under maximal damping");
      }
      continue;
    }

    const Eigen::VectorXd trial = params + step;
    bool accepted = false;
    Evaluation candidate;
    try {
      candidate = evaluate(trial, shape, layout, data.x, values, true);
      accepted = candidate.objective < current.objective;
    } catch (const Error&) {
      accepted = false;  // step left the region where the model is finite
    }

    if (accepted) {
      const double predicted =
          -step.dot(gradient) + lambda * step.dot(scale.cwiseProduct(step));
      const double rho = predicted > 0.0 ? (current.objective - candidate.objective) / predicted : 0.0;
      lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      lambda = std::max(lambda, 1e-300);
      nu = 2.0;
      const double step_norm = scale.cwiseSqrt().cwiseProduct(step).norm();
      const double param_norm = scale.cwiseSqrt().cwiseProduct(params).norm();
      params = trial;
      current = std::move(candidate);
      result.objective_history.push_back(current.objective);
      if (step_norm <= opts.tol_step * (param_norm + opts.tol_step)) {
        converged = true;
        break;
      }
    } else {
      lambda *= nu;
      nu *= 2.0;
      if (lambda > kMaxDamping) {
        // No representable step lowers the objective: stationary at working precision.
        converged = true;
        break;
      }
    }
  }

  result.model = unpack(params, shape, layout);
  ModelPole& gauge = result.model.poles[static_cast<std::size_t>(gauge_pole)];
  if (gauge.residues[static_cast<std::size_t>(gauge_residue)].real() < 0.0) {
    for (ModelPole& pole : result.model.poles) {
      for (cplx& a : pole.residues) a = -a;
    }
  }
  result.iterations = iter;
  result.residual_rms = std::sqrt(current.objective / static_cast<double>(data.size()));
  result.gradient_cosine = gradient_cosine(current);
  result.converged = converged || result.gradient_cosine <= opts.tol_grad;
  if (!result.converged) throw NonConvergenceError(std::move(result));
  return result;
}

PoleModel initial_model(const Series& data, cplx z_init, int order) {
  check_data(data);
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "order must be >= 1");
  if (!(z_init.imag() < 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "initial pole must have Im z < 0");
  }
  const double x0 = z_init.real();
  const double s = -z_init.imag();
  const int degree = 2 * order - 2;
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());

  // y s^(2m) ~ q(u) / (1 + u^2)^m with u = (E - x0) / s, so q = |p|^2.
  Eigen::MatrixXd basis(n, degree + 1);
  Eigen::VectorXd rhs(n);
  const double s2m = std::pow(s, 2 * order);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (data.x[i] - x0) / s;
    const double denom = std::pow(1.0 + u * u, order);
    double power = 1.0;
    for (int j = 0; j <= degree; ++j) {
      basis(i, j) = power / denom;
      power *= u;
    }
    rhs(i) = data.y[i].real() * s2m;
  }
  const Eigen::VectorXd q = basis.colPivHouseholderQr().solve(rhs);

  ModelPole pole{z_init, order, std::vector<cplx>(static_cast<std::size_t>(order), cplx(0.0))};
  double ymax = 0.0;
  for (const cplx v : data.y) ymax = std::max(ymax, v.real());

  // p~(u) with |p~(u)|^2 = q(u), highest power first in `factor`.
  std::vector<cplx> factor;
  const double lead = q(degree);
  if (!(lead > 0.0) || !q.allFinite()) {
    pole.residues.back() = std::sqrt(ymax) * std::pow(s, order);
    PoleModel fallback;
    fallback.poles.push_back(std::move(pole));
    return fallback;
  }
  factor.push_back(std::sqrt(lead));
  if (degree > 0) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -q(i) / lead;
    const Eigen::VectorXcd roots = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();
    std::vector<cplx> sorted(roots.data(), roots.data() + roots.size());
    std::sort(sorted.begin(), sorted.end(), [](cplx a, cplx b) {
      return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
    });
    for (int i = 0; i < order - 1; ++i) {
      // factor *= (u - root)
      factor.push_back(cplx(0.0));
      for (std::size_t c = factor.size() - 1; c > 0; --c) factor[c] -= sorted[i] * factor[c - 1];
    }
  }

  // Substitute u = v / s - i with v = E - z_init (Horner in polynomial form),
  // coefficients of v stored lowest power first.
  std::vector<cplx> in_v{cplx(0.0)};
  for (const cplx coeff : factor) {
    std::vector<cplx> next(in_v.size() + 1, cplx(0.0));
    for (std::size_t j = 0; j < in_v.size(); ++j) {
      next[j] += in_v[j] * cplx(0.0, -1.0);
      next[j + 1] += in_v[j] / s;
    }
    next[0] += coeff;
    in_v = std::move(next);
  }
  for (int j = 0; j < order; ++j) {
    pole.residues[static_cast<std::size_t>(order - 1 - j)] = in_v[j];
  }
  double largest = 0.0;
  for (const cplx a : pole.residues) largest = std::max(largest, std::abs(a));
  if (std::abs(pole.residues.back()) <= 1e-8 * largest) {
    pole.residues.back() = 1e-8 * largest;
  }
  PoleModel model;
  model.poles.push_back(std::move(pole));
  return model;
}

const OrderCandidate& OrderSelection::selected() const {
  for (const OrderCandidate& c : fits) {
    if (c.order == order) return c;
  }
  throw Error(ErrorCode::InvalidArgument, "no candidate for the selected order");
}

OrderSelection select_order(const Series& data, cplx z_init, int max_order, double threshold,
                            const FitOptions& opts) {
  if (max_order < 1) throw Error(ErrorCode::InvalidArgument, "max_order must be >= 1");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "threshold must lie in (0, 1)");
  }
  check_data(data);

  OrderSelection selection;
  selection.threshold = threshold;
  double best = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= max_order; ++m) {
    OrderCandidate candidate;
    candidate.order = m;
    try {
      candidate.fit = fit_poles(data, initial_model(data, z_init, m), opts);
      candidate.succeeded = true;
    } catch (const NonConvergenceError& e) {
      candidate.fit = e.partial();
      candidate.failure = e.what();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoSignal) throw;
      candidate.failure = e.what();
    }
    if (candidate.succeeded) {
      const cplx leading = candidate.fit.model.poles.front().residues.back();
      candidate.leading_residue_resolved = std::abs(leading) > 10.0 * candidate.fit.residual_rms;
      best = std::min(best, candidate.fit.residual_rms);
    }
    selection.fits.push_back(std::move(candidate));
  }
  if (!std::isfinite(best)) {
    throw Error(ErrorCode::AllFitsFailed, "no candidate order converged");
  }
  const double floor = 1e-10 * rms(data.real_values());
  for (const OrderCandidate& c : selection.fits) {
    if (c.succeeded && c.fit.residual_rms <= (1.0 + threshold) * best + floor) {
      selection.order = c.order;
      break;
    }
  }
  return selection;
}

}  // namespace gamow
