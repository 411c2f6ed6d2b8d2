#include "gamow/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gamow/semigroup.hpp"

namespace gamow {

GamowOperator build_density(const ComplexPole& pole, int n) {
  const int r = pole.order();
  if (n < 0 || n >= r) {
    throw Error(ErrorCode::IndexOutOfRange,
                "density order n = " + std::to_string(n) + " requires 0 <= n < " + std::to_string(r));
  }
  CMatrix m = CMatrix::Zero(r, r);
  for (int k = 0; k <= n; ++k) m(k, n - k) = static_cast<double>(binomial(n, k));
  return {pole, std::move(m)};
}

GamowOperator evolve_density(const GamowOperator& w, double t) {
  const CMatrixLD u = evolution_matrix_extended(w.pole(), t);
  const CMatrixLD w_ext = w.matrix().cast<cplx_ld>();
  const CMatrixLD evolved = u * w_ext * u.adjoint();
  return {w.pole(), evolved.unaryExpr([](const cplx_ld& v) {
                      return cplx(static_cast<double>(v.real()), static_cast<double>(v.imag()));
                    })};
}

ExponentialCheck check_exponential(const GamowOperator& w0, std::span<const double> times,
                                   double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be > 0");
  if (times.empty()) throw Error(ErrorCode::EmptyGrid, "no sample times for decay check");
  const double gamma = w0.pole().width();
  ExponentialCheck report;
  for (const double t : times) {
    const GamowOperator wt = evolve_density(w0, t);
    const double dev = max_abs(std::exp(gamma * t) * wt.matrix() - w0.matrix());
    if (dev > report.max_deviation || !std::isfinite(dev)) {
      report.max_deviation = dev;
      report.worst_time = t;
    }
  }
  report.is_exponential = report.max_deviation <= tol;
  return report;
}

ExponentialCheck check_exponential(const GamowOperator& w0, const TimeGrid& grid, double tol) {
  const std::vector<double> times = grid.times();
  return check_exponential(w0, std::span<const double>(times), tol);
}

namespace {

// Gauss-Jordan elimination on the rows of `rows`, visiting columns in the
// given order. Rows whose remaining entries are all below pivot_tol are
// dropped (they cannot occur for an orthonormal input basis).
CMatrix reduced_echelon(CMatrix rows, const std::vector<Eigen::Index>& column_order,
                        double pivot_tol) {
  Eigen::Index lead = 0;
  for (const Eigen::Index c : column_order) {
    if (lead == rows.rows()) break;
    Eigen::Index pivot = lead;
    double best = 0.0;
    for (Eigen::Index i = lead; i < rows.rows(); ++i) {
      const double v = std::abs(rows(i, c));
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (best <= pivot_tol) continue;
    rows.row(lead).swap(rows.row(pivot));
    rows.row(lead) /= rows(lead, c);
    rows(lead, c) = 1.0;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      if (i == lead) continue;
      const cplx factor = rows(i, c);
      if (factor == cplx(0.0)) continue;
      rows.row(i) -= factor * rows.row(lead);
      rows(i, c) = 0.0;
    }
    ++lead;
  }
  return rows.topRows(lead);
}

}  // namespace

ExponentialSubspace exponential_subspace_report(const ComplexPole& pole, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "rank tolerance must be > 0");
  const int r = pole.order();
  const int unknowns = r * r;
  const int degree = 2 * (r - 1);
  const int samples = 2 * r + 1;

  // Chebyshev nodes of the first kind in s = t - 1, t in (0, 2).
  std::vector<double> s(static_cast<std::size_t>(samples));
  for (int j = 0; j < samples; ++j) {
    s[j] = std::cos(std::numbers::pi * (j + 0.5) / samples);
  }
  Eigen::MatrixXd vandermonde(samples, degree + 1);
  for (int j = 0; j < samples; ++j) {
    for (int m = 0; m <= degree; ++m) vandermonde(j, m) = std::cos(m * std::acos(s[j]));
  }
  const Eigen::MatrixXcd fit =
      vandermonde.colPivHouseholderQr()
          .solve(Eigen::MatrixXd::Identity(samples, samples))
          .cast<cplx>();

  ExponentialSubspace out;
  out.constraint_rows = static_cast<Eigen::Index>(degree) * unknowns;
  CMatrix system = CMatrix::Zero(out.constraint_rows, unknowns);

  const double gamma = pole.width();
  CMatrix sampled(samples, unknowns);
  for (int k = 0; k < r; ++k) {
    for (int l = 0; l < r; ++l) {
      const GamowOperator dyad = GamowOperator::dyad(pole, k, l);
      for (int j = 0; j < samples; ++j) {
        const double t = 1.0 + s[j];
        const CMatrix scaled = std::exp(gamma * t) * evolve_density(dyad, t).matrix();
        sampled.row(j) = scaled.transpose().reshaped().transpose();  // row-major (a, b)
      }
      const CMatrix coeffs = fit * sampled;  // (degree + 1) x unknowns, entry (m, a*r + b)
      for (int m = 1; m <= degree; ++m) {
        system.block((m - 1) * unknowns, k * r + l, unknowns, 1) = coeffs.row(m).transpose();
      }
    }
  }

  CMatrix null_basis;
  if (out.constraint_rows == 0) {
    null_basis = CMatrix::Identity(unknowns, unknowns);
  } else {
    Eigen::JacobiSVD<CMatrix> svd(system, Eigen::ComputeFullV);
    out.singular_values = svd.singularValues();
    const double sigma_max = out.singular_values.size() ? out.singular_values(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
      if (out.singular_values(i) > tol * sigma_max) ++rank;
    }
    null_basis = svd.matrixV().rightCols(unknowns - rank);
  }

  std::vector<Eigen::Index> order;
  for (int n = 0; n <= degree; ++n) {
    for (int k = 0; k < r; ++k) {
      const int l = n - k;
      if (l >= 0 && l < r) order.push_back(k * r + l);
    }
  }
  const CMatrix echelon = reduced_echelon(null_basis.transpose(), order, 1e-8);
  for (Eigen::Index i = 0; i < echelon.rows(); ++i) {
    CMatrix m(r, r);
    for (int k = 0; k < r; ++k) {
      for (int l = 0; l < r; ++l) m(k, l) = echelon(i, k * r + l);
    }
    // Entries below the rank resolution are rounding residue of the SVD.
    const double cutoff = tol * max_abs(m);
    m = m.unaryExpr([cutoff](const cplx& v) { return std::abs(v) <= cutoff ? cplx(0.0) : v; });
    out.basis.emplace_back(pole, std::move(m));
  }
  return out;
}

std::vector<GamowOperator> exponential_subspace(const ComplexPole& pole, double tol) {
  return exponential_subspace_report(pole, tol).basis;
}

double projection_residual(const std::vector<GamowOperator>& basis, const GamowOperator& w) {
  const double norm = w.matrix().norm();
  if (norm == 0.0) return 0.0;
  if (basis.empty()) return 1.0;
  const Eigen::Index n = w.matrix().size();
  CMatrix a(n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].matrix().size() != n) {
      throw Error(ErrorCode::InvalidArgument, "basis and operator dimensions differ");
    }
    a.col(static_cast<Eigen::Index>(i)) = basis[i].matrix().reshaped();
  }
  const CVector target = w.matrix().reshaped();
  const CVector coeffs = a.colPivHouseholderQr().solve(target);
  return (target - a * coeffs).norm() / norm;
}

int numerical_rank(const CMatrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  return static_cast<int>((sv.array() > rel_tol * sv(0)).count());
}

double hermiticity_defect(const CMatrix& m) { return max_abs(m - m.adjoint()); }

}  // namespace gamow
