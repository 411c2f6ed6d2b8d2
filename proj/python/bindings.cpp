#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "gamow/density.hpp"
#include "gamow/fitting.hpp"
#include "gamow/lineshape.hpp"
#include "gamow/semigroup.hpp"

namespace py = pybind11;
using namespace gamow;

namespace {

Series make_series(const std::vector<double>& x, const std::vector<double>& y) {
  Series s;
  s.x = x;
  s.y.reserve(y.size());
  for (const double v : y) s.y.emplace_back(v, 0.0);
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Jordan-chain (higher-order Gamow) resonance states: evolution, density operators, "
            "line shapes and pole fitting";

  static py::exception<Error> gamow_error(m, "GamowError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(gamow_error, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<ComplexPole>(m, "ComplexPole")
      .def(py::init<double, double, int>(), py::arg("energy"), py::arg("width"), py::arg("order") = 1)
      .def_property_readonly("energy", &ComplexPole::energy)
      .def_property_readonly("width", &ComplexPole::width)
      .def_property_readonly("order", &ComplexPole::order)
      .def_property_readonly("position", &ComplexPole::position)
      .def("__repr__", [](const ComplexPole& p) {
        return "ComplexPole(energy=" + std::to_string(p.energy()) + ", width=" +
               std::to_string(p.width()) + ", order=" + std::to_string(p.order()) + ")";
      });

  m.def("pole_position", &pole_position, py::arg("pole"));
  m.def("binomial", &binomial, py::arg("n"), py::arg("k"));

  m.def("hamiltonian_matrix", [](const ComplexPole& p) { return hamiltonian_matrix(p).matrix(); },
        py::arg("pole"));
  m.def("evolution_matrix", &evolution_matrix, py::arg("pole"), py::arg("t"));
  m.def("evolve_ket", [](const ComplexPole& p, int k, double t) { return evolve_ket(p, k, t).coeffs(); },
        py::arg("pole"), py::arg("k"), py::arg("t"));
  m.def("evolve_state",
        [](const ComplexPole& p, const CVector& c, double t) { return evolve_state({p, c}, t).coeffs(); },
        py::arg("pole"), py::arg("coeffs"), py::arg("t"));
  m.def("expm_oracle", &expm_oracle, py::arg("matrix"), py::arg("t"));

  m.def("build_density", [](const ComplexPole& p, int n) { return build_density(p, n).matrix(); },
        py::arg("pole"), py::arg("n"));
  m.def("evolve_density",
        [](const ComplexPole& p, const CMatrix& w, double t) { return evolve_density({p, w}, t).matrix(); },
        py::arg("pole"), py::arg("w"), py::arg("t"));
  m.def(
      "check_exponential",
      [](const ComplexPole& p, const CMatrix& w, const std::vector<double>& times, double tol) {
        const ExponentialCheck c = check_exponential({p, w}, std::span<const double>(times), tol);
        py::dict d;
        d["is_exponential"] = c.is_exponential;
        d["max_deviation"] = c.max_deviation;
        d["worst_time"] = c.worst_time;
        return d;
      },
      py::arg("pole"), py::arg("w"), py::arg("times"), py::arg("tol") = 1e-10);
  m.def(
      "exponential_subspace",
      [](const ComplexPole& p, double tol) {
        std::vector<CMatrix> out;
        for (const GamowOperator& b : exponential_subspace(p, tol)) out.push_back(b.matrix());
        return out;
      },
      py::arg("pole"), py::arg("tol") = kDefaultRankTolerance);
  m.def(
      "projection_residual",
      [](const ComplexPole& p, const std::vector<CMatrix>& basis, const CMatrix& w) {
        std::vector<GamowOperator> ops;
        for (const CMatrix& b : basis) ops.emplace_back(p, b);
        return projection_residual(ops, {p, w});
      },
      py::arg("pole"), py::arg("basis"), py::arg("w"));

  m.def("pole_term", &pole_term, py::arg("energy"), py::arg("z"), py::arg("m"));
  m.def("lorentzian", &lorentzian, py::arg("energy"), py::arg("resonance_energy"), py::arg("width"));
  m.def("lorentzian_derivative", &lorentzian_derivative, py::arg("energy"),
        py::arg("resonance_energy"), py::arg("width"), py::arg("k"));
  m.def(
      "higher_order_lineshape",
      [](double e, const ComplexPole& p, const std::vector<double>& w) {
        return higher_order_lineshape(e, p, w);
      },
      py::arg("energy"), py::arg("pole"), py::arg("weights"));

  py::class_<ModelPole>(m, "ModelPole")
      .def(py::init([](cplx z, std::vector<cplx> residues) {
             return ModelPole{z, static_cast<int>(residues.size()), std::move(residues)};
           }),
           py::arg("z"), py::arg("residues"))
      .def_readwrite("z", &ModelPole::z)
      .def_readwrite("order", &ModelPole::order)
      .def_readwrite("residues", &ModelPole::residues);

  py::class_<PoleModel>(m, "PoleModel")
      .def(py::init([](std::vector<ModelPole> poles) { return PoleModel{std::move(poles)}; }),
           py::arg("poles"))
      .def_readwrite("poles", &PoleModel::poles)
      .def("validate", &PoleModel::validate);

  py::class_<FitOptions>(m, "FitOptions")
      .def(py::init<>())
      .def_readwrite("max_iterations", &FitOptions::max_iterations)
      .def_readwrite("damping_init", &FitOptions::damping_init)
      .def_readwrite("tol_grad", &FitOptions::tol_grad)
      .def_readwrite("tol_step", &FitOptions::tol_step);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("model", &FitResult::model)
      .def_readonly("residual_rms", &FitResult::residual_rms)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("objective_history", &FitResult::objective_history);

  m.def("model_intensity", &model_intensity, py::arg("model"), py::arg("energy"));
  m.def(
      "fit_poles",
      [](const std::vector<double>& x, const std::vector<double>& y, const PoleModel& init,
         const FitOptions& opts) { return fit_poles(make_series(x, y), init, opts); },
      py::arg("x"), py::arg("y"), py::arg("init"), py::arg("options") = FitOptions{});
  m.def(
      "select_order",
      [](const std::vector<double>& x, const std::vector<double>& y, cplx z_init, int max_order,
         double threshold) {
        const OrderSelection sel = select_order(make_series(x, y), z_init, max_order, threshold);
        return py::make_tuple(sel.order, sel.selected().fit);
      },
      py::arg("x"), py::arg("y"), py::arg("z_init"), py::arg("max_order"),
      py::arg("threshold") = 0.05);
}
