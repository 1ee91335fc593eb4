#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "echoroom/algebraic_solver.hpp"
#include "echoroom/ambiguity.hpp"
#include "echoroom/error.hpp"
#include "echoroom/metrics.hpp"
#include "echoroom/pipeline.hpp"
#include "echoroom/rank_analysis.hpp"

namespace py = pybind11;
using namespace echoroom;

namespace {

using Points = std::vector<std::array<double, 2>>;

Room room_of(const Points& vertices) {
  std::vector<Eigen::Vector2d> v;
  for (const auto& p : vertices) v.emplace_back(p[0], p[1]);
  return room_from_vertices(v);
}

Trajectory traj_of(const Points& points) {
  std::vector<Vector> v;
  for (const auto& p : points) v.push_back(from2d({p[0], p[1]}));
  return Trajectory(std::move(v));
}

Points points_of(const Trajectory& t) {
  Points out;
  for (const auto& p : t.points()) out.push_back({p(0), p(1)});
  return out;
}

py::dict room_dict(const Room& room) {
  Points normals, vertices;
  std::vector<double> offsets;
  for (const auto& w : room.walls()) {
    normals.push_back({w.normal()(0), w.normal()(1)});
    offsets.push_back(w.offset());
  }
  for (const auto& v : room_vertices(room)) vertices.push_back({v.x(), v.y()});
  py::dict d;
  d["labels"] = room.labels();
  d["normals"] = normals;
  d["offsets"] = offsets;
  d["vertices"] = vertices;
  return d;
}

EchoMatrix echoes_of(const Matrix& d) {
  // NaN marks a missing entry.
  Mask mask = d.array().isFinite();
  return EchoMatrix(d, mask, {});
}

py::dict reconstruction_dict(const Reconstruction& rec) {
  py::dict d;
  d["room"] = room_dict(rec.room);
  d["trajectory"] = points_of(rec.trajectory);
  d["cost"] = rec.cost;
  d["max_abs_residual"] = rec.max_abs_residual;
  d["residuals"] = rec.residuals;
  d["method"] = rec.diagnostics.method;
  d["converged"] = rec.diagnostics.converged;
  d["chosen_restart"] = rec.diagnostics.chosen_restart;
  d["ambiguity_suspected"] = rec.diagnostics.ambiguity_suspected;
  d["collinear_suspected"] = rec.diagnostics.collinear_suspected;
  d["notes"] = rec.diagnostics.notes;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Room and trajectory reconstruction from first-order echoes";

  static PyObject* error_type = PyErr_NewException("echoroom._core.EchoroomError", PyExc_RuntimeError, nullptr);
  m.attr("EchoroomError") = py::reinterpret_borrow<py::object>(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(error_type)(py::str(e.what()));
      err.attr("code") = to_string(e.code());
      PyErr_SetObject(error_type, err.ptr());
    }
  });

  m.def(
      "echo_matrix",
      [](const Points& vertices, const Points& points, double sigma, std::uint64_t seed) {
        SimConfig cfg;
        cfg.noise_sigma = sigma;
        cfg.rng_seed = seed;
        return echo_matrix(room_of(vertices), traj_of(points), cfg).entries();
      },
      py::arg("vertices"), py::arg("points"), py::arg("sigma") = 0.0, py::arg("seed") = 0,
      "N x K wall distances for a room given by its counterclockwise vertices.");

  m.def("feasibility", &feasibility, py::arg("dimension"), py::arg("walls"), py::arg("points"));

  m.def(
      "singular_values",
      [](const Matrix& d) { return rank_report(EchoMatrix(d), 2).singular_values; }, py::arg("d"));

  m.def(
      "complete",
      [](const Matrix& d) {
        const CompletionResult r = complete_matrix(echoes_of(d), 2);
        return py::make_tuple(r.matrix.entries(), r.converged);
      },
      py::arg("d"), "Fill NaN entries with the rank-3 model; returns (matrix, converged).");

  m.def(
      "solve",
      [](const Matrix& d, const std::string& mode, int restarts, std::uint64_t seed, double sigma) {
        PipelineOptions opts;
        opts.mode = parse_solve_mode(mode);
        opts.stress.restarts = restarts;
        opts.stress.rng_seed = seed;
        opts.algebraic.noise_sigma = sigma;
        PipelineResult res = [&] {
          py::gil_scoped_release release;
          return echoroom::solve(echoes_of(d), opts);
        }();
        py::dict out = reconstruction_dict(res.reconstruction);
        out["converged"] = res.converged;
        return out;
      },
      py::arg("d"), py::arg("mode") = "auto", py::arg("restarts") = 50, py::arg("seed") = 0,
      py::arg("sigma") = 0.0);

  m.def(
      "score",
      [](const Points& true_vertices, const Points& true_points, const py::dict& estimate) {
        std::vector<Vector> normals;
        std::vector<Wall> walls;
        const auto n = estimate["room"]["normals"].cast<Points>();
        const auto q = estimate["room"]["offsets"].cast<std::vector<double>>();
        for (std::size_t j = 0; j < n.size(); ++j) walls.emplace_back(from2d({n[j][0], n[j][1]}), q[j]);
        const Room est(std::move(walls));
        const ErrorReport r = align_and_score(room_of(true_vertices), traj_of(true_points), est,
                                              traj_of(estimate["trajectory"].cast<Points>()));
        return py::make_tuple(r.vertex_error, r.location_error);
      },
      py::arg("true_vertices"), py::arg("true_points"), py::arg("estimate"),
      "RMS vertex and location errors after rigid alignment.");

  m.def(
      "parallelogram_pair",
      [](const Points& points, double alpha_deg, double beta_deg) {
        constexpr double deg = 3.14159265358979323846 / 180.0;
        const AmbiguousPair p = make_parallelogram_family(room_of({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), traj_of(points),
                                                          alpha_deg * deg, beta_deg * deg);
        const bool congruent = rigid_congruence(p.room_a, p.traj_a, p.room_b, p.traj_b).congruent;
        py::dict d;
        d["a"] = py::make_tuple(room_dict(p.room_a), points_of(p.traj_a));
        d["b"] = py::make_tuple(room_dict(p.room_b), points_of(p.traj_b));
        d["max_echo_difference"] = p.max_echo_difference;
        d["congruent"] = congruent;
        return d;
      },
      py::arg("points"), py::arg("alpha"), py::arg("beta"),
      "Shear the unit square and the points; angles in degrees.");
}
