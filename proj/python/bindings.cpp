#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "zscreen/error.hpp"
#include "zscreen/normality.hpp"
#include "zscreen/report.hpp"
#include "zscreen/screening.hpp"
#include "zscreen/stats.hpp"
#include "zscreen/tabulation.hpp"
#include "zscreen/transforms.hpp"

namespace py = pybind11;
using namespace zscreen;

namespace {

py::dict result_dict(const StatResult& r) {
  py::dict d;
  d["kind"] = std::string(kind_token(r.kind));
  d["value"] = r.value;
  d["first"] = r.first;
  d["last"] = r.last;
  d["df"] = r.df;
  d["note"] = r.note;
  return d;
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

StatKind kind_from(const std::string& token) {
  const auto k = parse_kind(token);
  if (!k) throw std::invalid_argument("unknown kind '" + token + "'");
  return *k;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Outlier screening statistics for longitudinal biomarker sequences";
  m.attr("__version__") = kToolVersion;

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<StatisticalError>(m, "StatisticalError", PyExc_ArithmeticError);

  m.def("t0_last", [](const std::vector<double>& x) {
    const auto r = t0_last(x);
    auto d = result_dict(r);
    d["p_value"] = t0_p_value(r);
    return d;
  }, py::arg("values"), "Studentized last observation against the earlier ones.");
  m.def("t1_max_outlier", [](const std::vector<double>& x) { return result_dict(t1_max_outlier(x)); },
        py::arg("values"));
  m.def("t2_subsequence", [](const std::vector<double>& x) { return result_dict(t2_subsequence(x)); },
        py::arg("values"));
  m.def("t3_multivariate",
        [](const std::vector<std::vector<double>>& rows) { return result_dict(t3_multivariate(to_matrix(rows))); },
        py::arg("points"), "points: one row of d coordinates per observation.");
  m.def(
      "t4_linear_model",
      [](const std::vector<double>& x, const std::optional<std::vector<std::vector<double>>>& design) {
        const DesignMatrix dm = design ? DesignMatrix{to_matrix(*design), Model::custom} : build_design(Model::A, x.size());
        return result_dict(t4_linear_model(x, dm));
      },
      py::arg("values"), py::arg("design") = py::none(),
      "Max externally studentized residual; the design defaults to an intercept column.");

  m.def("lambert_w0", &lambert_w0, py::arg("x"));
  m.def(
      "apply_transformation",
      [](const std::string& name, const std::vector<double>& x) {
        const auto t = Transformation::parse(name);
        std::vector<double> out;
        out.reserve(x.size());
        for (double v : x) out.push_back(t.apply(v));
        return out;
      },
      py::arg("name"), py::arg("values"));

  m.def("shapiro_wilk", [](const std::vector<double>& x) {
    const auto r = shapiro_wilk(x);
    return py::make_tuple(r.w, r.p);
  }, py::arg("sample"), "Returns (W, p).");
  m.def("ks_uniform", [](const std::vector<double>& u) {
    const auto r = ks_uniform(u);
    return py::make_tuple(r.d, r.p);
  }, py::arg("p_values"), "Returns (D, p) against Uniform(0, 1).");

  m.def(
      "select_transformation",
      [](const std::vector<std::vector<double>>& sequences, const std::string& family, std::size_t min_n) {
        std::vector<Sequence> seqs;
        for (std::size_t i = 0; i < sequences.size(); ++i) seqs.push_back({std::to_string(i), "x", sequences[i], {}});
        const auto report = select_transformation(seqs, parse_family(family), min_n);
        py::list scores;
        for (const auto& s : report.scores) {
          py::dict d;
          d["transformation"] = s.transformation.name();
          d["tested"] = s.tested;
          d["skipped_degenerate"] = s.skipped_degenerate;
          d["ks_d"] = s.ks_d;
          d["global_p"] = s.global_p;
          scores.append(d);
        }
        py::dict out;
        out["selected"] = report.selected_transformation().name();
        out["scores"] = scores;
        out["dropped"] = report.dropped;
        out["eligible_sequences"] = report.eligible_sequences;
        return out;
      },
      py::arg("sequences"), py::arg("family") = "default", py::arg("min_n") = 4);

  m.def(
      "tabulate",
      [](const std::string& kind, std::size_t n, double alpha, std::size_t reps, std::uint64_t seed, unsigned threads,
         std::size_t d, std::optional<std::size_t> n_summer) {
        py::gil_scoped_release release;
        const auto model = make_null_model(kind_from(kind), n, d, n_summer.value_or(n / 2), seed);
        return tabulate(model, alpha, {reps, seed, threads}).quantile;
      },
      py::arg("kind"), py::arg("n"), py::arg("alpha") = 0.05, py::arg("reps") = 100000, py::arg("seed") = 0,
      py::arg("threads") = 1, py::arg("d") = 2, py::arg("n_summer") = py::none(),
      "Monte Carlo (1 - alpha)-quantile of the statistic's null law.");
  m.def(
      "calibrate",
      [](const std::string& kind, std::size_t n, double alpha, std::size_t reps, std::size_t trials,
         std::uint64_t seed, unsigned threads, std::size_t d, std::optional<std::size_t> n_summer) {
        CalibrationResult r;
        {
          py::gil_scoped_release release;
          const auto model = make_null_model(kind_from(kind), n, d, n_summer.value_or(n / 2), seed);
          r = calibrate(model, alpha, {reps, seed, threads}, trials);
        }
        py::dict out;
        out["critical"] = r.critical;
        out["rejections"] = r.rejections;
        out["trials"] = r.trials;
        out["rate"] = r.rate;
        return out;
      },
      py::arg("kind"), py::arg("n"), py::arg("alpha") = 0.05, py::arg("reps") = 100000, py::arg("trials") = 20000,
      py::arg("seed") = 0, py::arg("threads") = 1, py::arg("d") = 2, py::arg("n_summer") = py::none());

  m.def("format_cell", &format_cell, py::arg("flagged"), py::arg("eligible"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a zscreen command; returns (exit_code, stdout, stderr).");
}
