#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gpd/acceptance.hpp"
#include "gpd/error.hpp"
#include "gpd/gp_simulation.hpp"
#include "gpd/kernels.hpp"
#include "gpd/littlewood_paley.hpp"
#include "gpd/spaces.hpp"
#include "gpd/special_functions.hpp"
#include "gpd/version.hpp"

namespace py = pybind11;
using namespace gpd;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PowerSeriesSpec parse_series(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  std::vector<double> v;
  for (std::size_t start = 0; !rest.empty() && start <= rest.size();) {
    const auto comma = rest.find(',', start);
    v.push_back(std::stod(rest.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (head == "arcsin" && v.empty()) return PowerSeriesSpec::arcsin();
  if (head == "monomial" && v.size() == 1) return PowerSeriesSpec::monomial(static_cast<int>(v[0]));
  if (head == "hyp" && v.size() == 3) return PowerSeriesSpec::hypergeometric(v[0], v[1], v[2]);
  if (head == "explicit" && !v.empty()) return PowerSeriesSpec::explicit_coefficients(v);
  throw ConfigError("unknown function '" + text + "'");
}

KernelSpec spectral_kernel(const std::string& space_name, const std::string& kernel, int j_max) {
  const Space space = Space::parse(space_name);
  const int k_max = k_max_covering(space, std::ldexp(1.0, j_max)) + 1;
  if (kernel.rfind("power:", 0) == 0) {
    return synthetic_power_kernel(space, std::stod(kernel.substr(6)), k_max);
  }
  SpectralOptions opt;
  opt.max_relative_tail = 1.0;
  return spectral_coefficients(KernelSpec::parse(kernel, space), k_max, opt);
}

py::array_t<double> points_array(const PointSet& p) {
  py::array_t<double> out({static_cast<py::ssize_t>(p.size()), static_cast<py::ssize_t>(p.coords())});
  std::copy(p.flat().begin(), p.flat().end(), out.mutable_data());
  return out;
}

PointSet points_from(const Array& a, int coords) {
  if (a.ndim() == 1 && coords == 1) {
    return PointSet(1, std::vector<double>(a.data(), a.data() + a.size()));
  }
  if (a.ndim() != 2 || a.shape(1) != coords) {
    throw ConfigError("points must have shape (n, " + std::to_string(coords) + ")");
  }
  return PointSet(coords, std::vector<double>(a.data(), a.data() + a.size()));
}

py::dict gram_dict(const GramReport& r) {
  py::dict d;
  d["n_points"] = r.n_points;
  d["min_eigenvalue"] = r.min_eigenvalue;
  d["max_zero_sum_form"] = r.max_zero_sum_form;
  d["trace"] = r.trace;
  d["tolerance"] = r.tolerance;
  d["verdict"] = to_string(r.verdict);
  d["witness"] = r.witness;
  d["points"] = points_array(r.points);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral kernels, Littlewood-Paley band sums and Gaussian path simulation";
  m.attr("__version__") = kVersion;

  static py::exception<Error> base(m, "GpdError", PyExc_RuntimeError);
  static py::exception<DomainError> domain(m, "DomainError", base.ptr());
  static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
  static py::exception<ContractError> contract(m, "ContractError", base.ptr());
  static py::exception<NumericError> numeric(m, "NumericError", base.ptr());
  static py::exception<DegenerateFitError> degenerate(m, "DegenerateFitError", base.ptr());
  static py::exception<TruncationError> truncation(m, "TruncationError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const TruncationError& e) {
      py::set_error(truncation, e.what());
    } catch (const DegenerateFitError& e) {
      py::set_error(degenerate, e.what());
    } catch (const NumericError& e) {
      py::set_error(numeric, e.what());
    } catch (const ContractError& e) {
      py::set_error(contract, e.what());
    } catch (const ConfigError& e) {
      py::set_error(config, e.what());
    } catch (const DomainError& e) {
      py::set_error(domain, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  m.def("gegenbauer_w", py::vectorize([](double nu, int k, double x) { return gegenbauer_w(nu, k, x); }),
        py::arg("nu"), py::arg("k"), py::arg("x"), "Normalized Gegenbauer W_k^nu(x).");
  m.def("log_pochhammer", &log_pochhammer, py::arg("a"), py::arg("n"));
  m.def("sphere_harmonic_dimension", &sphere_harmonic_dimension, py::arg("d"), py::arg("k"));
  m.def("gamma_k_integral", &gamma_k_integral, py::arg("alpha"), py::arg("k"));
  m.def("fourier_abs_alpha", &fourier_abs_alpha, py::arg("alpha"), py::arg("k_max"));
  m.def(
      "expand",
      [](const std::string& function, double nu, int j_max) {
        const PowerSeriesSpec spec = parse_series(function);
        const GegenbauerExpansion e = schoenberg_transform(spec, nu, j_max);
        py::dict d;
        d["coefficients"] = py::array_t<double>(e.coefficients.size(), e.coefficients.data());
        d["tail_bound"] = e.tail_bound();
        d["alpha_nominal"] = spec.alpha_nominal();
        try {
          d["fitted_decay"] = fitted_decay(e, 8, std::min(128, j_max));
        } catch (const DegenerateFitError&) {
          d["fitted_decay"] = py::none();
        }
        return d;
      },
      py::arg("function"), py::arg("nu") = 0.5, py::arg("j_max") = 200,
      "Gegenbauer coefficients B_j of arcsin, monomial:N, hyp:A,B,C or explicit:C0,C1,...");

  m.def("window", py::vectorize([](int j, double lambda) { return window_eval(j, lambda); }),
        py::arg("j"), py::arg("lam"), "Dyadic window Psi_j(lambda).");
  m.def(
      "delta_net",
      [](const std::string& space, double delta, std::uint64_t seed) {
        return points_array(build_delta_net(Space::parse(space), delta, 0.0, seed).points);
      },
      py::arg("space"), py::arg("delta"), py::arg("seed") = 0);
  m.def(
      "kernel_eval",
      [](const std::string& space, const std::string& kernel, const Array& x, const Array& y) {
        const Space s = Space::parse(space);
        const KernelSpec k = KernelSpec::parse(kernel, s);
        const PointSet px = points_from(x, s.coords()), py_ = points_from(y, s.coords());
        if (px.size() != py_.size()) throw ConfigError("x and y need the same number of points");
        std::vector<double> out(px.size());
        for (std::size_t i = 0; i < px.size(); ++i) out[i] = k(px[i], py_[i]);
        return py::array_t<double>(out.size(), out.data());
      },
      py::arg("space"), py::arg("kernel"), py::arg("x"), py::arg("y"));
  m.def(
      "kernel_check",
      [](const std::string& space, std::optional<std::string> kernel,
         std::optional<double> psi_alpha, const std::string& mode, std::size_t n_points,
         std::uint64_t seed) {
        const Space s = Space::parse(space);
        if (mode == "pd") {
          if (!kernel) throw ConfigError("pd mode needs a kernel");
          return gram_dict(gram_definiteness_test(KernelSpec::parse(*kernel, s), n_points, seed));
        }
        if (mode != "nd") throw ConfigError("mode must be 'pd' or 'nd'");
        const NDKernel psi = psi_alpha ? power_distance(s, *psi_alpha)
                             : kernel  ? psi_from_pd(KernelSpec::parse(*kernel, s), seed)
                                       : throw ConfigError("nd mode needs psi_alpha or a kernel");
        return gram_dict(gram_definiteness_test(psi, n_points, seed));
      },
      py::arg("space"), py::arg("kernel") = py::none(), py::arg("psi_alpha") = py::none(),
      py::arg("mode") = "pd", py::arg("n_points") = 100, py::arg("seed") = 0);
  m.def(
      "besov",
      [](const std::string& space, const std::string& kernel, int j_max, std::pair<int, int> fit,
         const std::string& disc, std::uint64_t seed) {
        const KernelSpec k = spectral_kernel(space, kernel, j_max);
        const BandReport r = kbes_estimate(k, j_max, fit.first, fit.second,
                                           {parse_discretization(disc), seed});
        py::dict d;
        d["band_sums"] = py::array_t<double>(r.band_sums.size(), r.band_sums.data());
        d["fitted_s"] = r.fitted_s;
        d["fit_residual"] = r.fit_residual;
        d["fit_range"] = py::make_tuple(r.fit_lo, r.fit_hi);
        d["discretization"] = to_string(r.discretization);
        return d;
      },
      py::arg("space"), py::arg("kernel"), py::arg("j_max") = 12,
      py::arg("fit") = std::pair<int, int>{3, 10}, py::arg("disc") = "net", py::arg("seed") = 0);
  m.def(
      "simulate",
      [](const std::string& space, const std::string& kernel, int j_max, std::size_t n_paths,
         std::uint64_t seed, std::optional<double> net_delta, bool exact) {
        const Space s = Space::parse(space);
        SimConfig cfg;
        cfg.kernel = spectral_kernel(space, kernel, j_max);
        if (exact) cfg.closed_form = KernelSpec::parse(kernel, s);
        cfg.j_max = j_max;
        cfg.n_paths = n_paths;
        cfg.seed = seed;
        cfg.points = build_delta_net(s, net_delta.value_or(std::ldexp(1.0, -j_max)), 0.0, seed).points;
        PathEnsemble e;
        {
          py::gil_scoped_release release;
          e = sample_paths(cfg);
        }
        const auto P = static_cast<py::ssize_t>(e.n_paths), J = static_cast<py::ssize_t>(e.n_bands),
                   N = static_cast<py::ssize_t>(e.n_points);
        py::array_t<double> bands({P, J, N}), full({P, N}), maxima({P, J});
        std::copy(e.band_components.begin(), e.band_components.end(), bands.mutable_data());
        std::copy(e.full_values.begin(), e.full_values.end(), full.mutable_data());
        std::copy(e.band_max.begin(), e.band_max.end(), maxima.mutable_data());
        py::dict d;
        d["bands"] = bands;
        d["full"] = full;
        d["band_max"] = maxima;
        d["points"] = points_array(e.points);
        d["seed"] = seed;
        d["kernel"] = e.kernel_label;
        return d;
      },
      py::arg("space"), py::arg("kernel"), py::arg("j_max") = 8, py::arg("n_paths") = 256,
      py::arg("seed") = 0, py::arg("net_delta") = py::none(), py::arg("exact") = false,
      "Band components [path, band, point] of Gaussian paths on a delta-net.");
  m.def(
      "regularity",
      [](const Array& band_max, std::pair<int, int> fit, bool pisier_correct, double dim) {
        if (band_max.ndim() != 2) throw ConfigError("band_max must be (paths, bands)");
        const std::span<const double> t(band_max.data(), static_cast<std::size_t>(band_max.size()));
        const RegularityReport r = regularity_from_maxima(
            t, static_cast<std::size_t>(band_max.shape(0)), static_cast<std::size_t>(band_max.shape(1)),
            fit.first, fit.second, pisier_correct, dim);
        py::dict d;
        d["e"] = r.e;
        d["standard_errors"] = r.standard_errors;
        d["e_corrected"] = r.e_corrected;
        d["fitted_alpha"] = r.fitted_alpha;
        d["fitted_alpha_raw"] = r.fitted_alpha_raw;
        d["fitted_alpha_corrected"] = r.fitted_alpha_corrected;
        d["fit_residual"] = r.fit_residual;
        d["n_paths"] = r.n_paths;
        return d;
      },
      py::arg("band_max"), py::arg("fit"), py::arg("pisier_correct") = false, py::arg("dim") = 1.0);
  m.def(
      "acceptance",
      [](std::vector<std::string> only, std::uint64_t seed) {
        AcceptanceOptions opt;
        opt.only = std::move(only);
        opt.seed = seed;
        std::vector<CriterionResult> results;
        {
          py::gil_scoped_release release;
          results = run_acceptance(opt);
        }
        py::list out;
        for (const auto& r : results) {
          py::dict d;
          d["id"] = r.id;
          d["title"] = r.title;
          d["passed"] = r.passed;
          d["details"] = r.details;
          out.append(d);
        }
        return out;
      },
      py::arg("only") = std::vector<std::string>{}, py::arg("seed") = AcceptanceOptions{}.seed);
}
