// gpd: command-line front end for the spectral kernel / Besov / simulation
// library. Exit codes: 0 ok, 1 acceptance failure, 2 numerical or truncation
// failure, 64 usage error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gpd/acceptance.hpp"
#include "gpd/error.hpp"
#include "gpd/gp_simulation.hpp"
#include "gpd/kernels.hpp"
#include "gpd/littlewood_paley.hpp"
#include "gpd/spaces.hpp"
#include "gpd/special_functions.hpp"
#include "gpd/version.hpp"
#include "json.hpp"
#include "manifest.hpp"

namespace {

using nlohmann::json;
using namespace gpd;
using gpd::cli::RunManifest;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitUsage = 64;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad number '" + s + "' in " + what);
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw ConfigError("range must look like lo:hi, got '" + text + "'");
  return {static_cast<int>(to_double(parts[0], "--fit")),
          static_cast<int>(to_double(parts[1], "--fit"))};
}

// Shared plumbing: where outputs go and how the manifest is written.
struct Run {
  std::vector<std::string> argv;
  std::string manifest_path;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write(RunManifest& m, const std::string& path, const std::string& content) const {
    if (path == "-") {
      std::cout << content << std::flush;
    } else {
      std::ofstream f(path, std::ios::binary);
      if (!f) throw ConfigError("cannot write " + path);
      f << content;
      if (!f) throw ConfigError("write failed for " + path);
    }
    m.add_output(path, content);
  }

  // Next to the primary output when it is a file, else on stderr.
  void finish(const RunManifest& m, const std::string& primary) const {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string text = m.to_json(secs).dump(2) + "\n";
    std::string path = manifest_path;
    if (path.empty() && primary != "-") path = primary + ".manifest.json";
    if (path.empty()) {
      std::cerr << text;
      return;
    }
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write manifest " + path);
    f << text;
  }
};

PowerSeriesSpec parse_function(const std::string& text, std::int64_t n_max) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "arcsin" && rest.empty()) return PowerSeriesSpec::arcsin(n_max);
  if (head == "monomial") return PowerSeriesSpec::monomial(static_cast<int>(to_double(rest, text)));
  if (head == "hyp") {
    const auto p = split(rest, ',');
    if (p.size() != 3) throw ConfigError("hyp needs hyp:a,b,c");
    return PowerSeriesSpec::hypergeometric(to_double(p[0], text), to_double(p[1], text),
                                           to_double(p[2], text), n_max);
  }
  if (head == "explicit") {
    std::vector<double> c;
    for (const auto& s : split(rest, ',')) c.push_back(to_double(s, text));
    return PowerSeriesSpec::explicit_coefficients(std::move(c));
  }
  throw ConfigError("unknown function '" + text +
                    "' (arcsin, monomial:N, hyp:A,B,C, explicit:C0,C1,...)");
}

// Named closed forms plus "power:GAMMA" for the synthetic nu_k = sqrt_lambda^-GAMMA.
struct ParsedKernel {
  std::optional<KernelSpec> closed;
  std::optional<double> power_gamma;
};

ParsedKernel parse_kernel(const std::string& name, const Space& space) {
  ParsedKernel k;
  if (name.rfind("power:", 0) == 0) {
    k.power_gamma = to_double(name.substr(6), "--kernel");
  } else {
    k.closed = KernelSpec::parse(name, space);
    if (!(k.closed->space() == space)) {
      throw ConfigError("kernel '" + name + "' lives on " + k.closed->space().name() +
                        ", not " + space.name());
    }
  }
  return k;
}

// Spectral form resolving every band up to j_max.
KernelSpec spectral_for(const ParsedKernel& k, const Space& space, int j_max) {
  const int k_max = k_max_covering(space, std::ldexp(1.0, j_max)) + 1;
  if (k.power_gamma) return synthetic_power_kernel(space, *k.power_gamma, k_max);
  SpectralOptions opt;
  opt.max_relative_tail = 1.0;
  return spectral_coefficients(*k.closed, k_max, opt);
}

std::string kernel_with_alpha(std::string name, const std::optional<double>& alpha) {
  if (!alpha) return name;
  const std::string base = name.substr(0, name.find(':'));
  if (base != "circle-fractional" && base != "sphere-fractional") {
    throw ConfigError("--alpha only applies to circle-fractional and sphere-fractional");
  }
  return base + ":" + num(*alpha);
}

json gram_json(const GramReport& r, const Space& space) {
  json j{{"n_points", r.n_points},
         {"min_eigenvalue", r.min_eigenvalue},
         {"max_zero_sum_form", r.max_zero_sum_form},
         {"trace", r.trace},
         {"sup_norm", r.sup_norm},
         {"tolerance", r.tolerance},
         {"verdict", to_string(r.verdict)}};
  if (!r.witness.empty()) {
    j["witness"] = r.witness;
    json pts = json::array();
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      const auto p = r.points[i];
      pts.push_back(std::vector<double>(p.begin(), p.end()));
    }
    j["witness_points"] = pts;
  }
  j["space"] = space.name();
  return j;
}

std::string points_csv(const PointSet& pts, const Space& space) {
  std::ostringstream os;
  os << "point_index";
  if (space.coords() == 1) {
    os << ",x";
  } else {
    for (int c = 0; c < space.coords(); ++c) os << ",x" << c;
  }
  os << "\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    os << i;
    for (double v : pts[i]) os << "," << num(v);
    os << "\n";
  }
  return os.str();
}

// ---- subcommands ---------------------------------------------------------

struct ExpandArgs {
  std::string function;
  double nu = 0.5;
  int j_max = 200;
  std::int64_t n_max = 4'000'000;
  std::string fit;
  std::string out = "-";
};

int cmd_expand(const ExpandArgs& a, const Run& run) {
  const PowerSeriesSpec spec = parse_function(a.function, a.n_max);
  RunManifest m(run.argv, 0);
  m.set("function", spec.describe());
  const GegenbauerExpansion e = schoenberg_transform(spec, a.nu, a.j_max);

  std::ostringstream csv;
  csv << "j,B_j\n";
  for (int j = 0; j <= e.j_max(); ++j) csv << j << "," << num(e.coefficients[j]) << "\n";

  json footer{{"nu", a.nu}, {"alpha_nominal", spec.alpha_nominal()}, {"tail_bound", e.tail_bound()}};
  int lo = 8, hi = std::min(128, a.j_max);
  if (!a.fit.empty()) std::tie(lo, hi) = parse_range(a.fit);
  try {
    footer["fitted_decay"] = fitted_decay(e, lo, hi);
    footer["fit_range"] = {lo, hi};
  } catch (const DegenerateFitError&) {
    footer["fitted_decay"] = nullptr;  // polynomial or too short a range
  }
  csv << "# " << footer.dump() << "\n";
  run.write(m, a.out, csv.str());
  if (a.out != "-") std::cout << footer.dump(2) << "\n";
  run.finish(m, a.out);
  return kExitOk;
}

struct KernelCheckArgs {
  std::string space = "circle";
  std::string kernel;
  std::string psi;
  std::string mode = "pd";
  std::size_t points = 100;
  std::uint64_t seed = 0;
  std::vector<double> t;
  std::string out = "-";
};

int cmd_kernel_check(const KernelCheckArgs& a, const Run& run) {
  const Space space = Space::parse(a.space);
  if (a.mode != "pd" && a.mode != "nd") throw ConfigError("--mode must be pd or nd");
  RunManifest m(run.argv, a.seed);
  json out{{"mode", a.mode}};

  std::optional<KernelSpec> kernel;
  if (!a.kernel.empty()) {
    kernel = KernelSpec::parse(a.kernel, space);
    out["kernel"] = kernel->label();
  }
  std::optional<NDKernel> psi;
  if (!a.psi.empty()) {
    if (a.psi.rfind("rho:", 0) != 0) throw ConfigError("--psi must look like rho:ALPHA");
    psi = power_distance(space, to_double(a.psi.substr(4), "--psi"));
    out["psi"] = psi->label;
  } else if (kernel && (a.mode == "nd" || !a.t.empty())) {
    psi = psi_from_pd(*kernel, a.seed);
  }

  if (a.mode == "pd") {
    if (!kernel) throw ConfigError("pd mode needs --kernel");
    out.update(gram_json(gram_definiteness_test(*kernel, a.points, a.seed), space));
  } else {
    if (!psi) throw ConfigError("nd mode needs --psi or --kernel");
    out.update(gram_json(gram_definiteness_test(*psi, a.points, a.seed), space));
  }
  if (!a.t.empty()) {
    if (!psi) throw ConfigError("--t needs --psi or --kernel");
    json checks = json::array();
    const auto reports = exp_nd_is_pd_check(*psi, a.t, a.points, a.seed);
    for (std::size_t i = 0; i < reports.size(); ++i) {
      json r = gram_json(reports[i], space);
      r["t"] = a.t[i];
      checks.push_back(r);
    }
    out["exp_checks"] = checks;
  }
  run.write(m, a.out, out.dump(2) + "\n");
  run.finish(m, a.out);
  return kExitOk;
}

struct BesovArgs {
  std::string space = "circle";
  std::string kernel;
  int j_max = 12;
  std::string fit;
  std::string disc = "net";
  std::uint64_t seed = 0;
  std::string out = "-";
};

int cmd_besov(const BesovArgs& a, const Run& run) {
  const Space space = Space::parse(a.space);
  const KernelSpec k = spectral_for(parse_kernel(a.kernel, space), space, a.j_max);
  int lo = 3, hi = a.j_max - 2;
  if (!a.fit.empty()) std::tie(lo, hi) = parse_range(a.fit);
  RunManifest m(run.argv, a.seed);
  const BandOptions opt{parse_discretization(a.disc), a.seed};
  const BandReport r = kbes_estimate(k, a.j_max, lo, hi, opt);

  std::ostringstream csv;
  csv << "j,S_j\n";
  for (std::size_t j = 0; j < r.band_sums.size(); ++j) csv << j << "," << num(r.band_sums[j]) << "\n";
  const json footer{{"fitted_s", r.fitted_s},
                    {"residual", r.fit_residual},
                    {"fit_range", {r.fit_lo, r.fit_hi}},
                    {"discretization", to_string(r.discretization)},
                    {"kernel", k.label()},
                    {"space", space.name()}};
  csv << "# " << footer.dump() << "\n";
  run.write(m, a.out, csv.str());
  if (a.out != "-") std::cout << footer.dump(2) << "\n";
  run.finish(m, a.out);
  return kExitOk;
}

struct SimulateArgs {
  std::string space = "circle";
  std::string kernel;
  std::optional<double> alpha;
  int j_max = 8;
  std::size_t paths = 256;
  std::uint64_t seed = 0;
  std::optional<double> net_delta;
  bool exact = false;
  std::string out = "-";
  std::string points_out;
};

int cmd_simulate(const SimulateArgs& a, const Run& run) {
  const Space space = Space::parse(a.space);
  const std::string name = kernel_with_alpha(a.kernel, a.alpha);
  const ParsedKernel parsed = parse_kernel(name, space);
  SimConfig cfg;
  cfg.kernel = spectral_for(parsed, space, a.j_max);
  if (a.exact) {
    if (!parsed.closed) throw ConfigError("--exact needs a named closed-form kernel");
    cfg.closed_form = parsed.closed;
  }
  cfg.j_max = a.j_max;
  cfg.n_paths = a.paths;
  cfg.seed = a.seed;
  const double delta = a.net_delta.value_or(std::ldexp(1.0, -a.j_max));
  cfg.points = build_delta_net(space, delta, 0.0, a.seed).points;
  const PathEnsemble e = sample_paths(cfg);

  RunManifest m(run.argv, a.seed);
  m.set("space", space.name());
  m.set("kernel", cfg.kernel.label());
  m.set("j_max", a.j_max);
  m.set("n_paths", a.paths);
  m.set("net_delta", delta);
  m.set("n_points", e.n_points);
  m.set("doubling_dim", space.dim_doubling());

  std::string csv = "path_id,band,point_index,value\n";
  csv.reserve(csv.size() + e.n_paths * e.n_bands * e.n_points * 32);
  for (std::size_t p = 0; p < e.n_paths; ++p) {
    for (std::size_t j = 0; j < e.n_bands; ++j) {
      for (std::size_t i = 0; i < e.n_points; ++i) {
        csv += std::to_string(p) + "," + std::to_string(j) + "," + std::to_string(i) + "," +
               num(e.band(p, j, i)) + "\n";
      }
    }
  }
  run.write(m, a.out, csv);

  std::string sidecar = a.points_out;
  if (sidecar.empty() && a.out != "-") {
    const auto dot = a.out.rfind(".csv");
    sidecar = (dot != std::string::npos && dot + 4 == a.out.size() ? a.out.substr(0, dot) : a.out) +
              ".points.csv";
  }
  if (!sidecar.empty()) run.write(m, sidecar, points_csv(e.points, space));
  if (a.out != "-") {
    std::cout << json{{"n_paths", e.n_paths}, {"n_bands", e.n_bands}, {"n_points", e.n_points},
                      {"paths", a.out}, {"points", sidecar}}
                     .dump(2)
              << "\n";
  }
  run.finish(m, a.out);
  return kExitOk;
}

struct RegularityArgs {
  std::string in;
  std::string fit;
  bool pisier = false;
  std::optional<double> dim;
  std::string points;
  std::string out = "-";
};

// Doubling dimension from the points sidecar header: one coordinate means a
// 1-D space, d + 1 coordinates mean S^d.
std::optional<double> dim_from_sidecar(const std::string& path) {
  std::ifstream f(path);
  std::string header;
  if (!f || !std::getline(f, header)) return std::nullopt;
  const auto cols = split(header, ',');
  if (cols.size() < 2) return std::nullopt;
  const auto coords = cols.size() - 1;
  return coords == 1 ? 1.0 : static_cast<double>(coords - 1);
}

int cmd_regularity(const RegularityArgs& a, const Run& run) {
  std::ifstream f(a.in);
  if (!f) throw ConfigError("cannot read " + a.in);
  std::string line;
  if (!std::getline(f, line) || line.rfind("path_id,band,point_index,value", 0) != 0) {
    throw ConfigError(a.in + " is not a paths CSV (path_id,band,point_index,value)");
  }
  // [path][band] maxima, grown as rows arrive.
  std::vector<std::vector<double>> maxima;
  std::size_t n_bands = 0, row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    const auto c = split(line, ',');
    if (c.size() != 4) throw ConfigError(a.in + ":" + std::to_string(row) + ": expected 4 columns");
    const auto p = static_cast<std::size_t>(to_double(c[0], "path_id"));
    const auto j = static_cast<std::size_t>(to_double(c[1], "band"));
    const double v = std::fabs(to_double(c[3], "value"));
    if (p >= maxima.size()) maxima.resize(p + 1);
    if (j >= maxima[p].size()) maxima[p].resize(j + 1, 0.0);
    maxima[p][j] = std::max(maxima[p][j], v);
    n_bands = std::max(n_bands, j + 1);
  }
  if (maxima.empty()) throw ConfigError(a.in + " has no rows");
  std::vector<double> table(maxima.size() * n_bands, 0.0);
  for (std::size_t p = 0; p < maxima.size(); ++p) {
    for (std::size_t j = 0; j < maxima[p].size(); ++j) table[p * n_bands + j] = maxima[p][j];
  }

  std::string sidecar = a.points;
  if (sidecar.empty()) {
    const auto dot = a.in.rfind(".csv");
    sidecar = (dot != std::string::npos && dot + 4 == a.in.size() ? a.in.substr(0, dot) : a.in) +
              ".points.csv";
  }
  const std::optional<double> dim = a.dim ? a.dim : dim_from_sidecar(sidecar);
  if (a.pisier && !dim) throw ConfigError("--pisier-correct needs --dim or a points sidecar");

  int lo = 3, hi = static_cast<int>(n_bands) - 2;
  if (!a.fit.empty()) std::tie(lo, hi) = parse_range(a.fit);
  const RegularityReport r =
      regularity_from_maxima(table, maxima.size(), n_bands, lo, hi, a.pisier, dim.value_or(1.0));

  RunManifest m(run.argv, 0);
  {
    std::ifstream in(a.in, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    m.set("input", {{"path", a.in}, {"sha256", cli::sha256_hex(bytes)}});
  }
  const json out{{"e", r.e},
                 {"standard_errors", r.standard_errors},
                 {"e_corrected", r.e_corrected},
                 {"fitted_alpha", r.fitted_alpha},
                 {"fitted_alpha_raw", r.fitted_alpha_raw},
                 {"fitted_alpha_corrected", r.fitted_alpha_corrected},
                 {"pisier_corrected", r.pisier_corrected},
                 {"doubling_dim", dim.value_or(1.0)},
                 {"fit_range", {r.fit_lo, r.fit_hi}},
                 {"fit_residual", r.fit_residual},
                 {"n_paths", r.n_paths}};
  run.write(m, a.out, out.dump(2) + "\n");
  run.finish(m, a.out);
  return kExitOk;
}

struct ReportArgs {
  std::vector<std::string> only;
  std::uint64_t seed = AcceptanceOptions{}.seed;
  std::string json_out;
};

int cmd_report(const ReportArgs& a, const Run& run) {
  AcceptanceOptions opt;
  opt.seed = a.seed;
  for (const auto& item : a.only) {
    for (const auto& token : split(item, ',')) {
      if (!token.empty()) opt.only.push_back(token);
    }
  }
  const bool json_to_stdout = a.json_out == "-";
  json results = json::array();
  bool all = true;
  for (const CriterionResult& r : run_acceptance(opt)) {
    all = all && r.passed;
    if (!json_to_stdout) std::cout << format_result(r) << std::flush;
    results.push_back({{"id", r.id},
                       {"title", r.title},
                       {"groups", r.groups},
                       {"passed", r.passed},
                       {"details", r.details},
                       {"seconds", r.seconds}});
  }
  const json summary{{"seed", a.seed}, {"all_passed", all}, {"criteria", results}};
  if (!json_to_stdout) std::cout << (all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << "\n";
  RunManifest m(run.argv, a.seed);
  if (!a.json_out.empty()) run.write(m, a.json_out, summary.dump(2) + "\n");
  run.finish(m, a.json_out.empty() ? "-" : a.json_out);
  return all ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral kernels, Littlewood-Paley band sums and Gaussian path simulation"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Run run;
  for (int i = 0; i < argc; ++i) run.argv.emplace_back(argv[i]);
  auto manifest_opt = [&](CLI::App* sub) {
    sub->add_option("--manifest", run.manifest_path,
                    "Manifest path (default: <out>.manifest.json, or stderr for --out -)");
  };

  ExpandArgs ea;
  auto* expand = app.add_subcommand("expand", "Gegenbauer coefficients B_j of a power series");
  expand->add_option("--function", ea.function, "arcsin | monomial:N | hyp:A,B,C | explicit:C0,C1,...")
      ->required();
  expand->add_option("--nu", ea.nu, "Gegenbauer index (d - 1) / 2")->capture_default_str();
  expand->add_option("--jmax", ea.j_max, "Highest degree")->capture_default_str();
  expand->add_option("--nmax", ea.n_max, "Coefficient cap for arcsin and hyp series")
      ->capture_default_str();
  expand->add_option("--fit", ea.fit, "Decay fit range lo:hi (default 8:min(128, jmax))");
  expand->add_option("--out", ea.out, "CSV destination, - for stdout")->capture_default_str();
  manifest_opt(expand);

  KernelCheckArgs ka;
  auto* kcheck = app.add_subcommand("kernel-check", "Gram-matrix definiteness test");
  kcheck->add_option("--space", ka.space)->capture_default_str();
  kcheck->add_option("--kernel", ka.kernel,
                     "minxy | circle-brownian | circle-fractional:A | arcsin | sphere-fractional:A | hyp:A,B,C");
  kcheck->add_option("--psi", ka.psi, "Distance power rho:ALPHA for nd mode");
  kcheck->add_option("--mode", ka.mode, "pd | nd")->capture_default_str();
  kcheck->add_option("--points", ka.points)->capture_default_str();
  kcheck->add_option("--seed", ka.seed)->capture_default_str();
  kcheck->add_option("--t", ka.t, "Also test exp(-t psi) for these t");
  kcheck->add_option("--out", ka.out)->capture_default_str();
  manifest_opt(kcheck);

  BesovArgs ba;
  auto* besov = app.add_subcommand("besov", "Band sums S_j and the fitted Besov exponent");
  besov->add_option("--space", ba.space)->capture_default_str();
  besov->add_option("--kernel", ba.kernel, "Named kernel or power:GAMMA")->required();
  besov->add_option("--jmax", ba.j_max)->capture_default_str();
  besov->add_option("--fit", ba.fit, "lo:hi (default 3:jmax-2)");
  besov->add_option("--disc", ba.disc, "net | grid | diag")->capture_default_str();
  besov->add_option("--seed", ba.seed)->capture_default_str();
  besov->add_option("--out", ba.out)->capture_default_str();
  manifest_opt(besov);

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Sample band components of Gaussian paths on a net");
  sim->add_option("--space", sa.space)->capture_default_str();
  sim->add_option("--kernel", sa.kernel, "Named kernel or power:GAMMA")->required();
  sim->add_option("--alpha", sa.alpha, "Exponent for the fractional kernels");
  sim->add_option("--jmax", sa.j_max)->capture_default_str();
  sim->add_option("--paths", sa.paths)->capture_default_str();
  sim->add_option("--seed", sa.seed)->capture_default_str();
  sim->add_option("--net-delta", sa.net_delta, "Net separation (default 2^-jmax)");
  sim->add_flag("--exact", sa.exact,
                "Joint sampling with the top band completed from the closed form");
  sim->add_option("--out", sa.out, "paths CSV, - for stdout")->capture_default_str();
  sim->add_option("--points-out", sa.points_out, "Points sidecar (default <out>.points.csv)");
  manifest_opt(sim);

  RegularityArgs ra;
  auto* reg = app.add_subcommand("regularity", "Fit the decay of E_j from a paths CSV");
  reg->add_option("--in", ra.in, "paths CSV from simulate")->required();
  reg->add_option("--fit", ra.fit, "lo:hi (default 3:bands-3)");
  reg->add_flag("--pisier-correct", ra.pisier, "Divide E_j by sqrt(1 + j d ln 2)");
  reg->add_option("--dim", ra.dim, "Doubling dimension d (default from the points sidecar)");
  reg->add_option("--points", ra.points, "Points sidecar path");
  reg->add_option("--out", ra.out)->capture_default_str();
  manifest_opt(reg);

  ReportArgs pa;
  auto* report = app.add_subcommand("report", "Run the acceptance suite");
  report->add_option("--only", pa.only, "Criterion numbers or groups, comma separated");
  report->add_option("--seed", pa.seed)->capture_default_str();
  report->add_option("--json", pa.json_out, "Write a JSON summary here (- for stdout only)");
  manifest_opt(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*expand) return cmd_expand(ea, run);
    if (*kcheck) return cmd_kernel_check(ka, run);
    if (*besov) return cmd_besov(ba, run);
    if (*sim) return cmd_simulate(sa, run);
    if (*reg) return cmd_regularity(ra, run);
    if (*report) return cmd_report(pa, run);
  } catch (const TruncationError& e) {
    std::cerr << "error: " << e.what() << " (bound " << e.bound() << ")\n";
    return kExitNumeric;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DegenerateFitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const gpd::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
