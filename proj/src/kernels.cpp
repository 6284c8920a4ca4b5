#include "gpd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "gpd/error.hpp"
#include "gpd/rng.hpp"
#include "gpd/special_functions.hpp"

namespace gpd {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGramTolerance = 1e-8;
constexpr double kSymmetryTolerance = 1e-10;

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return std::clamp(s, -1.0, 1.0);
}

double parse_number(const std::string& text, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw ConfigError("bad number '" + text + "' in " + context);
  }
  return v;
}

std::vector<double> split_numbers(const std::string& text,
                                  const std::string& context) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, context));
  return out;
}

// An orthonormal basis of the complement of x in R^{d+1}.
std::vector<std::vector<double>> complement_frame(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> frame;
  for (std::size_t axis = 0; axis < n && frame.size() + 1 < n; ++axis) {
    std::vector<double> v(n, 0.0);
    v[axis] = 1.0;
    auto project_out = [&](std::span<const double> w) {
      double c = 0.0;
      for (std::size_t i = 0; i < n; ++i) c += v[i] * w[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= c * w[i];
    };
    project_out(x);
    for (const auto& w : frame) project_out(w);
    double norm = 0.0;
    for (double t : v) norm += t * t;
    norm = std::sqrt(norm);
    if (norm < 1e-6) continue;
    for (double& t : v) t /= norm;
    frame.push_back(std::move(v));
  }
  return frame;
}

}  // namespace

// ---------------------------------------------------------------------------
// KernelSpec construction

KernelSpec KernelSpec::spectral(EigenSystem system, std::vector<double> nu,
                                double tail_bound, std::string label) {
  if (nu.size() != system.size()) {
    throw ContractError("spectral kernel: one coefficient per eigen entry");
  }
  for (double v : nu) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError("spectral kernel coefficients must be finite and >= 0");
    }
  }
  KernelSpec k;
  k.form_ = Form::Spectral;
  k.space_ = system.space();
  k.label_ = label.empty() ? "spectral" : std::move(label);
  k.system_ = std::make_shared<const EigenSystem>(std::move(system));
  k.nu_ = std::move(nu);
  k.tail_bound_ = tail_bound;
  if (k.space_.homogeneous()) {
    auto sys = k.system_;
    auto coeffs = std::make_shared<const std::vector<double>>(k.nu_);
    k.radial_ = [sys, coeffs](double r) {
      std::vector<double> add(sys->size());
      sys->addition_at_distance(r, add);
      double s = 0.0;
      for (std::size_t e = 0; e < add.size(); ++e) s += (*coeffs)[e] * add[e];
      return s;
    };
  }
  return k;
}

KernelSpec KernelSpec::min_xy() {
  KernelSpec k;
  k.space_ = Space::interval_mixed();
  k.name_ = ClosedFormName::MinXY;
  k.label_ = "minxy";
  return k;
}

KernelSpec KernelSpec::circle_brownian() {
  KernelSpec k;
  k.space_ = Space::circle();
  k.name_ = ClosedFormName::CircleBrownian;
  k.label_ = "circle-brownian";
  k.alpha_ = 1.0;
  k.radial_ = [](double r) { return 0.5 - r; };
  return k;
}

KernelSpec KernelSpec::circle_fractional(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("circle fractional kernel needs alpha in (0, 1]");
  }
  KernelSpec k;
  k.space_ = Space::circle();
  k.name_ = ClosedFormName::CircleFractional;
  k.alpha_ = alpha;
  k.label_ = "circle-fractional:" + std::to_string(alpha);
  k.radial_ = [alpha](double r) { return 1.0 / (alpha + 1.0) - std::pow(r, alpha); };
  return k;
}

KernelSpec KernelSpec::sphere_arcsin_bm(int d) {
  KernelSpec k;
  k.space_ = Space::sphere(d);
  k.name_ = ClosedFormName::SphereArcsinBM;
  k.label_ = "arcsin";
  k.radial_ = [](double r) { return 0.5 * kPi - r; };
  return k;
}

KernelSpec KernelSpec::sphere_fractional(int d, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("sphere fractional kernel needs alpha in (0, 1]");
  }
  KernelSpec k;
  k.space_ = Space::sphere(d);
  k.name_ = ClosedFormName::SphereFractional;
  k.alpha_ = alpha;
  k.c0_ = k.space_.radial_integral([alpha](double r) { return std::pow(r, alpha); }) /
          k.space_.total_measure();
  k.label_ = "sphere-fractional:" + std::to_string(alpha);
  const double c0 = k.c0_;
  k.radial_ = [alpha, c0](double r) { return c0 - 0.5 * std::pow(r, alpha); };
  return k;
}

KernelSpec KernelSpec::hypergeometric_sphere(int d, double a, double b, double c) {
  if (!(a > 0.0 && b > 0.0 && c > a + b)) {
    throw DomainError("hypergeometric kernel requires a, b > 0 and c > a + b");
  }
  KernelSpec k;
  k.space_ = Space::sphere(d);
  k.name_ = ClosedFormName::HypergeometricSphere;
  k.a_ = a;
  k.b_ = b;
  k.c_ = c;
  k.alpha_ = c - a - b;
  std::ostringstream os;
  os << "hyp:" << a << "," << b << "," << c;
  k.label_ = os.str();
  k.radial_ = [a, b, c](double r) {
    return hypergeometric_2f1(a, b, c, std::clamp(std::cos(r), -1.0, 1.0));
  };
  return k;
}

KernelSpec KernelSpec::derived(Space space, PointFunction f, std::string label,
                               std::function<double(double)> radial) {
  KernelSpec k;
  k.form_ = Form::Derived;
  k.space_ = space;
  k.derived_ = std::move(f);
  k.label_ = std::move(label);
  k.radial_ = std::move(radial);
  return k;
}

KernelSpec KernelSpec::parse(const std::string& name, const Space& space) {
  auto after = [&](std::size_t n) { return name.substr(n); };
  if (name == "minxy") return min_xy();
  if (name == "circle-brownian") return circle_brownian();
  if (name.starts_with("circle-fractional:")) {
    return circle_fractional(parse_number(after(18), name));
  }
  auto sphere_dim = [&]() {
    if (space.kind() != SpaceKind::Sphere) {
      throw ConfigError("kernel '" + name + "' needs --space sphere:d");
    }
    return space.dim();
  };
  if (name == "arcsin") return sphere_arcsin_bm(sphere_dim());
  if (name.starts_with("sphere-fractional:")) {
    return sphere_fractional(sphere_dim(), parse_number(after(18), name));
  }
  if (name.starts_with("hyp:")) {
    const auto abc = split_numbers(after(4), name);
    if (abc.size() != 3) throw ConfigError("hyp kernel needs hyp:a,b,c");
    return hypergeometric_sphere(sphere_dim(), abc[0], abc[1], abc[2]);
  }
  throw ConfigError("unknown kernel '" + name + "'");
}

ClosedFormName KernelSpec::name() const {
  if (form_ != Form::ClosedForm) throw ContractError("kernel is not a closed form");
  return name_;
}

const EigenSystem& KernelSpec::system() const {
  if (form_ != Form::Spectral) throw ContractError("kernel is not spectral");
  return *system_;
}

const std::vector<double>& KernelSpec::nu() const {
  if (form_ != Form::Spectral) throw ContractError("kernel is not spectral");
  return nu_;
}

double KernelSpec::radial(double r) const {
  if (!radial_) throw ContractError("kernel " + label_ + " is not invariant");
  return radial_(r);
}

double KernelSpec::evaluate(std::span<const double> x,
                            std::span<const double> y) const {
  space_.validate(x);
  space_.validate(y);
  switch (form_) {
    case Form::Spectral: {
      std::vector<double> add(system_->size());
      system_->cross_values(x, y, add);
      double s = 0.0;
      for (std::size_t e = 0; e < add.size(); ++e) s += nu_[e] * add[e];
      return s;
    }
    case Form::Derived: return derived_(x, y);
    case Form::ClosedForm: break;
  }
  switch (name_) {
    case ClosedFormName::MinXY: return std::min(x[0], y[0]);
    case ClosedFormName::HypergeometricSphere:
      return hypergeometric_2f1(a_, b_, c_, dot(x, y));
    case ClosedFormName::SphereArcsinBM: return std::asin(dot(x, y));
    default: return radial_(space_.metric_unchecked(x.data(), y.data()));
  }
}

double closed_form_diagonal_sup(const KernelSpec& k) {
  switch (k.name()) {
    case ClosedFormName::MinXY: return 1.0;
    case ClosedFormName::CircleBrownian: return 0.5;
    case ClosedFormName::CircleFractional: return 1.0 / (k.alpha() + 1.0);
    case ClosedFormName::SphereArcsinBM: return 0.5 * kPi;
    case ClosedFormName::SphereFractional: return k.c0();
    case ClosedFormName::HypergeometricSphere:
      return hypergeometric_2f1(k.hyp_a(), k.hyp_b(), k.hyp_c(), 1.0);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// N.D. calculus

NDKernel power_distance(const Space& space, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("power_distance needs alpha > 0");
  NDKernel nd;
  nd.space = space;
  nd.psi = [space, alpha](std::span<const double> x, std::span<const double> y) {
    return std::pow(space.metric(x, y), alpha);
  };
  if (space.homogeneous()) {
    nd.radial = [alpha](double r) { return std::pow(r, alpha); };
  }
  std::ostringstream os;
  os << "rho^" << alpha;
  nd.label = os.str();
  return nd;
}

NDKernel psi_from_pd(const KernelSpec& kernel, std::uint64_t seed) {
  const PointSet pts = sample_uniform(kernel.space(), 200, seed);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const double kxy = kernel(pts[i], pts[i + 1]);
    const double kyx = kernel(pts[i + 1], pts[i]);
    if (std::fabs(kxy - kyx) > kSymmetryTolerance * std::max(1.0, std::fabs(kxy))) {
      throw ContractError("psi_from_pd: kernel " + kernel.label() +
                          " is not symmetric");
    }
  }
  NDKernel nd;
  nd.space = kernel.space();
  nd.label = "psi[" + kernel.label() + "]";
  nd.psi = [kernel](std::span<const double> x, std::span<const double> y) {
    return kernel(x, x) + kernel(y, y) - 2.0 * kernel(x, y);
  };
  if (kernel.has_radial_profile()) {
    const auto profile = kernel.radial_profile();
    const double at_zero = profile(0.0);
    nd.radial = [profile, at_zero](double r) { return 2.0 * (at_zero - profile(r)); };
  }
  return nd;
}

KernelSpec k_u(const KernelSpec& kernel, std::span<const double> u) {
  kernel.space().validate(u);
  std::vector<double> base(u.begin(), u.end());
  const double kuu = kernel(base, base);
  auto f = [kernel, base, kuu](std::span<const double> x, std::span<const double> y) {
    return kernel(x, y) + kuu - kernel(x, base) - kernel(y, base);
  };
  return KernelSpec::derived(kernel.space(), f, "K_u[" + kernel.label() + "]");
}

double psi_mean(const NDKernel& psi, std::span<const double> x) {
  const Space& space = psi.space;
  space.validate(x);
  const double measure = space.total_measure();
  switch (space.kind()) {
    case SpaceKind::IntervalMixed:
    case SpaceKind::IntervalNeumann: {
      auto f = [&](double u) { return psi(x, std::span<const double>(&u, 1)); };
      const double brk[1] = {x[0]};
      return integrate_piecewise(f, 0.0, 1.0, brk) / measure;
    }
    case SpaceKind::Circle: {
      auto f = [&](double u) { return psi(x, std::span<const double>(&u, 1)); };
      const double anti = x[0] > 0.0 ? x[0] - 1.0 : x[0] + 1.0;
      const double brk[2] = {x[0], anti};
      return integrate_piecewise(f, -1.0, 1.0, brk) / measure;
    }
    case SpaceKind::Sphere: break;
  }
  // Polar coordinates about x: u = cos(t) x + sin(t) v, v on the unit sphere
  // of the complement. S^2 uses an equispaced azimuth (exact for periodic
  // integrands); higher d averages over seeded random directions.
  const auto frame = complement_frame(x);
  const int d = space.dim();
  std::vector<std::vector<double>> dirs;
  if (d == 2) {
    constexpr int kAzimuths = 64;
    for (int m = 0; m < kAzimuths; ++m) {
      const double phi = 2.0 * kPi * (m + 0.5) / kAzimuths;
      std::vector<double> v(x.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = std::cos(phi) * frame[0][i] + std::sin(phi) * frame[1][i];
      }
      dirs.push_back(std::move(v));
    }
  } else {
    const PointSet sub = sample_uniform(Space::sphere(d - 1), 256, 0x5eed);
    for (std::size_t m = 0; m < sub.size(); ++m) {
      std::vector<double> v(x.size(), 0.0);
      for (int c = 0; c < d; ++c) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += sub[m][c] * frame[c][i];
      }
      dirs.push_back(std::move(v));
    }
  }
  std::vector<double> u(x.size());
  auto ring = [&](double t) {
    double s = 0.0;
    for (const auto& v : dirs) {
      for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::cos(t) * x[i] + std::sin(t) * v[i];
      double norm = 0.0;
      for (double w : u) norm += w * w;
      norm = std::sqrt(norm);
      for (double& w : u) w /= norm;
      s += psi(x, u);
    }
    return s / static_cast<double>(dirs.size()) * std::pow(std::sin(t), d - 1);
  };
  return sphere_area(d - 1) * integrate_piecewise(ring, 0.0, kPi) / measure;
}

TildeKernel nd_to_pd(const NDKernel& psi, std::uint64_t seed) {
  TildeKernel out;
  const Space space = psi.space;
  if (psi.radial && space.homogeneous()) {
    const double c0 = space.radial_integral(psi.radial) / space.total_measure();
    const PointSet probes = sample_uniform(space, 4, seed);
    double worst = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const double m = psi_mean(psi, probes[i]);
      worst = std::max(worst, std::fabs(m - c0) / std::max(std::fabs(c0), 1e-300));
    }
    out.constancy_error = worst;
    if (worst <= 1e-3) {
      const auto radial = psi.radial;
      out.c0 = c0;
      out.invariant_path = true;
      out.kernel = KernelSpec::derived(
          space,
          [space, radial, c0](std::span<const double> x, std::span<const double> y) {
            return c0 - 0.5 * radial(space.metric(x, y));
          },
          "tilde[" + psi.label + "]",
          [radial, c0](double r) { return c0 - 0.5 * radial(r); });
      return out;
    }
  }
  // General path: K~(x, y) = (m(x) + m(y) - psi(x, y)) / 2 with m the mean.
  const NDKernel copy = psi;
  out.kernel = KernelSpec::derived(
      space,
      [copy](std::span<const double> x, std::span<const double> y) {
        return 0.5 * (psi_mean(copy, x) + psi_mean(copy, y) - copy(x, y));
      },
      "tilde[" + psi.label + "]");
  // C0 as the average of m
  const Quadrature q = quadrature_nodes(space, space.kind() == SpaceKind::Sphere ? 16 : 8, seed);
  double acc = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < q.points.size(); ++i) {
    acc += q.weights[i] * psi_mean(psi, q.points[i]);
    wsum += q.weights[i];
  }
  out.c0 = acc / wsum;
  return out;
}

// ---------------------------------------------------------------------------
// Gram tests

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::PDPass: return "PD_pass";
    case Verdict::NDPass: return "ND_pass";
    case Verdict::Violation: return "Violation";
  }
  return "?";
}

GramReport gram_definiteness_test(const PointFunction& f, const Space& space,
                                  const PointSet& points, Definiteness mode) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 2) throw DomainError("gram test needs at least two points");
  for (std::size_t i = 0; i < points.size(); ++i) space.validate(points[i]);
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = f(points[static_cast<std::size_t>(i)],
                         points[static_cast<std::size_t>(j)]);
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  GramReport rep;
  rep.n_points = points.size();
  rep.points = points;
  rep.trace = gram.trace();
  rep.sup_norm = gram.cwiseAbs().maxCoeff();

  auto solve = [](const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
      const auto& s = svd.singularValues();
      std::ostringstream os;
      os << "symmetric eigensolver did not converge (condition number "
         << s(0) / s(s.size() - 1) << ")";
      throw NumericError(os.str());
    }
    return es;
  };

  if (mode == Definiteness::PD) {
    const auto es = solve(gram);
    rep.min_eigenvalue = es.eigenvalues()(0);
    rep.max_zero_sum_form = std::numeric_limits<double>::quiet_NaN();
    rep.tolerance = kGramTolerance * std::fabs(rep.trace);
    rep.verdict = rep.min_eigenvalue >= -rep.tolerance ? Verdict::PDPass
                                                       : Verdict::Violation;
    if (rep.verdict == Verdict::Violation) {
      const Eigen::VectorXd w = es.eigenvectors().col(0);
      rep.witness.assign(w.data(), w.data() + w.size());
    }
    return rep;
  }

  // Orthonormal basis of the zero-sum subspace: the trailing n-1 columns of
  // the Householder reflector that maps e_1 to the normalized ones vector.
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
  const Eigen::MatrixXd q_full = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd basis = q_full.rightCols(n - 1);
  const Eigen::MatrixXd reduced = basis.transpose() * gram * basis;
  const auto es = solve(0.5 * (reduced + reduced.transpose()));
  rep.min_eigenvalue = es.eigenvalues()(0);
  rep.max_zero_sum_form = es.eigenvalues()(n - 2);
  rep.tolerance = kGramTolerance * rep.sup_norm * static_cast<double>(n);
  rep.verdict = rep.max_zero_sum_form <= rep.tolerance ? Verdict::NDPass
                                                       : Verdict::Violation;
  if (rep.verdict == Verdict::Violation) {
    const Eigen::VectorXd w = basis * es.eigenvectors().col(n - 2);
    rep.witness.assign(w.data(), w.data() + w.size());
  }
  return rep;
}

GramReport gram_definiteness_test(const KernelSpec& kernel, std::size_t n_points,
                                  std::uint64_t seed) {
  const PointSet pts = sample_uniform(kernel.space(), n_points, seed);
  return gram_definiteness_test(
      [&kernel](std::span<const double> x, std::span<const double> y) {
        return kernel.evaluate(x, y);
      },
      kernel.space(), pts, Definiteness::PD);
}

GramReport gram_definiteness_test(const NDKernel& psi, std::size_t n_points,
                                  std::uint64_t seed) {
  const PointSet pts = sample_uniform(psi.space, n_points, seed);
  return gram_definiteness_test(psi.psi, psi.space, pts, Definiteness::ND);
}

std::vector<GramReport> exp_nd_is_pd_check(const NDKernel& psi,
                                           std::span<const double> t_list,
                                           std::size_t n_points,
                                           std::uint64_t seed) {
  const PointSet pts = sample_uniform(psi.space, n_points, seed);
  std::vector<GramReport> out;
  for (double t : t_list) {
    if (!(t > 0.0)) throw DomainError("exp check needs t > 0");
    out.push_back(gram_definiteness_test(
        [&psi, t](std::span<const double> x, std::span<const double> y) {
          return std::exp(-t * psi(x, y));
        },
        psi.space, pts, Definiteness::PD));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral coefficients

namespace {

// Sum over k > k_max of nu_k * sup_x diag_k for nu_k = sqrt_lambda^-gamma.
double power_tail(const Space& space, double gamma, int k_max) {
  auto diag = [&](int k) {
    if (space.kind() == SpaceKind::Sphere) {
      return static_cast<double>(sphere_harmonic_dimension(space.dim(), k)) /
             space.total_measure();
    }
    return 2.0;
  };
  double sum = 0.0, term = 0.0;
  int k = k_max + 1;
  const int stop = std::max(64 * (k_max + 1), 4096);
  for (; k <= stop; ++k) {
    term = std::pow(sqrt_lambda_of(space, k), -gamma) * diag(k);
    sum += term;
  }
  // Remaining terms behave like k^{-p} with p = gamma - (dim - 1).
  const double p = gamma - (space.dim() - 1);
  if (p <= 1.0) return std::numeric_limits<double>::infinity();
  return sum + term * (k / (p - 1.0) - 0.5);
}

}  // namespace

KernelSpec synthetic_power_kernel(const Space& space, double gamma, int k_max) {
  EigenSystem sys = build_eigensystem(space, k_max);
  std::vector<double> nu(sys.size(), 0.0);
  for (std::size_t e = 0; e < sys.size(); ++e) {
    const double s = sys.entries()[e].sqrt_lambda;
    if (s > 0.0) nu[e] = std::pow(s, -gamma);
  }
  std::ostringstream os;
  os << "synthetic:gamma=" << gamma;
  const double tail = power_tail(space, gamma, k_max);
  return KernelSpec::spectral(std::move(sys), std::move(nu), tail, os.str());
}

KernelSpec spectral_coefficients(const KernelSpec& closed, int k_max,
                                 const SpectralOptions& options) {
  if (closed.form() != KernelSpec::Form::ClosedForm) {
    throw ContractError("spectral_coefficients needs a closed-form kernel");
  }
  const Space& space = closed.space();
  EigenSystem sys = build_eigensystem(space, k_max);
  std::vector<double> nu(sys.size(), 0.0);
  const double diag_sup = closed_form_diagonal_sup(closed);
  double captured = 0.0;  // sum_k nu_k sup_x diag_k over the kept entries

  switch (closed.name()) {
    case ClosedFormName::MinXY:
      for (std::size_t e = 0; e < nu.size(); ++e) {
        const double w = sys.entries()[e].sqrt_lambda;
        nu[e] = 1.0 / (w * w);
        captured += 2.0 * nu[e];
      }
      break;
    case ClosedFormName::CircleBrownian:
      for (std::size_t e = 1; e < nu.size(); ++e) {
        const int k = sys.entries()[e].index;
        if (k % 2 == 1) nu[e] = 4.0 / (kPi * kPi * k * k);
        captured += nu[e];
      }
      break;
    case ClosedFormName::CircleFractional: {
      const auto c = fourier_abs_alpha(closed.alpha(), k_max);
      for (std::size_t e = 1; e < nu.size(); ++e) {
        nu[e] = std::max(0.0, c[e - 1]);
        captured += nu[e];
      }
      break;
    }
    case ClosedFormName::SphereArcsinBM:
    case ClosedFormName::SphereFractional:
    case ClosedFormName::HypergeometricSphere: {
      const int d = space.dim();
      const double nu_index = 0.5 * (d - 1);
      const auto profile = closed.radial_profile();
      GegenbauerExpansion b = gegenbauer_projection(profile, nu_index, k_max, diag_sup);
      const int series_top = std::min(k_max, options.series_degree_limit);
      if (closed.name() != ClosedFormName::SphereFractional && series_top >= 0) {
        const PowerSeriesSpec spec =
            closed.name() == ClosedFormName::SphereArcsinBM
                ? PowerSeriesSpec::arcsin()
                : PowerSeriesSpec::hypergeometric(closed.hyp_a(), closed.hyp_b(),
                                                  closed.hyp_c());
        const GegenbauerExpansion series = schoenberg_transform(spec, nu_index, series_top);
        std::copy(series.coefficients.begin(), series.coefficients.end(),
                  b.coefficients.begin());
      }
      const double area = space.total_measure();
      for (std::size_t e = 0; e < nu.size(); ++e) {
        double bj = b.coefficients[e];
        if (bj < 0.0) {
          if (bj < -1e-10 * diag_sup) {
            throw NumericError("negative Gegenbauer coefficient " + std::to_string(bj) +
                               " at degree " + std::to_string(e));
          }
          bj = 0.0;
        }
        nu[e] = area * bj / static_cast<double>(sys.entries()[e].multiplicity);
        captured += bj;
      }
      break;
    }
  }
  const double tail = std::max(0.0, diag_sup - captured);
  if (tail > options.max_relative_tail * diag_sup) {
    throw TruncationError("spectral truncation of " + closed.label() + " at k_max = " +
                              std::to_string(k_max) + " leaves relative tail " +
                              std::to_string(tail / diag_sup),
                          tail);
  }
  return KernelSpec::spectral(std::move(sys), std::move(nu), tail,
                              "spectral[" + closed.label() + "]");
}

}  // namespace gpd
