// Copyright 2026 The smoothlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <smoothlab/models.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace smoothlab {

const char* to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::FreeLaplacian1D: return "free-laplacian-1d";
    case ModelKind::StarkFD: return "stark-fd";
    case ModelKind::GenericHermitian: return "generic-hermitian";
    case ModelKind::PerturbedSchrodinger1D: return "perturbed-schrodinger-1d";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Potentials

PotentialSpec PotentialSpec::multiplicative(std::function<double(double)> v, double decay_epsilon) {
  require(decay_epsilon > 0.0, ErrorCode::InvalidArgument, "decay exponent slack must be positive");
  PotentialSpec p;
  p.kind = Kind::Multiplicative;
  p.v = std::move(v);
  p.decay_epsilon = decay_epsilon;
  return p;
}

PotentialSpec PotentialSpec::factored_pseudo(double beta, double s) {
  require(beta < 0.5, ErrorCode::InvalidArgument, "factored potential needs beta < 1/2");
  require(s > 0.0, ErrorCode::InvalidArgument, "factored potential needs a positive weight exponent");
  PotentialSpec p;
  p.kind = Kind::FactoredPseudo;
  p.beta = beta;
  p.s = s;
  return p;
}

PotentialSpec PotentialSpec::from_samples(std::vector<double> x, std::vector<double> v, double decay_epsilon) {
  require(x.size() == v.size() && x.size() >= 2, ErrorCode::InvalidArgument,
          "potential table needs at least two (x, V) rows");
  for (std::size_t i = 1; i < x.size(); ++i)
    require(x[i] > x[i - 1], ErrorCode::InvalidArgument, "potential table x column must be strictly increasing");
  for (double vi : v) require(std::isfinite(vi), ErrorCode::InvalidArgument, "potential table has non-finite V");
  auto fn = [x = std::move(x), v = std::move(v)](double t) -> double {
    if (t < x.front() || t > x.back()) return 0.0;
    auto it = std::upper_bound(x.begin(), x.end(), t);
    if (it == x.end()) return v.back();
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double w = (t - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - w) * v[i - 1] + w * v[i];
  };
  return multiplicative(std::move(fn), decay_epsilon);
}

bool PotentialSpec::is_zero() const {
  if (kind == Kind::FactoredPseudo) return false;
  return !v;
}

PotentialSpec load_potential_file(const std::string& path, double decay_epsilon) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open potential file '" + path + "'");
  std::vector<double> xs, vs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double x, v;
    if (!(row >> x)) continue;
    if (!(row >> v)) fail(ErrorCode::Configuration, path + ":" + std::to_string(lineno) + ": expected two columns");
    xs.push_back(x);
    vs.push_back(v);
  }
  try {
    return PotentialSpec::from_samples(std::move(xs), std::move(vs), decay_epsilon);
  } catch (const Error& e) {
    fail(ErrorCode::Configuration, path + ": " + e.what());
  }
}

namespace {

// (1/n) sum_m m(xi_m) e^{i xi_m (x_j - x_l)}: the grid matrix of a Fourier
// multiplier, Toeplitz in j - l.
CMatrix multiplier_matrix(const SpatialGrid& grid, const std::function<double(double)>& mult) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const RVector xi = grid.frequencies();
  RVector m(n);
  for (Eigen::Index k = 0; k < n; ++k) m[k] = mult(xi[k]);
  CVector t(2 * n - 1);
  for (Eigen::Index d = -(n - 1); d <= n - 1; ++d) {
    const double shift = static_cast<double>(d) * grid.spacing();
    cplx acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) acc += m[k] * std::polar(1.0, xi[k] * shift);
    t[d + n - 1] = acc / static_cast<double>(n);
  }
  CMatrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index l = 0; l < n; ++l) out(j, l) = t[j - l + n - 1];
  return 0.5 * (out + out.adjoint());
}

}  // namespace

CMatrix spectral_laplacian_matrix(const SpatialGrid& grid) {
  return multiplier_matrix(grid, [](double xi) { return xi * xi; });
}

DenseMatrix potential_matrix(const PotentialSpec& v, const SpatialGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (v.kind == PotentialSpec::Kind::Multiplicative) {
    CMatrix m = CMatrix::Zero(n, n);
    if (v.v) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double value = v.v(grid.node(static_cast<std::size_t>(i)));
        require(std::isfinite(value), ErrorCode::InvalidArgument, "potential is not finite on the grid");
        m(i, i) = value;
      }
    }
    return DenseMatrix{std::move(m), true};
  }
  const double beta = v.beta;
  CMatrix t = multiplier_matrix(grid, [beta](double xi) { return std::pow(1.0 + xi * xi, beta); });
  RVector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = jp_power(grid.node(static_cast<std::size_t>(i)), -v.s);
  CMatrix m = w.cast<cplx>().asDiagonal() * t * w.cast<cplx>().asDiagonal();
  return DenseMatrix{0.5 * (m + m.adjoint()), true};
}

// ---------------------------------------------------------------------------
// Models

namespace {

std::shared_ptr<const Eigensystem> diagonalize(const CMatrix& m) {
  auto eig = std::make_shared<Eigensystem>();
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.real());
    require(es.info() == Eigen::Success, ErrorCode::NonConvergence, "eigendecomposition failed");
    eig->values = es.eigenvalues();
    eig->vectors = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    require(es.info() == Eigen::Success, ErrorCode::NonConvergence, "eigendecomposition failed");
    eig->values = es.eigenvalues();
    eig->vectors = es.eigenvectors();
  }
  return eig;
}

}  // namespace

const DenseMatrix& OperatorModel::matrix() const {
  require(static_cast<bool>(matrix_), ErrorCode::InvalidArgument,
          std::string("model '") + to_string(kind_) + "' has no dense matrix");
  return *matrix_;
}

const Eigensystem& OperatorModel::eigensystem() const {
  require(static_cast<bool>(eig_), ErrorCode::InvalidArgument,
          std::string("model '") + to_string(kind_) + "' has no eigendecomposition");
  return *eig_;
}

const PotentialSpec& OperatorModel::potential() const {
  require(static_cast<bool>(potential_), ErrorCode::InvalidArgument, "model has no potential");
  return *potential_;
}

const DenseMatrix& OperatorModel::potential_on_grid() const {
  require(static_cast<bool>(potential_matrix_), ErrorCode::InvalidArgument, "model has no potential");
  return *potential_matrix_;
}

OperatorModel OperatorModel::with_route(SpectralRoute route) const {
  if (kind_ == ModelKind::FreeLaplacian1D)
    require(std::holds_alternative<ExactRoute>(route), ErrorCode::InvalidArgument,
            "the free model only has the exact route");
  if (auto* e = std::get_if<EpsilonSmoothed>(&route))
    require(e->epsilon >= 0.0, ErrorCode::InvalidArgument, "smoothing width must be nonnegative");
  OperatorModel copy = *this;
  copy.route_ = route;
  return copy;
}

double OperatorModel::default_epsilon(double lambda) const {
  const RVector& ev = eigensystem().values;
  require(ev.size() >= 2, ErrorCode::InvalidArgument, "need at least two eigenvalues for a default width");
  std::vector<double> near(ev.data(), ev.data() + ev.size());
  const std::size_t count = std::min<std::size_t>(11, near.size());
  std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(count), near.end(),
                    [lambda](double a, double b) { return std::abs(a - lambda) < std::abs(b - lambda); });
  const auto [lo, hi] = std::minmax_element(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(count));
  const double gap = (*hi - *lo) / static_cast<double>(count - 1);
  require(gap > 0.0, ErrorCode::InvalidArgument, "degenerate spectrum near lambda");
  return 10.0 * gap;
}

OperatorModel make_free_laplacian(const SpatialGrid& grid) {
  return OperatorModel(ModelKind::FreeLaplacian1D, grid, ExactRoute{});
}

OperatorModel make_stark_fd(const SpatialGrid& grid, double field) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double h2 = grid.spacing() * grid.spacing();
  CMatrix m = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = 2.0 / h2 - field * grid.node(static_cast<std::size_t>(i));
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = -1.0 / h2;
  }
  OperatorModel model(ModelKind::StarkFD, grid, EpsilonSmoothed{});
  model.matrix_ = std::make_shared<DenseMatrix>(make_self_adjoint_matrix(std::move(m)));
  model.eig_ = diagonalize(model.matrix_->matrix);
  return model;
}

OperatorModel make_generic_hermitian(const SpatialGrid& grid, const CMatrix& m) {
  require(static_cast<std::size_t>(m.rows()) == grid.size(), ErrorCode::InvalidArgument,
          "matrix size must equal the grid size");
  OperatorModel model(ModelKind::GenericHermitian, grid, EpsilonSmoothed{0.0});
  model.matrix_ = std::make_shared<DenseMatrix>(make_self_adjoint_matrix(m));
  model.eig_ = diagonalize(model.matrix_->matrix);
  return model;
}

OperatorModel make_perturbed_schrodinger(const SpatialGrid& grid, const PotentialSpec& v) {
  OperatorModel model(ModelKind::PerturbedSchrodinger1D, grid, ExactRoute{});
  model.potential_ = std::make_shared<PotentialSpec>(v);
  model.potential_matrix_ = std::make_shared<DenseMatrix>(potential_matrix(v, grid));
  if (grid.size() <= 1024) {
    CMatrix h = spectral_laplacian_matrix(grid) + model.potential_matrix_->matrix;
    model.matrix_ = std::make_shared<DenseMatrix>(DenseMatrix{0.5 * (h + h.adjoint()), true});
    model.eig_ = diagonalize(model.matrix_->matrix);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Functional calculus

GridFunction apply_function(const OperatorModel& model, const std::function<cplx(double)>& g,
                            const GridFunction& phi) {
  require(phi.grid() == model.grid(), ErrorCode::InvalidArgument, "function and model live on different grids");
  if (model.kind() == ModelKind::FreeLaplacian1D) {
    GridFunction fh = fourier(phi);
    CVector v = fh.values();
    for (std::size_t m = 0; m < fh.size(); ++m) {
      const double xi = fh.node(m);
      const cplx gm = g(xi * xi);
      require(std::isfinite(gm.real()) && std::isfinite(gm.imag()), ErrorCode::OutOfDomain,
              "spectral function is not finite on the spectrum sample");
      v[static_cast<Eigen::Index>(m)] *= gm;
    }
    return inverse_fourier(GridFunction(phi.grid(), std::move(v), Domain::Frequency));
  }
  const Eigensystem& eig = model.eigensystem();
  CVector coeff = eig.vectors.adjoint() * phi.values();
  for (Eigen::Index k = 0; k < coeff.size(); ++k) {
    const cplx gk = g(eig.values[k]);
    require(std::isfinite(gk.real()) && std::isfinite(gk.imag()), ErrorCode::OutOfDomain,
            "spectral function is not finite on the spectrum sample");
    coeff[k] *= gk;
  }
  return GridFunction(phi.grid(), eig.vectors * coeff);
}

GridFunction spectral_projector(const OperatorModel& model, Interval window, const GridFunction& phi) {
  return apply_function(model, [window](double l) { return window.contains(l) ? cplx(1.0) : cplx(0.0); }, phi);
}

// ---------------------------------------------------------------------------
// Spectral functions

bool SpectralFunction::admissible(double lambda) const {
  if (!window.contains(lambda)) return false;
  for (double b : breakpoints)
    if (std::abs(lambda - b) <= breakpoint_margin) return false;
  return true;
}

std::vector<Interval> SpectralFunction::components() const {
  std::vector<Interval> out;
  double lo = window.lo;
  for (double b : breakpoints) {
    if (b + breakpoint_margin <= window.lo || b - breakpoint_margin >= window.hi) continue;
    if (b - breakpoint_margin > lo) out.push_back({lo, b - breakpoint_margin});
    lo = std::max(lo, b + breakpoint_margin);
  }
  if (window.hi > lo) out.push_back({lo, window.hi});
  return out;
}

namespace {

std::vector<double> interior_samples(Interval c, int count) {
  std::vector<double> pts;
  const bool geometric = c.lo > 0.0 && c.hi / c.lo > 100.0;
  for (int i = 0; i < count; ++i) {
    const double t = (i + 0.5) / count;
    pts.push_back(geometric ? c.lo * std::pow(c.hi / c.lo, t) : c.lo + t * c.width());
  }
  return pts;
}

}  // namespace

void SpectralFunction::validate(int samples_per_component) const {
  require(window.hi > window.lo, ErrorCode::InvalidArgument, "energy window is empty");
  require(sigma && a && a_prime, ErrorCode::InvalidArgument, "spectral function is incomplete");
  for (const Interval& c : components()) {
    double prev_a = -std::numeric_limits<double>::infinity();
    for (double l : interior_samples(c, samples_per_component)) {
      const double s = sigma(l), av = a(l), ap = a_prime(l);
      if (!std::isfinite(s) || !std::isfinite(av) || !std::isfinite(ap)) {
        std::ostringstream msg;
        msg << "spectral function not finite at lambda = " << l;
        fail(ErrorCode::OutOfDomain, msg.str());
      }
      if (ap <= 0.0 || av <= prev_a) {
        std::ostringstream msg;
        msg << "a is not strictly increasing with a' > 0 at lambda = " << l << " (a' = " << ap << ")";
        fail(ErrorCode::OutOfDomain, msg.str());
      }
      prev_a = av;
    }
  }
}

double SpectralFunction::max_abs_a(int samples) const {
  double m = 0.0;
  for (const Interval& c : components()) {
    for (double l : interior_samples(c, samples)) m = std::max(m, std::abs(a(l)));
    m = std::max({m, std::abs(a(c.lo)), std::abs(a(c.hi))});
  }
  return m;
}

SpectralFunction power_spectral_function(double sigma_power, double a_power, Interval window, double sigma_scale,
                                         double a_scale) {
  SpectralFunction sf;
  sf.sigma = [=](double l) { return sigma_scale * std::pow(l, sigma_power); };
  sf.a = [=](double l) { return a_scale * std::pow(l, a_power); };
  sf.a_prime = [=](double l) { return a_scale * a_power * std::pow(l, a_power - 1.0); };
  sf.window = window;
  if (window.lo < 0.0 && window.hi > 0.0) sf.breakpoints = {0.0};
  return sf;
}

// ---------------------------------------------------------------------------

ShortRangeReport shortrange_check(const PotentialSpec& v, const SpatialGrid& grid) {
  ShortRangeReport r;
  r.epsilon = v.decay_epsilon;
  if (v.kind == PotentialSpec::Kind::FactoredPseudo) {
    r.short_range = true;
    r.note = "factored potential with beta < 1/2 is short range by construction";
    return r;
  }
  if (!v.v) {
    r.short_range = true;
    return r;
  }
  const double p = 1.0 + v.decay_epsilon;
  // C(R) = max_{|x| <= R} |V| <x>^{1+eps} on radii R = x_max 2^{-k}.
  std::vector<double> radii, consts;
  for (int k = 5; k >= 0; --k) {
    const double radius = grid.x_max() * std::pow(2.0, -k);
    if (radius < 1.0) continue;
    double c = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double x = grid.node(j);
      if (std::abs(x) <= radius) c = std::max(c, std::abs(v.v(x)) * jp_power(x, p));
    }
    radii.push_back(radius);
    consts.push_back(c);
  }
  r.constant = consts.back();
  if (!std::isfinite(r.constant)) {
    r.note = "potential not finite on the grid";
    return r;
  }
  if (r.constant == 0.0 || radii.size() < 2) {
    r.short_range = std::isfinite(r.constant);
    return r;
  }
  // Least-squares slope of log C against log R over the outer radii.
  const std::size_t first = radii.size() > 4 ? radii.size() - 4 : 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(radii.size() - first);
  for (std::size_t i = first; i < radii.size(); ++i) {
    const double lx = std::log(radii[i]), ly = std::log(std::max(consts[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  r.growth_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  r.short_range = r.growth_slope < 0.1;
  if (!r.short_range) r.note = "max |V| <x>^{1+eps} keeps growing with the truncation radius";
  return r;
}

}  // namespace smoothlab
