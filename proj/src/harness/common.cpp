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

#include "common.hpp"

#include <smoothlab/expression.hpp>

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

namespace smoothlab::harness {

namespace {

std::vector<std::string> split(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

void Reader::error(const std::string& path, const std::string& what) {
  fail(ErrorCode::Configuration, "config field '" + path + "': " + what);
}

const json* Reader::find(const std::string& path) const {
  const json* node = &root_;
  for (const auto& key : split(path)) {
    if (!node->is_object()) return nullptr;
    auto it = node->find(key);
    if (it == node->end()) return nullptr;
    node = &*it;
  }
  return node;
}

bool Reader::has(const std::string& path) const {
  const json* n = find(path);
  return n && !n->is_null();
}

const json& Reader::at(const std::string& path) {
  const json* n = find(path);
  if (!n || n->is_null()) error(path, "missing");
  used_.insert(path);
  return *n;
}

double Reader::number(const std::string& path, double lo, double hi) {
  const json& n = at(path);
  if (!n.is_number()) error(path, "expected a number");
  const double v = n.get<double>();
  if (!std::isfinite(v)) error(path, "must be finite");
  if (v < lo || v > hi) {
    std::ostringstream os;
    os << "value " << v << " outside [" << lo << ", " << hi << "]";
    error(path, os.str());
  }
  return v;
}

double Reader::positive(const std::string& path) {
  const double v = number(path);
  if (!(v > 0.0)) error(path, "must be positive");
  return v;
}

std::size_t Reader::count(const std::string& path, std::size_t lo, std::size_t hi) {
  const json& n = at(path);
  if (!n.is_number_integer() || (n.is_number_integer() && !n.is_number_unsigned() && n.get<long long>() < 0))
    error(path, "expected a nonnegative integer");
  const auto v = n.get<std::uint64_t>();
  if (v < lo || v > hi) error(path, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                                        std::to_string(hi) + "]");
  return static_cast<std::size_t>(v);
}

std::uint64_t Reader::u64(const std::string& path) {
  const json& n = at(path);
  if (n.is_number_unsigned()) return n.get<std::uint64_t>();
  if (n.is_number_integer() && n.get<long long>() >= 0) return static_cast<std::uint64_t>(n.get<long long>());
  // Seeds above 2^53 are easier to write as strings; decimal or 0x hex.
  if (n.is_string()) {
    const std::string s = n.get<std::string>();
    std::uint64_t v = 0;
    const bool hex = s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0;
    const char* b = s.data() + (hex ? 2 : 0);
    const auto [p, ec] = std::from_chars(b, s.data() + s.size(), v, hex ? 16 : 10);
    if (ec == std::errc() && p == s.data() + s.size() && p != b) return v;
  }
  error(path, "expected an unsigned 64-bit integer (number or decimal/hex string)");
}

std::string Reader::string(const std::string& path) {
  const json& n = at(path);
  if (!n.is_string()) error(path, "expected a string");
  return n.get<std::string>();
}

bool Reader::boolean(const std::string& path) {
  const json& n = at(path);
  if (!n.is_boolean()) error(path, "expected true or false");
  return n.get<bool>();
}

std::vector<double> Reader::numbers(const std::string& path) {
  const json& n = at(path);
  if (!n.is_array()) error(path, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : n) {
    if (!e.is_number() || !std::isfinite(e.get<double>())) error(path, "expected an array of finite numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Interval Reader::interval(const std::string& path) {
  const auto v = numbers(path);
  if (v.size() != 2) error(path, "expected [lo, hi]");
  if (!(v[0] < v[1])) error(path, "needs lo < hi");
  return {v[0], v[1]};
}

void Reader::walk(const json& node, const std::string& prefix) const {
  if (used_.count(prefix)) return;
  // null removes a preset value; nothing to consume.
  if (node.is_null()) return;
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) walk(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
    if (!node.empty() || prefix.empty()) return;
    const auto next = used_.lower_bound(prefix + ".");
    if (next != used_.end() && next->rfind(prefix + ".", 0) == 0) return;
  }
  if (!prefix.empty()) error(prefix, "not used by this verb (misspelled or not applicable)");
}

void Reader::reject_unused(const json& user) const { walk(user, ""); }

// ---------------------------------------------------------------------------

ModelSpec read_model(Reader& r, const std::string& p) {
  ModelSpec m;
  m.kind = r.string(p + ".kind");
  if (m.kind == "generic-hermitian") {
    m.dimension = r.count(p + ".dimension", 2, 4096);
    if (r.has(p + ".epsilon")) m.epsilon = r.number(p + ".epsilon", 0.0);
    return m;
  }
  if (m.kind != "free" && m.kind != "stark-fd" && m.kind != "schrodinger")
    Reader::error(p + ".kind", "unknown model '" + m.kind + "' (free, stark-fd, generic-hermitian, schrodinger)");
  m.x_max = r.positive(p + ".x_max");
  m.points = r.count(p + ".points", 8, 1 << 16);
  if (m.kind == "stark-fd") {
    m.field = r.number(p + ".field");
    if (r.has(p + ".epsilon")) m.epsilon = r.number(p + ".epsilon", 0.0);
    if (m.points > 4096) Reader::error(p + ".points", "dense models are limited to 4096 points");
  }
  if (m.kind == "schrodinger") {
    const std::string vp = p + ".potential";
    const double decay = r.has(vp + ".decay_epsilon") ? r.positive(vp + ".decay_epsilon") : 1.0;
    const bool has_expr = r.has(vp + ".expression"), has_file = r.has(vp + ".file");
    if (has_expr == has_file) Reader::error(vp, "give exactly one of 'expression' (in x) or 'file'");
    if (has_expr) {
      m.potential_source = r.string(vp + ".expression");
      Expression e = [&] {
        try {
          return Expression::parse(m.potential_source, "x");
        } catch (const Error& err) {
          Reader::error(vp + ".expression", err.what());
        }
      }();
      m.potential = PotentialSpec::multiplicative([e](double x) { return e(x); }, decay);
    } else {
      m.potential_source = r.string(vp + ".file");
      try {
        m.potential = load_potential_file(m.potential_source, decay);
      } catch (const Error& err) {
        Reader::error(vp + ".file", err.what());
      }
    }
  }
  return m;
}

SpatialGrid model_grid(const ModelSpec& m, std::optional<std::size_t> points, std::optional<double> x_max) {
  if (m.kind == "generic-hermitian") return SpatialGrid(1.0, points.value_or(m.dimension));
  return SpatialGrid(x_max.value_or(m.x_max), points.value_or(m.points));
}

CMatrix seeded_hermitian(std::uint64_t seed, Eigen::Index n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  CMatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = cplx(normal(rng), normal(rng));
  return 0.5 * (m + m.adjoint());
}

OperatorModel build_model(const ModelSpec& m, std::uint64_t seed, std::optional<std::size_t> points,
                          std::optional<double> x_max) {
  const SpatialGrid g = model_grid(m, points, x_max);
  if (m.kind == "free") return make_free_laplacian(g);
  if (m.kind == "stark-fd") return make_stark_fd(g, m.field).with_route(EpsilonSmoothed{m.epsilon});
  if (m.kind == "generic-hermitian")
    return make_generic_hermitian(g, seeded_hermitian(seed, static_cast<Eigen::Index>(g.size())))
        .with_route(EpsilonSmoothed{m.epsilon});
  return make_perturbed_schrodinger(g, *m.potential);
}

SpectralSpec read_spectral(Reader& r, const std::string& p) {
  SpectralSpec s;
  s.sigma = r.string(p + ".sigma");
  s.a = r.string(p + ".a");
  s.window = r.interval(p + ".window");
  if (r.has(p + ".breakpoint_margin")) s.breakpoint_margin = r.positive(p + ".breakpoint_margin");
  for (const auto& [field, text] : {std::pair{".sigma", s.sigma}, std::pair{".a", s.a}}) {
    try {
      Expression::parse(text);
    } catch (const Error& e) {
      Reader::error(p + field, e.what());
    }
  }
  s.sf = spectral_function_from_expressions(s.sigma, s.a, s.window, s.breakpoint_margin);
  try {
    s.sf.validate();
  } catch (const Error& e) {
    Reader::error(p + ".a", e.what());
  }
  if (s.sf.components().empty()) Reader::error(p + ".window", "no admissible points left after removing breakpoints");
  return s;
}

FunctionSpec read_function(Reader& r, const std::string& path) {
  FunctionSpec f;
  f.center = r.number(path + ".center");
  f.width = r.positive(path + ".width");
  f.frequency = r.number(path + ".frequency");
  return f;
}

GridFunction sample_function(const FunctionSpec& f, const SpatialGrid& g, const std::string& path) {
  try {
    return GridFunction::sample(g, [f](double x) {
      const double y = (x - f.center) / f.width;
      return std::exp(-0.5 * y * y) * std::polar(1.0, f.frequency * x);
    });
  } catch (const Error& e) {
    Reader::error(path, e.what());
  }
}

// ---------------------------------------------------------------------------

CheckRecord upper_check(const std::string& name, double value, double bound, double tol, std::string note) {
  CheckRecord c{name, value, bound, bound != 0.0 ? value / bound - 1.0 : (value > 0.0 ? 1.0 : 0.0), tol, false,
                std::move(note)};
  c.pass = std::isfinite(value) && c.metric <= tol;
  return c;
}

CheckRecord residual_check(const std::string& name, double value, double reference, double residual, double tol,
                           std::string note) {
  CheckRecord c{name, value, reference, residual, tol, std::isfinite(residual) && residual <= tol, std::move(note)};
  return c;
}

CheckRecord range_check(const std::string& name, double value, double lo, double hi, std::string note) {
  // metric: distance outside [lo, hi], 0 inside; reference: the midpoint.
  const double out = value < lo ? lo - value : (value > hi ? value - hi : 0.0);
  CheckRecord c{name, value, 0.5 * (lo + hi), out, 0.5 * (hi - lo), std::isfinite(value) && out == 0.0,
                std::move(note)};
  return c;
}

CheckRecord flag_check(const std::string& name, bool ok, std::string note) {
  return CheckRecord{name, ok ? 1.0 : 0.0, 1.0, ok ? 0.0 : 1.0, 0.0, ok, std::move(note)};
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void Table::row(std::vector<std::string> cells) {
  require(cells.size() == columns_.size(), ErrorCode::Inconsistency, "table row width mismatch");
  rows_.push_back(std::move(cells));
}

std::string Table::csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += v[i];
    }
    out += '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::string dat(const std::string& x_name, const std::string& y_name, const std::vector<double>& x,
                const std::vector<double>& y) {
  std::string out = "# " + x_name + " " + y_name + "\n";
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) out += fmt(x[i]) + " " + fmt(y[i]) + "\n";
  return out;
}

}  // namespace smoothlab::harness
