#include "pfi/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "pfi/darboux.hpp"
#include "pfi/linalg.hpp"

namespace pfi {

namespace {

Coefficient half(Mode mode) {
  return mode == Mode::Exact ? Coefficient::exact(mpq_class(1, 2)) : Coefficient::floating(0.5);
}

Coefficient as_float(const Coefficient& c) { return Coefficient::floating(c.to_complex()); }

std::vector<Polynomial> float_all(const std::vector<Polynomial>& ps) {
  std::vector<Polynomial> out;
  for (const auto& p : ps) out.push_back(to_float(p));
  return out;
}

// Coordinates x_lo..x_hi-1 of R^n as polynomials.
std::vector<Polynomial> variables(std::size_t n, std::size_t lo, std::size_t hi, Mode mode) {
  std::vector<Polynomial> out;
  for (std::size_t k = lo; k < hi; ++k) out.push_back(Polynomial::variable(n, k, mode));
  return out;
}

CoeffMatrix symplectic(std::size_t m, Mode mode) {
  CoeffMatrix s(2 * m, 2 * m, mode);
  for (std::size_t i = 0; i < m; ++i) {
    s(i, m + i) = Coefficient::one(mode);
    s(m + i, i) = -Coefficient::one(mode);
  }
  return s;
}

bool matrices_agree(const CoeffMatrix& a, const CoeffMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (a.mode() == Mode::Exact && b.mode() == Mode::Exact) {
        if (!(a(r, c) == b(r, c))) return false;
      } else if (std::abs(a(r, c).to_complex() - b(r, c).to_complex()) > kFloatIdentityTolerance) {
        return false;
      }
    }
  return true;
}

bool structures_agree(const StructureMatrix& a, const StructureMatrix& b) {
  if (a.n() != b.n()) return false;
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t j = 0; j < a.n(); ++j) {
      Polynomial x = a(i, j), y = b(i, j);
      if (x.mode() != y.mode()) {
        x = to_float(x);
        y = to_float(y);
      }
      if (!vanishes(x - y)) return false;
    }
  return true;
}

std::vector<std::size_t> momentum_indices(std::size_t m) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m; ++i) idx.push_back(m + i);
  return idx;
}

}  // namespace

// ------------------------------------------------------------ NaturalSpec

NaturalSpec::NaturalSpec(std::size_t m, std::vector<Coefficient> mu, Polynomial v)
    : m_(m), mu_(std::move(mu)), v_(std::move(v)) {
  if (m_ == 0) throw std::invalid_argument("natural Hamiltonian needs m >= 1");
  if (mu_.size() != m_) throw std::invalid_argument("mu must have m entries");
  if (v_.nvars() != m_) throw std::invalid_argument("V must be a polynomial in m variables");
  if (v_.is_constant()) throw std::invalid_argument("V must be non-constant");
  for (const auto& c : mu_)
    if (c.mode() != v_.mode()) throw ModeMismatch("mu and V use different modes");
}

std::size_t NaturalSpec::nonzero_mu() const {
  return static_cast<std::size_t>(std::count_if(mu_.begin(), mu_.end(), [](const Coefficient& c) {
    return !c.is_negligible(kFloatIdentityTolerance);
  }));
}

Polynomial NaturalSpec::natural_hamiltonian(std::size_t s) const {
  const std::size_t n = 2 * m_ + s;
  const Mode mode = this->mode();
  Polynomial h = compose(v_, variables(n, 0, m_, mode));
  for (std::size_t i = 0; i < m_; ++i) {
    const auto p = Polynomial::variable(n, m_ + i, mode);
    h += p * p * (half(mode) * mu_[i]);
  }
  return h;
}

NaturalSpec NaturalSpec::to_float() const {
  std::vector<Coefficient> mu;
  for (const auto& c : mu_) mu.push_back(as_float(c));
  return NaturalSpec(m_, std::move(mu), pfi::to_float(v_));
}

// ------------------------------------------------------------ TheoremInstance

std::string_view to_string(TheoremKind kind) {
  switch (kind) {
    case TheoremKind::T1: return "T1";
    case TheoremKind::T2: return "T2";
    case TheoremKind::T3: return "T3";
  }
  return "?";
}

TheoremInstance::TheoremInstance(TheoremKind kind, NaturalSpec spec, std::optional<CoeffMatrix> a, PolyMap map,
                                 std::size_t s, std::optional<Polynomial> w)
    : kind_(kind), spec_(std::move(spec)), a_(std::move(a)), chart_map_(std::move(map)), s_(s), w_(std::move(w)) {}

TheoremInstance TheoremInstance::theorem1(NaturalSpec spec, CoeffMatrix a) {
  const std::size_t m = spec.m();
  if (a.rows() != m || a.cols() != m) throw std::invalid_argument("A must be m x m");
  if (a.mode() != spec.mode()) {
    if (a.mode() == Mode::Exact) a = a.to_float();
    else spec = spec.to_float();
  }
  auto a_inv = a.inverse();
  if (!a_inv) throw std::invalid_argument("A is singular");
  const auto at = a.transpose();
  auto map = PolyMap::linear(CoeffMatrix::block_diagonal({&at, &*a_inv}));
  return TheoremInstance(TheoremKind::T1, std::move(spec), std::move(a), std::move(map), 0, std::nullopt);
}

TheoremInstance TheoremInstance::theorem2(NaturalSpec spec, PolyMap map) {
  if (map.n() != 2 * spec.m()) throw std::invalid_argument("theorem 2 map must act on R^{2m}");
  if (map.mode() != spec.mode()) {
    if (map.mode() == Mode::Exact) map = map.to_float();
    else spec = spec.to_float();
  }
  return TheoremInstance(TheoremKind::T2, std::move(spec), std::nullopt, std::move(map), 0, std::nullopt);
}

TheoremInstance TheoremInstance::theorem3(NaturalSpec spec, PolyMap map, std::size_t s, std::optional<Polynomial> w) {
  if (map.n() != 2 * spec.m() + s) throw std::invalid_argument("theorem 3 map must act on R^{2m+s}");
  if (w && s == 0) throw std::invalid_argument("W needs s >= 1");
  if (w && w->nvars() != s) throw std::invalid_argument("W must be a polynomial in s variables");
  Mode mode = spec.mode();
  if (map.mode() == Mode::Float || (w && w->mode() == Mode::Float)) mode = Mode::Float;
  if (mode == Mode::Float) {
    if (spec.mode() == Mode::Exact) spec = spec.to_float();
    if (map.mode() == Mode::Exact) map = map.to_float();
    if (w && w->mode() == Mode::Exact) w = pfi::to_float(*w);
  }
  if (s > 0 && !w) w = Polynomial(s, mode);
  return TheoremInstance(TheoremKind::T3, std::move(spec), std::nullopt, std::move(map), s, std::move(w));
}

Polynomial TheoremInstance::chart_hamiltonian() const {
  Polynomial h = spec_.natural_hamiltonian(s_);
  if (w_) h += compose(*w_, variables(n(), 2 * m(), n(), mode()));
  return h;
}

TheoremInstance TheoremInstance::to_float() const {
  switch (kind_) {
    case TheoremKind::T1: return theorem1(spec_.to_float(), a_->to_float());
    case TheoremKind::T2: return theorem2(spec_.to_float(), chart_map_.to_float());
    case TheoremKind::T3:
      return theorem3(spec_.to_float(), chart_map_.to_float(), s_,
                      w_ ? std::optional<Polynomial>(pfi::to_float(*w_)) : std::nullopt);
  }
  return *this;
}

std::optional<TheoremInstance> TheoremInstance::rationalized(double tol) const {
  if (mode() == Mode::Exact) return *this;
  auto snap_all = [&](const std::vector<Polynomial>& ps) -> std::optional<std::vector<Polynomial>> {
    std::vector<Polynomial> out;
    for (const auto& p : ps) {
      auto r = rationalize(p, tol);
      if (!r) return std::nullopt;
      out.push_back(std::move(*r));
    }
    return out;
  };
  std::vector<Coefficient> mu;
  for (const auto& c : spec_.mu()) {
    auto r = rationalize(c, tol);
    if (!r) return std::nullopt;
    mu.push_back(*r);
  }
  auto v = rationalize(spec_.V(), tol);
  if (!v) return std::nullopt;
  NaturalSpec spec(spec_.m(), std::move(mu), std::move(*v));
  try {
    if (kind_ == TheoremKind::T1) {
      CoeffMatrix a(a_->rows(), a_->cols(), Mode::Exact);
      for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) {
          auto x = rationalize((*a_)(r, c), tol);
          if (!x) return std::nullopt;
          a(r, c) = *x;
        }
      return theorem1(std::move(spec), std::move(a));
    }
    auto fwd = snap_all(chart_map_.forward());
    auto inv = snap_all(chart_map_.inverse());
    if (!fwd || !inv) return std::nullopt;
    PolyMap map(std::move(*fwd), std::move(*inv));
    if (kind_ == TheoremKind::T2) return theorem2(std::move(spec), std::move(map));
    std::optional<Polynomial> w;
    if (w_) {
      w = rationalize(*w_, tol);
      if (!w) return std::nullopt;
    }
    return theorem3(std::move(spec), std::move(map), s_, std::move(w));
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

// ------------------------------------------------------------ systems

Theorem1System build_theorem1_system(const CoeffMatrix& a, const NaturalSpec& spec, const VarTable& vars) {
  auto inst = TheoremInstance::theorem1(spec, a);
  const std::size_t m = inst.m();
  const Mode mode = inst.mode();
  const auto a_inv_t = inst.A()->inverse()->transpose();
  auto b = CoeffMatrix::block_diagonal({&a_inv_t, &*inst.A()});
  const auto s = symplectic(m, mode);
  if (!matrices_agree(b * s * b.transpose(), s)) throw std::logic_error("B is not symplectic");
  const auto h = compose(inst.chart_hamiltonian(), inst.chart_map().forward());
  PoissonSystem sys(canonical_matrix(m, 0, mode), h, {}, vars, m, 0);
  return {std::move(sys), std::move(b)};
}

PoissonSystem build_poisson_from_diffeo(const TheoremInstance& inst, const VarTable& vars) {
  const auto& map = inst.chart_map();
  auto j = build_structure_from_diffeo(map, inst.m(), inst.s());
  auto h = compose(inst.chart_hamiltonian(), map.forward());
  std::vector<Polynomial> casimirs(map.forward().begin() + static_cast<std::ptrdiff_t>(2 * inst.m()),
                                   map.forward().end());
  return PoissonSystem(std::move(j), std::move(h), std::move(casimirs), vars, inst.m(), inst.s());
}

PoissonSystem build_system(const TheoremInstance& inst, const VarTable& vars) {
  if (inst.kind() == TheoremKind::T1) return build_theorem1_system(*inst.A(), inst.spec(), vars).system;
  return build_poisson_from_diffeo(inst, vars);
}

PoissonSystem chart_system(const TheoremInstance& inst) {
  const std::size_t m = inst.m(), s = inst.s();
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= m; ++i) names.push_back("q" + std::to_string(i));
  for (std::size_t i = 1; i <= m; ++i) names.push_back("p" + std::to_string(i));
  for (std::size_t i = 1; i <= s; ++i) names.push_back("z" + std::to_string(i));
  return PoissonSystem(canonical_matrix(m, s, inst.mode()), inst.chart_hamiltonian(),
                       variables(inst.n(), 2 * m, inst.n(), inst.mode()), VarTable(names), m, s);
}

// ------------------------------------------------------------ H_F

IntegralConstruction construct_HF(const TheoremInstance& inst, const Polynomial& f, bool require_proper) {
  const std::size_t m = inst.m();
  if (f.nvars() != inst.n()) throw std::invalid_argument("F must be written in the 2m+s chart variables");
  for (std::size_t k = 2 * m; k < inst.n(); ++k)
    if (f.depends_on(k)) throw std::invalid_argument("F must not depend on the Casimir coordinates");
  if (f.is_zero()) throw NotDarboux("F is the zero polynomial");

  const auto chart = chart_system(inst);
  VectorField field = hamiltonian_vector_field(chart);
  Polynomial fc = f;
  const bool floating = inst.mode() == Mode::Float || f.mode() == Mode::Float;
  if (floating) {
    if (field.front().mode() == Mode::Exact) field = float_all(field);
    if (fc.mode() == Mode::Exact) fc = to_float(fc);
  }

  auto k = cofactor_of(field, fc);
  if (!k) throw NotDarboux("X F is not divisible by F in the chart system");
  const auto report = verify_candidate(field, fc, *k);
  if (!report.ok) throw NotDarboux("cofactor check failed");
  if (require_proper && !report.proper) throw std::invalid_argument("F is not a proper Darboux polynomial");

  const auto idx = momentum_indices(m);
  Polynomial hf = fc * sign_flip(fc, idx);
  bool rationalized = false;
  const TheoremInstance* target = &inst;
  std::optional<TheoremInstance> exact_inst;
  if (hf.mode() == Mode::Float) {
    exact_inst = inst.rationalized();
    auto exact = rationalize(hf, kFloatIdentityTolerance, kDefaultMaxDenominator);
    // Keep the rational form only when it is an exact first integral.
    if (exact_inst && exact &&
        lie_derivative(hamiltonian_vector_field(chart_system(*exact_inst)), *exact).is_zero()) {
      hf = std::move(*exact);
      target = &*exact_inst;
      rationalized = true;
    }
  }

  const auto& map = target->chart_map();
  Polynomial native = hf.mode() == map.mode() ? compose(hf, map.forward()) : compose(hf, map.to_float().forward());
  return IntegralConstruction{fc, *k, report.proper, std::move(hf), std::move(native), rationalized};
}

// ------------------------------------------------------------ certificates

FirstIntegralReport verify_first_integral(const PoissonSystem& sys, const Polynomial& integral, double tol) {
  if (integral.nvars() != sys.n()) throw std::invalid_argument("integral dimension does not match the system");
  FirstIntegralReport out;
  if (sys.mode() == integral.mode()) {
    out.residual = lie_derivative(hamiltonian_vector_field(sys), integral);
  } else {
    out.residual = lie_derivative(float_all(hamiltonian_vector_field(sys)), to_float(integral));
  }
  out.ok = out.residual.mode() == Mode::Exact ? out.residual.is_zero() : out.residual.max_abs_coefficient() < tol;
  return out;
}

IndependenceReport independence_report(const PoissonSystem& sys, const Polynomial& integral, std::size_t samples,
                                       std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("independence_report needs samples >= 1");
  std::vector<const Polynomial*> funcs = {&sys.hamiltonian()};
  for (const auto& d : sys.casimirs()) funcs.push_back(&d);
  funcs.push_back(&integral);

  const std::size_t n = sys.n();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-10, 10), den(1, 5);
  IndependenceReport out;
  for (std::size_t t = 0; t < samples; ++t) {
    std::vector<std::complex<double>> point(n);
    for (auto& x : point) x = static_cast<double>(num(rng)) / den(rng);
    Eigen::MatrixXcd g(static_cast<Eigen::Index>(funcs.size()), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < funcs.size(); ++r) {
      const auto grad = gradient_at(*funcs[r], point);
      for (std::size_t c = 0; c < n; ++c) g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = grad[c];
      const double norm = g.row(static_cast<Eigen::Index>(r)).norm();
      if (norm > 0) g.row(static_cast<Eigen::Index>(r)) /= norm;
    }
    out.ranks.push_back(linalg::numeric_rank(g, 1e-9));
  }
  const std::size_t target = sys.casimirs().size() + 2;
  out.additional = std::find(out.ranks.begin(), out.ranks.end(), target) != out.ranks.end();
  return out;
}

// ------------------------------------------------------------ hypotheses

bool HypothesisReport::all_ok() const {
  return std::all_of(flags.begin(), flags.end(), [](const HypothesisFlag& f) { return f.ok; });
}

HypothesisReport hypothesis_report(const TheoremInstance& inst, const std::optional<Polynomial>& f) {
  HypothesisReport out;
  const auto& map = inst.chart_map();
  const std::size_t n = inst.n();

  {
    bool ok = true;
    const auto id = variables(n, 0, n, map.mode());
    for (std::size_t k = 0; k < n && ok; ++k) {
      ok = vanishes(compose(map.forward()[k], map.inverse()) - id[k]) &&
           vanishes(compose(map.inverse()[k], map.forward()) - id[k]);
    }
    out.flags.push_back({"diffeomorphism", ok, ok ? "inverse verified" : "round trip fails"});
  }

  {
    bool ok = false;
    std::string detail;
    try {
      const auto j = build_structure_from_diffeo(map, inst.m(), inst.s());
      ok = structures_agree(transform_structure(j, map), canonical_matrix(inst.m(), inst.s(), map.mode()));
      detail = ok ? "J transforms to the canonical matrix" : "J does not transform to the canonical matrix";
    } catch (const std::exception& e) {
      detail = e.what();
    }
    out.flags.push_back({"structure", ok, detail});
  }

  {
    std::ostringstream d;
    d << "deg V = " << inst.spec().V().total_degree();
    out.flags.push_back({"potential_degree", inst.spec().potential_degree_ok(), d.str()});
  }

  if (f) {
    bool ok = false;
    std::string detail;
    try {
      auto c = construct_HF(inst, *f, false);
      ok = c.proper;
      detail = ok ? "proper" : "Darboux but not proper";
    } catch (const std::exception& e) {
      detail = e.what();
    }
    out.flags.push_back({"proper_darboux", ok, detail});
  }

  {
    const bool ok = inst.m() >= 2 && inst.spec().nonzero_mu() >= 2;
    std::ostringstream d;
    d << "m = " << inst.m() << ", nonzero mu = " << inst.spec().nonzero_mu();
    out.flags.push_back({"additionality", ok, d.str()});
  }
  return out;
}

}  // namespace pfi
