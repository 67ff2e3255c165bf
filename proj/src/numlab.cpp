#include "pfi/numlab.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

namespace pfi::numlab {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) : nvars_(p.nvars()) {
  for (const auto& [mono, c] : p.terms()) {
    const auto z = c.to_complex();
    if (!c.is_real() && std::abs(z.imag()) > kFloatIdentityTolerance)
      throw std::invalid_argument("cannot integrate a polynomial with complex coefficients");
    coefs_.push_back(z.real());
    for (auto e : mono.exponents()) exps_.push_back(e);
  }
}

double CompiledPolynomial::operator()(const State& x) const {
  double sum = 0;
  for (std::size_t t = 0; t < coefs_.size(); ++t) {
    double term = coefs_[t];
    const auto* e = &exps_[t * nvars_];
    for (std::size_t k = 0; k < nvars_; ++k)
      for (std::uint32_t j = 0; j < e[k]; ++j) term *= x[k];
    sum += term;
  }
  return sum;
}

CompiledField::CompiledField(const PoissonSystem& sys) {
  for (const auto& f : hamiltonian_vector_field(sys)) components_.emplace_back(f);
}

void CompiledField::operator()(const State& x, State& dxdt, double) const {
  for (std::size_t i = 0; i < components_.size(); ++i) dxdt[i] = components_[i](x);
}

namespace {

bool finite(const State& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

Trajectory integrate(const PoissonSystem& sys, const State& x0, double t_end, const IntegrateOptions& options) {
  if (!(options.dt > 0)) throw std::invalid_argument("dt must be positive");
  if (!(t_end > 0)) throw std::invalid_argument("t_end must be positive");
  if (x0.size() != sys.n()) throw std::invalid_argument("x0 has the wrong dimension");
  if (!finite(x0)) throw std::invalid_argument("x0 must be finite");
  const CompiledField field(sys);

  Trajectory traj;
  traj.method = options.method;
  traj.dt = options.dt;
  traj.tolerance = options.method == Method::RK45 ? options.tolerance : 0;
  traj.times.push_back(0);
  traj.states.push_back(x0);

  State x = x0;
  double t = 0;
  auto record = [&](double at) -> bool {
    if (!finite(x)) {
      traj.completed = false;
      traj.message = "non-finite state near t = " + std::to_string(at);
      return false;
    }
    traj.times.push_back(at);
    traj.states.push_back(x);
    return true;
  };

  if (options.method == Method::RK4) {
    // Classical RK4 with compensated accumulation of the state update, so the
    // measured drift at small dt is truncation rather than round-off.
    const std::size_t n = x.size();
    State k1(n), k2(n), k3(n), k4(n), tmp(n), carry(n, 0.0);
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / options.dt - 1e-9));
    for (std::size_t k = 1; k <= steps; ++k) {
      const double next = k == steps ? t_end : static_cast<double>(k) * options.dt;
      const double h = next - t;
      field(x, k1, t);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h / 2 * k1[i];
      field(tmp, k2, t + h / 2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h / 2 * k2[i];
      field(tmp, k3, t + h / 2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
      field(tmp, k4, next);
      for (std::size_t i = 0; i < n; ++i) {
        const double y = h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) - carry[i];
        const double sum = x[i] + y;
        carry[i] = (sum - x[i]) - y;
        x[i] = sum;
      }
      t = next;
      if (!record(t)) break;
    }
  } else {
    auto stepper = odeint::make_controlled(options.tolerance, options.tolerance, odeint::runge_kutta_dopri5<State>());
    double dt = options.dt;
    std::size_t rejections = 0;
    while (t < t_end) {
      double step = std::min(dt, t_end - t);
      const bool last = step == t_end - t;
      const auto result = stepper.try_step(field, x, t, step);
      if (result == odeint::fail) {
        if (++rejections > 500 || !(step > 0)) {
          traj.completed = false;
          traj.message = "step size collapsed";
          break;
        }
        dt = step;
        continue;
      }
      rejections = 0;
      if (last) t = t_end;
      dt = step;
      if (!record(t)) break;
    }
  }
  return traj;
}

std::vector<Drift> drift_report(const Trajectory& traj, const std::vector<std::pair<std::string, Polynomial>>& invariants) {
  std::vector<Drift> out;
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  for (const auto& [name, p] : invariants) {
    if (p.nvars() != n) throw std::invalid_argument("invariant '" + name + "' has the wrong arity");
    const CompiledPolynomial f(p);
    const double start = f(traj.states.front());
    const double scale = std::max(1.0, std::abs(start));
    double worst = 0;
    for (const auto& x : traj.states) worst = std::max(worst, std::abs(f(x) - start) / scale);
    out.push_back({name, worst});
  }
  return out;
}

double fd_gradient_check(const Polynomial& p, const State& point, double h) {
  if (!(h > 0)) throw std::invalid_argument("h must be positive");
  if (point.size() != p.nvars()) throw std::invalid_argument("point has the wrong dimension");
  const CompiledPolynomial f(p);
  double worst = 0;
  for (std::size_t k = 0; k < point.size(); ++k) {
    State up = point, down = point;
    up[k] += h;
    down[k] -= h;
    const double fd = (f(up) - f(down)) / (2 * h);
    worst = std::max(worst, std::abs(fd - CompiledPolynomial(diff(p, k))(point)));
  }
  return worst;
}

void write_csv(std::ostream& os, const Trajectory& traj, const std::vector<std::string>& names,
               const std::vector<std::pair<std::string, Polynomial>>& invariants) {
  std::vector<CompiledPolynomial> compiled;
  for (const auto& inv : invariants) compiled.emplace_back(inv.second);
  os << "t";
  for (const auto& n : names) os << ',' << n;
  for (const auto& inv : invariants) os << ',' << inv.first;
  os << '\n' << std::setprecision(17);
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    os << traj.times[r];
    for (double v : traj.states[r]) os << ',' << v;
    for (const auto& f : compiled) os << ',' << f(traj.states[r]);
    os << '\n';
  }
}

std::string_view to_string(Method method) { return method == Method::RK4 ? "RK4" : "RK45"; }

}  // namespace pfi::numlab
