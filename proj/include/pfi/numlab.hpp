#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pfi/poisson.hpp"

namespace pfi::numlab {

enum class Method { RK4, RK45 };

struct IntegrateOptions {
  Method method = Method::RK4;
  double dt = 1e-3;         // fixed step (RK4) or initial step (RK45)
  double tolerance = 1e-10; // RK45 absolute and relative error target
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  Method method = Method::RK4;
  double dt = 0;
  double tolerance = 0;
  bool completed = true;
  std::string message;  // why integration stopped early
};

/// Real polynomial evaluated from a flat term table.
class CompiledPolynomial {
 public:
  /// Throws std::invalid_argument when p has a non-real coefficient.
  explicit CompiledPolynomial(const Polynomial& p);
  std::size_t nvars() const { return nvars_; }
  double operator()(const std::vector<double>& x) const;

 private:
  std::size_t nvars_;
  std::vector<double> coefs_;
  std::vector<std::uint32_t> exps_;
};

/// The real vector field J grad H.
class CompiledField {
 public:
  explicit CompiledField(const PoissonSystem& sys);
  std::size_t n() const { return components_.size(); }
  void operator()(const std::vector<double>& x, std::vector<double>& dxdt, double t) const;

 private:
  std::vector<CompiledPolynomial> components_;
};

/// Integrates x' = J grad H from x0 over [0, t_end]; the last step lands on t_end.
/// Throws std::invalid_argument for non-real systems, dt <= 0, t_end <= 0 or a
/// wrong |x0|. A non-finite state stops integration and returns the trajectory
/// up to the last good state with completed = false.
Trajectory integrate(const PoissonSystem& sys, const std::vector<double>& x0, double t_end,
                     const IntegrateOptions& options = {});

struct Drift {
  std::string name;
  double max_relative = 0;
};

/// max_t |P(x(t)) - P(x0)| / max(1, |P(x0)|) for each named invariant.
std::vector<Drift> drift_report(const Trajectory& traj, const std::vector<std::pair<std::string, Polynomial>>& invariants);

/// Max over variables of |central difference - symbolic derivative| at point.
double fd_gradient_check(const Polynomial& p, const std::vector<double>& point, double h);

/// CSV with header t,<names>[,<invariant names>] and 17 significant digits.
void write_csv(std::ostream& os, const Trajectory& traj, const std::vector<std::string>& names,
               const std::vector<std::pair<std::string, Polynomial>>& invariants = {});

std::string_view to_string(Method method);

}  // namespace pfi::numlab
