#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "sbppml/grid.hpp"

namespace sbppml {

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(std::size_t step, double t)
      : std::runtime_error("non-finite state at step " + std::to_string(step) + " (t = " +
                           std::to_string(t) + ")"),
        step_(step),
        t_(t) {}
  std::size_t step() const { return step_; }
  double time() const { return t_; }

 private:
  std::size_t step_;
  double t_;
};

/// Fixed step with dt * n_steps == t_final.
struct TimeGrid {
  double dt = 0.0;
  std::size_t n_steps = 0;
  double t_final = 0.0;

  /// Smallest number of equal steps not exceeding max_dt.
  static TimeGrid covering(double t_final, double max_dt);
  static TimeGrid fixed(double dt, std::size_t n_steps);
};

inline TimeGrid TimeGrid::covering(double t_final, double max_dt) {
  if (!(max_dt > 0.0) || !(t_final >= 0.0)) throw std::invalid_argument("invalid time grid");
  TimeGrid g;
  g.n_steps = static_cast<std::size_t>(std::ceil(t_final / max_dt * (1.0 - 1e-12)));
  g.t_final = t_final;
  g.dt = g.n_steps > 0 ? t_final / static_cast<double>(g.n_steps) : max_dt;
  return g;
}

inline TimeGrid TimeGrid::fixed(double dt, std::size_t n_steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  return {dt, n_steps, dt * static_cast<double>(n_steps)};
}

namespace detail {

template <class S>
void assign_axpy(S& out, const S& x, double a, const S& y) {
  if constexpr (std::is_same_v<S, FieldState>) {
    out = x;
    out.axpy(a, y);
  } else if constexpr (std::is_arithmetic_v<S>) {
    out = x + a * y;
  } else {
    out = x;
    for (std::size_t k = 0; k < static_cast<std::size_t>(out.size()); ++k) out[k] += a * y[k];
  }
}

template <class S>
void add_scaled(S& out, double a, const S& y) {
  if constexpr (std::is_same_v<S, FieldState>) {
    out.axpy(a, y);
  } else if constexpr (std::is_arithmetic_v<S>) {
    out += a * y;
  } else {
    for (std::size_t k = 0; k < static_cast<std::size_t>(out.size()); ++k) out[k] += a * y[k];
  }
}

template <class S>
bool finite(const S& u) {
  if constexpr (std::is_same_v<S, FieldState>) {
    return u.all_finite();
  } else if constexpr (std::is_arithmetic_v<S>) {
    return std::isfinite(u);
  } else {
    for (std::size_t k = 0; k < static_cast<std::size_t>(u.size()); ++k) {
      if (!std::isfinite(u[k])) return false;
    }
    return true;
  }
}

}  // namespace detail

/// Stage buffers reused between steps.
template <class S>
struct Rk4Workspace {
  S k[4];
  S stage;
};

struct NoStageObserver {
  template <class S>
  void operator()(int, double, const S&, const S&) const {}
};

/// Classical four-stage Runge-Kutta step, u <- u(t + dt).
/// rhs(t, u, out) writes du/dt into out. observer(stage, t_s, U_s, k_s) is
/// called once per stage with the stage value and its slope.
template <class S, class Rhs, class Observer = NoStageObserver>
void rk4_step(Rhs&& rhs, S& u, double t, double dt, Rk4Workspace<S>& ws,
              Observer&& observer = {}, std::size_t step_index = 0) {
  static constexpr double c[4] = {0.0, 0.5, 0.5, 1.0};
  for (int s = 0; s < 4; ++s) {
    const double ts = t + c[s] * dt;
    if (s == 0) {
      ws.stage = u;
    } else {
      detail::assign_axpy(ws.stage, u, c[s] * dt, ws.k[s - 1]);
    }
    rhs(ts, static_cast<const S&>(ws.stage), ws.k[s]);
    observer(s, ts, static_cast<const S&>(ws.stage), static_cast<const S&>(ws.k[s]));
  }
  detail::add_scaled(u, dt / 6.0, ws.k[0]);
  detail::add_scaled(u, dt / 3.0, ws.k[1]);
  detail::add_scaled(u, dt / 3.0, ws.k[2]);
  detail::add_scaled(u, dt / 6.0, ws.k[3]);
  if (!detail::finite(u)) throw BlowUpError(step_index, t + dt);
}

/// Convenience form for value-returning right-hand sides f(t, u) -> du/dt.
template <class S, class F>
S rk4_step_value(F&& f, const S& u, double t, double dt) {
  Rk4Workspace<S> ws;
  S v = u;
  rk4_step([&](double ts, const S& x, S& out) { out = f(ts, x); }, v, t, dt, ws);
  return v;
}

}  // namespace sbppml
