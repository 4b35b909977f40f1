#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uwsn/models.hpp"

namespace uwsn {

enum class Method { RungeKutta4, ExplicitEuler };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

struct IntegrationConfig {
  double dt = 0.01;
  double horizon = 100.0;
  Method method = Method::RungeKutta4;
  std::size_t record_every = 1;
  double extinction_threshold = 1e-6;
};

void validate(const IntegrationConfig& cfg);

enum class EventKind { Extinction, PeakI };

std::string_view to_string(EventKind k);

struct Event {
  EventKind kind;
  double time;
};

template <typename Scalar = double>
struct Trajectory {
  std::vector<double> times;
  std::vector<State<Scalar>> states;
  std::vector<Event> events;

  std::size_t size() const { return times.size(); }
  const State<Scalar>& back() const { return states.back(); }

  std::optional<double> event_time(EventKind kind) const {
    for (const Event& e : events)
      if (e.kind == kind) return e.time;
    return std::nullopt;
  }
};

template <typename Scalar>
State<Scalar> step(const VectorField<Scalar>& f, const State<Scalar>& x, Scalar dt, Method method) {
  if (method == Method::ExplicitEuler) return x + dt * f(x);
  const State<Scalar> k1 = f(x);
  const State<Scalar> k2 = f(x + (dt / 2) * k1);
  const State<Scalar> k3 = f(x + (dt / 2) * k2);
  const State<Scalar> k4 = f(x + dt * k3);
  return x + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

/// Number of fixed steps covering `horizon`.
std::size_t step_count(const IntegrationConfig& cfg);

/// Fixed-step integration from t = 0. Samples every `record_every` steps plus the final step.
/// Extinction is logged at the first step where i drops below the threshold, PeakI at the
/// step holding the global maximum of i.
template <typename Scalar = double>
Trajectory<Scalar> integrate(const ModelSpec& spec, const State<Scalar>& init,
                             const IntegrationConfig& cfg) {
  validate(cfg);
  check_state(spec.variant, init.template cast<double>());
  const VectorField<Scalar> f(spec);
  const std::size_t n = step_count(cfg);
  const Scalar dt = Scalar(cfg.dt);
  const Eigen::Index dim = dimension(spec.variant);

  Trajectory<Scalar> traj;
  traj.times.reserve(n / cfg.record_every + 2);
  traj.states.reserve(n / cfg.record_every + 2);

  State<Scalar> x = init;
  for (Eigen::Index k = dim; k < kStateSize; ++k) x(k) = Scalar(0);

  std::optional<double> extinction;
  Scalar peak = x(kI);
  double peak_time = 0.0;
  auto observe = [&](std::size_t k, const State<Scalar>& state) {
    const double t = static_cast<double>(k) * cfg.dt;
    if (!extinction && double(state(kI)) < cfg.extinction_threshold) extinction = t;
    if (state(kI) > peak) {
      peak = state(kI);
      peak_time = t;
    }
    if (k % cfg.record_every == 0 || k == n) {
      traj.times.push_back(t);
      traj.states.push_back(state);
    }
  };

  observe(0, x);
  for (std::size_t k = 1; k <= n; ++k) {
    State<Scalar> next = step(f, x, dt, cfg.method);
    for (Eigen::Index c = 0; c < dim; ++c) {
      using std::isfinite;
      if (!isfinite(next(c))) {
        throw NumericError("integration produced a non-finite state at t = " +
                               std::to_string(static_cast<double>(k) * cfg.dt),
                           static_cast<double>(k - 1) * cfg.dt);
      }
    }
    x = next;
    observe(k, x);
  }

  if (extinction) traj.events.push_back({EventKind::Extinction, *extinction});
  traj.events.push_back({EventKind::PeakI, peak_time});
  return traj;
}

struct OrderEstimate {
  /// Observed order; nullopt when the coarse error is zero (constant solution).
  std::optional<double> order;
  double coarse_error = 0.0;  ///< |x(dt) - x(dt/2)| at the horizon, max-norm
  double fine_error = 0.0;    ///< |x(dt/2) - x(dt/4)| at the horizon, max-norm
};

/// Richardson-style observed order from three runs with dt, dt/2, dt/4.
OrderEstimate convergence_order_check(const ModelSpec& spec, const CompartmentState& init,
                                      Method method, double dt = 0.2, double horizon = 20.0);

}  // namespace uwsn
