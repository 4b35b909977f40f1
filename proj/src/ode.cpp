#include "uwsn/ode.hpp"

#include <cmath>

namespace uwsn {

std::string_view to_string(Method m) {
  return m == Method::RungeKutta4 ? "rk4" : "euler";
}

Method parse_method(std::string_view name) {
  if (name == "rk4") return Method::RungeKutta4;
  if (name == "euler") return Method::ExplicitEuler;
  throw ModelError("unknown integration method '" + std::string(name) + "' (expected rk4 or euler)");
}

std::string_view to_string(EventKind k) {
  return k == EventKind::Extinction ? "extinction" : "peak_i";
}

void validate(const IntegrationConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ModelError("dt must be > 0");
  if (!(cfg.horizon >= cfg.dt) || !std::isfinite(cfg.horizon)) throw ModelError("horizon must be >= dt");
  if (cfg.record_every < 1) throw ModelError("record_every must be >= 1");
}

std::size_t step_count(const IntegrationConfig& cfg) {
  // Tolerate horizon/dt landing a hair above an integer.
  return static_cast<std::size_t>(std::ceil(cfg.horizon / cfg.dt - 1e-9));
}

OrderEstimate convergence_order_check(const ModelSpec& spec, const CompartmentState& init,
                                      Method method, double dt, double horizon) {
  auto final_state = [&](double h) {
    IntegrationConfig cfg;
    cfg.dt = h;
    cfg.horizon = horizon;
    cfg.method = method;
    cfg.record_every = step_count(cfg);
    return integrate(spec, init, cfg).back();
  };
  const CompartmentState a = final_state(dt);
  const CompartmentState b = final_state(dt / 2);
  const CompartmentState c = final_state(dt / 4);

  OrderEstimate est;
  est.coarse_error = (a - b).cwiseAbs().maxCoeff();
  est.fine_error = (b - c).cwiseAbs().maxCoeff();
  if (est.coarse_error == 0.0 || est.fine_error == 0.0) return est;
  est.order = std::log2(est.coarse_error / est.fine_error);
  return est;
}

}  // namespace uwsn
