#include "uwsn/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <utility>

namespace uwsn {

namespace {

struct VariantName {
  Variant variant;
  std::string_view name;
};

constexpr std::array<VariantName, 7> kVariantNames{{
    {Variant::SirBasic, "sir-basic"},
    {Variant::Sis, "sis"},
    {Variant::SirDeathSit2, "sir-death-sit2"},
    {Variant::SirDeathSit13, "sir-death-sit13"},
    {Variant::SirSleep, "sir-sleep"},
    {Variant::SirVital, "sir-vital"},
    {Variant::SirGlobal, "sir-global"},
}};

constexpr double kDefaultGlobalExchange = 0.1;
constexpr double kFinalSizeLowerBound = 1e-12;

double require(const std::optional<double>& value, std::string_view key) {
  if (!value) throw ModelError("missing required rate '" + std::string(key) + "'");
  return *value;
}

void require_positive(double value, std::string_view what) {
  if (!(value > 0.0)) throw ModelError(std::string(what) + " must be > 0 (division by zero)");
}

void require_variant(const ModelSpec& spec, Variant expected, std::string_view op) {
  if (spec.variant != expected) {
    throw ModelError(std::string(op) + " is only defined for " + std::string(to_string(expected)) +
                     ", got " + std::string(to_string(spec.variant)));
  }
}

}  // namespace

std::string_view to_string(Variant v) {
  for (const auto& entry : kVariantNames)
    if (entry.variant == v) return entry.name;
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (const auto& entry : kVariantNames)
    if (entry.name == name) return entry.variant;
  throw ModelError("unknown model variant '" + std::string(name) + "'");
}

std::vector<std::string_view> required_rates(Variant v) {
  switch (v) {
    case Variant::SirBasic:
      return {"b", "c"};
    case Variant::Sis:
      return {"a", "b"};
    case Variant::SirDeathSit2:
    case Variant::SirDeathSit13:
      return {"b", "c", "m"};
    case Variant::SirSleep:
      return {"b", "c", "m", "l_sleep", "l_wake"};
    case Variant::SirVital:
    case Variant::SirGlobal:
      return {"b", "c", "m", "l"};
  }
  return {};
}

Rates<double> resolve(const ModelSpec& spec) {
  const RateParams& p = spec.params;
  const std::array<std::pair<std::string_view, const std::optional<double>*>, 10> fields{{
      {"b", &p.b},
      {"c", &p.c},
      {"m", &p.m},
      {"m_prime", &p.m_prime},
      {"l", &p.l},
      {"l_sleep", &p.l_sleep},
      {"l_wake", &p.l_wake},
      {"k_sleep", &p.k_sleep},
      {"k_wake", &p.k_wake},
      {"a", &p.a},
  }};
  for (const auto& [key, value] : fields) {
    if (!*value) continue;
    if (!std::isfinite(**value)) throw ModelError("rate '" + std::string(key) + "' is not finite");
    if (**value < 0.0) throw ModelError("rate '" + std::string(key) + "' must be >= 0");
  }
  for (std::string_view key : required_rates(spec.variant)) {
    for (const auto& [name, value] : fields)
      if (name == key) require(*value, key);
  }

  Rates<double> r;
  r.b = p.b.value_or(0.0);
  r.c = p.c.value_or(0.0);
  r.m = p.m.value_or(0.0);
  r.m_prime = p.m_prime.value_or(r.m);
  r.l = p.l.value_or(0.0);
  r.l_sleep = p.l_sleep.value_or(0.0);
  r.l_wake = p.l_wake.value_or(0.0);
  r.k_sleep = p.k_sleep.value_or(kDefaultGlobalExchange);
  r.k_wake = p.k_wake.value_or(kDefaultGlobalExchange);
  r.a = p.a.value_or(0.0);
  return r;
}

void check_state(Variant v, const CompartmentState& x, double tolerance) {
  for (Eigen::Index k = 0; k < dimension(v); ++k) {
    if (!std::isfinite(x(k))) throw ModelError("state component " + std::to_string(k) + " is not finite");
    if (x(k) < -tolerance) throw ModelError("state component " + std::to_string(k) + " is negative");
  }
  if ((v == Variant::SirBasic || v == Variant::Sis) && x.head(dimension(v)).sum() > 1.0 + tolerance)
    throw ModelError("fractions sum to more than 1");
}

std::optional<double> reproduction_number(const ModelSpec& spec) {
  const Rates<double> r = resolve(spec);
  switch (spec.variant) {
    case Variant::SirBasic:
      require_positive(r.c, "c");
      return r.b / r.c;
    case Variant::SirVital:
    case Variant::SirGlobal:
      require_positive(r.m, "m");
      require_positive(r.c + r.m, "c + m");
      return r.b * r.l / (r.m * (r.c + r.m));
    default:
      return std::nullopt;
  }
}

bool spread_threshold(const ModelSpec& spec, double s0) {
  require_variant(spec, Variant::SirBasic, "spread_threshold");
  if (!(s0 >= 0.0 && s0 <= 1.0)) throw ModelError("s0 must lie in [0, 1]");
  const Rates<double> r = resolve(spec);
  // T_t < s0 * T_e with T_t = 1/b, T_e = 1/c, written without divisions.
  return r.b * s0 > r.c;
}

double final_size(const ModelSpec& spec, double s0, double r0_init) {
  require_variant(spec, Variant::SirBasic, "final_size");
  if (!(s0 > 0.0 && s0 <= 1.0)) throw ModelError("s0 must lie in (0, 1]");
  if (!(r0_init >= 0.0 && r0_init < 1.0)) throw ModelError("r0 must lie in [0, 1)");
  const Rates<double> r = resolve(spec);
  require_positive(r.b, "b");
  require_positive(r.c, "c");

  const double inverse_r0 = r.c / r.b;
  auto residual = [&](double s) { return 1.0 - r0_init - s + inverse_r0 * std::log(s / s0); };

  double lo = kFinalSizeLowerBound;
  double hi = std::min(s0, inverse_r0);
  double f_hi = residual(hi);
  if (f_hi == 0.0) return hi;
  double f_lo = residual(lo);
  if (!(f_lo < 0.0 && f_hi > 0.0)) throw ModelError("final_size: no sign change in the bracket");

  for (int iter = 0; iter < 400 && hi - lo > 0.0; ++iter) {
    const double mid = std::midpoint(lo, hi);
    if (mid == lo || mid == hi) break;
    const double f_mid = residual(mid);
    if (f_mid == 0.0) return mid;
    if (f_mid < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(residual(lo)) <= std::abs(residual(hi)) ? lo : hi;
}

PeakResult peak_infected(const ModelSpec& spec, double s0, double r0_init) {
  require_variant(spec, Variant::SirBasic, "peak_infected");
  if (!(s0 > 0.0 && s0 <= 1.0)) throw ModelError("s0 must lie in (0, 1]");
  if (!(r0_init >= 0.0 && r0_init <= 1.0 - s0)) throw ModelError("r0 must lie in [0, 1 - s0]");
  const Rates<double> r = resolve(spec);
  require_positive(r.b, "b");
  require_positive(r.c, "c");

  if (r.b * s0 > r.c) {
    const double inverse_r0 = r.c / r.b;
    return {1.0 - r0_init - inverse_r0 * (1.0 + std::log(s0 / inverse_r0)), PeakRegime::Outbreak};
  }
  return {1.0 - s0 - r0_init, PeakRegime::MonotoneDecrease};
}

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Attractive:
      return "attractive";
    case Stability::NonAttractive:
      return "non-attractive";
    case Stability::Marginal:
      return "marginal";
  }
  return "unknown";
}

std::string_view to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::InformationFree:
      return "information-free";
    case EquilibriumKind::Endemic:
      return "endemic";
    case EquilibriumKind::Extinction:
      return "extinction";
  }
  return "unknown";
}

Stability classify(const std::vector<std::complex<double>>& eigenvalues,
                   std::optional<std::size_t> conserved, double eps) {
  bool marginal = false;
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    if (conserved && *conserved == k) continue;
    const double re = eigenvalues[k].real();
    if (re > eps) return Stability::NonAttractive;
    if (re >= -eps) marginal = true;
  }
  return marginal ? Stability::Marginal : Stability::Attractive;
}

EquilibriumReport analyse_point(const ModelSpec& spec, const CompartmentState& point,
                                EquilibriumKind kind) {
  EquilibriumReport report;
  report.kind = kind;
  report.point = point;

  const Jacobian<double> J = jacobian(spec, point);
  Eigen::EigenSolver<Jacobian<double>> solver(J, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigenvalue computation did not converge", 0.0);
  }
  const auto& values = solver.eigenvalues();
  report.eigenvalues.assign(values.data(), values.data() + values.size());
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
            [](const std::complex<double>& x, const std::complex<double>& y) {
              if (x.real() != y.real()) return x.real() > y.real();
              return x.imag() > y.imag();
            });

  if (conserves_population(spec.variant)) {
    const auto closest = std::min_element(
        report.eigenvalues.begin(), report.eigenvalues.end(),
        [](const auto& x, const auto& y) { return std::abs(x) < std::abs(y); });
    report.conserved_direction = static_cast<std::size_t>(closest - report.eigenvalues.begin());
  }
  report.classification = classify(report.eigenvalues, report.conserved_direction);
  return report;
}

std::vector<EquilibriumReport> equilibria(const ModelSpec& spec) {
  const Rates<double> r = resolve(spec);
  std::vector<EquilibriumReport> out;

  switch (spec.variant) {
    case Variant::SirBasic:
      out.push_back(analyse_point(spec, make_state(1.0, 0.0, 0.0), EquilibriumKind::InformationFree));
      break;
    case Variant::Sis:
      out.push_back(analyse_point(spec, make_state(1.0, 0.0), EquilibriumKind::InformationFree));
      if (r.a > r.b) {
        const double s_star = r.b / r.a;
        out.push_back(analyse_point(spec, make_state(s_star, 1.0 - s_star), EquilibriumKind::Endemic));
      }
      break;
    case Variant::SirDeathSit2:
      out.push_back(analyse_point(spec, make_state(0.0, 0.0, 1.0), EquilibriumKind::Extinction));
      break;
    case Variant::SirDeathSit13:
    case Variant::SirSleep:
      out.push_back(analyse_point(spec, CompartmentState::Zero(), EquilibriumKind::Extinction));
      break;
    case Variant::SirVital:
    case Variant::SirGlobal: {
      require_positive(r.m, "m");
      const bool global = spec.variant == Variant::SirGlobal;
      double sleep_ratio = 0.0;
      if (global) {
        require_positive(r.k_wake, "k_wake");
        sleep_ratio = r.k_sleep / r.k_wake;
      }
      auto with_sleepers = [&](double s, double i, double rr) {
        return make_state(s, i, rr, sleep_ratio * s, sleep_ratio * i, sleep_ratio * rr);
      };
      out.push_back(analyse_point(spec, with_sleepers(r.l / r.m, 0.0, 0.0),
                                  EquilibriumKind::InformationFree));
      const double r0 = *reproduction_number(spec);
      if (r0 > 1.0) {
        const double s_star = (r.c + r.m) / r.b;
        const double i_star = (r.b * r.l - r.m * (r.c + r.m)) / (r.b * (r.c + r.m));
        const double r_star = r.c / r.m * i_star;
        out.push_back(analyse_point(spec, with_sleepers(s_star, i_star, r_star),
                                    EquilibriumKind::Endemic));
      }
      break;
    }
  }
  return out;
}

}  // namespace uwsn
