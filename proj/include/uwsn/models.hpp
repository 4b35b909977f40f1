#pragma once

// Compartment models for data survivability in unattended sensor networks.
//
// All variants share one 6-component state layout (s, i, r, s_sleep, i_sleep, r_sleep).
// A variant only uses a prefix of it: SIS uses (s, i), the three-compartment variants
// use (s, i, r), and the sleeping-node variants use all six.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uwsn/error.hpp"

namespace uwsn {

enum class Variant {
  SirBasic,       ///< s' = -bis, i' = bis - ci, r' = ci
  Sis,            ///< S' = bI - aSI, I' = aSI - bI (a: infection, b: cure)
  SirDeathSit2,   ///< R holds dead sensors
  SirDeathSit13,  ///< R holds living sensors that stopped relaying, death rate on every class
  SirSleep,       ///< every class split into awake and sleeping halves
  SirVital,       ///< constant awakening rate l, natural death m
  SirGlobal,      ///< vital dynamics plus sleeping halves
};

std::string_view to_string(Variant v);
/// Accepts the CLI spellings ("sir-basic", "sis", "sir-death-sit2", ...).
Variant parse_variant(std::string_view name);

/// Rates; a missing rate is std::nullopt. Which ones are required depends on the variant.
struct RateParams {
  std::optional<double> b;        ///< transmission (SIS: cure) rate, 1/time
  std::optional<double> c;        ///< attack / recovery rate, 1/time
  std::optional<double> m;        ///< natural death rate, 1/time
  std::optional<double> m_prime;  ///< informed-node death rate, 1/time (defaults to m)
  std::optional<double> l;        ///< awakening rate, fraction of N per time
  std::optional<double> l_sleep;  ///< awake -> sleeping rate, 1/time
  std::optional<double> l_wake;   ///< sleeping -> awake rate, 1/time
  std::optional<double> k_sleep;  ///< global model awake -> sleeping rate (defaults to 0.1)
  std::optional<double> k_wake;   ///< global model sleeping -> awake rate (defaults to 0.1)
  std::optional<double> a;        ///< SIS infection rate, 1/time
};

struct ModelSpec {
  Variant variant = Variant::SirBasic;
  RateParams params;
};

/// Names of the rates a variant needs (before defaults are applied).
std::vector<std::string_view> required_rates(Variant v);

/// Dense rate block with defaults applied; all entries finite and >= 0.
template <typename Scalar>
struct Rates {
  Scalar b{0}, c{0}, m{0}, m_prime{0}, l{0}, l_sleep{0}, l_wake{0}, k_sleep{0}, k_wake{0}, a{0};

  template <typename Other>
  Rates<Other> cast() const {
    return {Other(b),       Other(c),       Other(m),       Other(m_prime), Other(l),
            Other(l_sleep), Other(l_wake),  Other(k_sleep), Other(k_wake),  Other(a)};
  }
};

/// Validates `spec` and fills defaults (m' = m, k = k' = 0.1). Throws ModelError naming the key.
Rates<double> resolve(const ModelSpec& spec);

enum Component : Eigen::Index { kS = 0, kI = 1, kR = 2, kSSleep = 3, kISleep = 4, kRSleep = 5 };

inline constexpr Eigen::Index kStateSize = 6;

template <typename Scalar>
using State = Eigen::Matrix<Scalar, kStateSize, 1>;

template <typename Scalar>
using Jacobian = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using CompartmentState = State<double>;

inline CompartmentState make_state(double s, double i, double r = 0.0, double s_sleep = 0.0,
                                   double i_sleep = 0.0, double r_sleep = 0.0) {
  CompartmentState x;
  x << s, i, r, s_sleep, i_sleep, r_sleep;
  return x;
}

/// Number of leading state components the variant evolves.
constexpr Eigen::Index dimension(Variant v) {
  switch (v) {
    case Variant::Sis:
      return 2;
    case Variant::SirSleep:
    case Variant::SirGlobal:
      return 6;
    default:
      return 3;
  }
}

/// True when the variant conserves the total population (sum of its components).
constexpr bool conserves_population(Variant v) {
  return v == Variant::SirBasic || v == Variant::Sis || v == Variant::SirDeathSit2;
}

/// Throws ModelError if any active component is NaN/inf or negative beyond `tolerance`.
void check_state(Variant v, const CompartmentState& x, double tolerance = 1e-9);

/// Right-hand side of a variant, bound to resolved rates. Inactive components get zero derivative.
template <typename Scalar>
class VectorField {
 public:
  VectorField(Variant variant, const Rates<Scalar>& rates) : variant_(variant), k_(rates) {}

  explicit VectorField(const ModelSpec& spec)
      : variant_(spec.variant), k_(resolve(spec).template cast<Scalar>()) {}

  Variant variant() const { return variant_; }
  const Rates<Scalar>& rates() const { return k_; }

  State<Scalar> operator()(const State<Scalar>& x) const {
    State<Scalar> d = State<Scalar>::Zero();
    const Scalar s = x(kS), i = x(kI), r = x(kR);
    switch (variant_) {
      case Variant::SirBasic:
        d(kS) = -k_.b * i * s;
        d(kI) = k_.b * i * s - k_.c * i;
        d(kR) = k_.c * i;
        break;
      case Variant::Sis:
        d(kS) = k_.b * i - k_.a * s * i;
        d(kI) = k_.a * s * i - k_.b * i;
        break;
      case Variant::SirDeathSit2:
        d(kS) = -k_.b * i * s - k_.m * s;
        d(kI) = k_.b * i * s - k_.c * i;
        d(kR) = k_.c * i + k_.m * s;
        break;
      case Variant::SirDeathSit13:
        d(kS) = -k_.b * i * s - k_.m * s;
        d(kI) = k_.b * i * s - k_.c * i - k_.m_prime * i;
        d(kR) = k_.c * i - k_.m * r;
        break;
      case Variant::SirVital:
        d(kS) = k_.l - k_.b * i * s - k_.m * s;
        d(kI) = k_.b * i * s - (k_.c + k_.m) * i;
        d(kR) = k_.c * i - k_.m * r;
        break;
      case Variant::SirSleep:
      case Variant::SirGlobal: {
        const bool global = variant_ == Variant::SirGlobal;
        const Scalar wake = global ? k_.k_wake : k_.l_wake;
        const Scalar sleep = global ? k_.k_sleep : k_.l_sleep;
        const Scalar birth = global ? k_.l : Scalar(0);
        const Scalar ss = x(kSSleep), is = x(kISleep), rs = x(kRSleep);
        d(kS) = birth + wake * ss - sleep * s - k_.b * i * s - k_.m * s;
        d(kI) = wake * is - sleep * i + k_.b * i * s - k_.c * i - k_.m * i;
        d(kR) = wake * rs - sleep * r + k_.c * i - k_.m * r;
        d(kSSleep) = -wake * ss + sleep * s;
        d(kISleep) = -wake * is + sleep * i;
        d(kRSleep) = -wake * rs + sleep * r;
        break;
      }
    }
    return d;
  }

  /// Analytic Jacobian restricted to the variant's active components.
  Jacobian<Scalar> jacobian(const State<Scalar>& x) const {
    const Eigen::Index n = dimension(variant_);
    Jacobian<Scalar> J = Jacobian<Scalar>::Zero(n, n);
    const Scalar s = x(kS), i = x(kI);
    const Scalar b = k_.b, c = k_.c, m = k_.m;
    switch (variant_) {
      case Variant::SirBasic:
        J << -b * i, -b * s, 0,
              b * i,  b * s - c, 0,
              0,      c, 0;
        break;
      case Variant::Sis:
        J << -k_.a * i, b - k_.a * s,
              k_.a * i, k_.a * s - b;
        break;
      case Variant::SirDeathSit2:
        J << -b * i - m, -b * s, 0,
              b * i,      b * s - c, 0,
              m,          c, 0;
        break;
      case Variant::SirDeathSit13:
        J << -b * i - m, -b * s, 0,
              b * i,      b * s - c - k_.m_prime, 0,
              0,          c, -m;
        break;
      case Variant::SirVital:
        J << -b * i - m, -b * s, 0,
              b * i,      b * s - c - m, 0,
              0,          c, -m;
        break;
      case Variant::SirSleep:
      case Variant::SirGlobal: {
        const bool global = variant_ == Variant::SirGlobal;
        const Scalar w = global ? k_.k_wake : k_.l_wake;
        const Scalar q = global ? k_.k_sleep : k_.l_sleep;
        J << -q - b * i - m, -b * s,             0,      w,  0,  0,
              b * i,         -q + b * s - c - m, 0,      0,  w,  0,
              0,              c,                 -q - m, 0,  0,  w,
              q,              0,                 0,      -w, 0,  0,
              0,              q,                 0,      0,  -w, 0,
              0,              0,                 q,      0,  0,  -w;
        break;
      }
    }
    return J;
  }

 private:
  Variant variant_;
  Rates<Scalar> k_;
};

/// d/dt of `state` under `spec`. Throws ModelError on invalid rates or a NaN active component.
template <typename Scalar = double>
State<Scalar> vector_field(const ModelSpec& spec, const State<Scalar>& state) {
  for (Eigen::Index k = 0; k < dimension(spec.variant); ++k) {
    using std::isfinite;
    if (!isfinite(state(k))) throw ModelError("state component " + std::to_string(k) + " is not finite");
  }
  return VectorField<Scalar>(spec)(state);
}

template <typename Scalar = double>
Jacobian<Scalar> jacobian(const ModelSpec& spec, const State<Scalar>& state) {
  return VectorField<Scalar>(spec).jacobian(state);
}

/// Central finite-difference Jacobian; used to cross-check the analytic one.
template <typename Scalar = double>
Jacobian<Scalar> finite_difference_jacobian(const ModelSpec& spec, const State<Scalar>& x,
                                            Scalar step = Scalar(1e-6)) {
  const VectorField<Scalar> f(spec);
  const Eigen::Index n = dimension(spec.variant);
  Jacobian<Scalar> J(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    State<Scalar> hi = x, lo = x;
    hi(col) += step;
    lo(col) -= step;
    J.col(col) = ((f(hi) - f(lo)) / (Scalar(2) * step)).head(n);
  }
  return J;
}

// ---------------------------------------------------------------------------------------------
// Analysis

/// b/c for SirBasic, b*l/(m*(c+m)) for SirVital / SirGlobal, nullopt for the other variants.
/// Throws ModelError when a denominator rate is zero.
std::optional<double> reproduction_number(const ModelSpec& spec);

/// SirBasic only: true iff 1/b < s0 / c (strict), i.e. b * s0 > c.
bool spread_threshold(const ModelSpec& spec, double s0);

/// SirBasic only: limiting susceptible fraction s_inf, root of
/// 1 - r0 - s + (c/b) ln(s / s0) = 0 on (1e-12, min(s0, c/b)].
double final_size(const ModelSpec& spec, double s0, double r0_init);

enum class PeakRegime { Outbreak, MonotoneDecrease };

struct PeakResult {
  double value = 0.0;
  PeakRegime regime = PeakRegime::MonotoneDecrease;
};

/// SirBasic only: maximum of i(t) for a trajectory with s + i + r = 1 starting at (s0, ., r0).
/// In the outbreak regime 1 - r0 - (c/b)(1 + ln(s0 b / c)); otherwise i(0) = 1 - s0 - r0.
PeakResult peak_infected(const ModelSpec& spec, double s0, double r0_init);

enum class Stability { Attractive, NonAttractive, Marginal };
enum class EquilibriumKind { InformationFree, Endemic, Extinction };

std::string_view to_string(Stability s);
std::string_view to_string(EquilibriumKind k);

inline constexpr double kEigenTolerance = 1e-9;

struct EquilibriumReport {
  EquilibriumKind kind = EquilibriumKind::InformationFree;
  CompartmentState point = CompartmentState::Zero();
  std::vector<std::complex<double>> eigenvalues;
  /// Index into `eigenvalues` of the zero mode along the conserved total, if the variant has one.
  std::optional<std::size_t> conserved_direction;
  Stability classification = Stability::Marginal;
};

/// Classifies eigenvalues, ignoring `conserved` (the zero mode of a conserved total).
Stability classify(const std::vector<std::complex<double>>& eigenvalues,
                   std::optional<std::size_t> conserved, double eps = kEigenTolerance);

/// Eigenvalues of the analytic Jacobian at `point`, plus classification.
EquilibriumReport analyse_point(const ModelSpec& spec, const CompartmentState& point,
                                EquilibriumKind kind);

/// Fixed points of the variant with their linear stability.
/// SirBasic has a line of fixed points (s, 0, 1 - s); the fully susceptible point is reported.
std::vector<EquilibriumReport> equilibria(const ModelSpec& spec);

}  // namespace uwsn
