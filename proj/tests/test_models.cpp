#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "uwsn/error.hpp"
#include "uwsn/models.hpp"

using namespace uwsn;

namespace {

ModelSpec sir_basic(double b = 0.4, double c = 0.15) {
  ModelSpec spec{Variant::SirBasic, {}};
  spec.params.b = b;
  spec.params.c = c;
  return spec;
}

ModelSpec sir_vital(double b = 0.33) {
  ModelSpec spec{Variant::SirVital, {}};
  spec.params.b = b;
  spec.params.l = 0.017;
  spec.params.m = 0.0018;
  spec.params.c = 0.035;
  return spec;
}

ModelSpec sit2() {
  ModelSpec spec{Variant::SirDeathSit2, {}};
  spec.params.b = 0.4;
  spec.params.c = 0.15;
  spec.params.m = 0.01;
  return spec;
}

// Plain RK4 on the basic SIR equations, written out longhand as an oracle.
struct SirSample {
  double s, i, r;
};

template <typename Visit>
SirSample reference_sir(double b, double c, SirSample x, double dt, double horizon, Visit&& visit) {
  auto f = [&](const SirSample& y) { return SirSample{-b * y.s * y.i, b * y.s * y.i - c * y.i, c * y.i}; };
  auto axpy = [](const SirSample& y, double h, const SirSample& k) {
    return SirSample{y.s + h * k.s, y.i + h * k.i, y.r + h * k.r};
  };
  const long n = std::lround(horizon / dt);
  visit(x);
  for (long k = 0; k < n; ++k) {
    const SirSample k1 = f(x), k2 = f(axpy(x, dt / 2, k1)), k3 = f(axpy(x, dt / 2, k2)), k4 = f(axpy(x, dt, k3));
    x.s += dt / 6 * (k1.s + 2 * k2.s + 2 * k3.s + k4.s);
    x.i += dt / 6 * (k1.i + 2 * k2.i + 2 * k3.i + k4.i);
    x.r += dt / 6 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r);
    visit(x);
  }
  return x;
}

std::vector<ModelSpec> every_variant() {
  std::vector<ModelSpec> out;
  for (Variant v : {Variant::SirBasic, Variant::Sis, Variant::SirDeathSit2, Variant::SirDeathSit13,
                    Variant::SirSleep, Variant::SirVital, Variant::SirGlobal}) {
    ModelSpec spec{v, {}};
    spec.params.b = 0.4;
    spec.params.c = 0.15;
    spec.params.m = 0.01;
    spec.params.m_prime = 0.02;
    spec.params.l = 0.05;
    spec.params.l_sleep = 0.2;
    spec.params.l_wake = 0.3;
    spec.params.k_sleep = 0.12;
    spec.params.k_wake = 0.07;
    spec.params.a = 0.6;
    out.push_back(spec);
  }
  return out;
}

}  // namespace

TEST_CASE("variant names round trip") {
  for (const ModelSpec& spec : every_variant()) CHECK(parse_variant(to_string(spec.variant)) == spec.variant);
  CHECK_THROWS_AS(parse_variant("sir"), ModelError);
}

TEST_CASE("resolve rejects missing and negative rates") {
  ModelSpec spec{Variant::SirBasic, {}};
  spec.params.b = 0.4;
  CHECK_THROWS_WITH_AS(resolve(spec), doctest::Contains("'c'"), ModelError);
  spec.params.c = -0.1;
  CHECK_THROWS_AS(resolve(spec), ModelError);
  spec.params.c = std::nan("");
  CHECK_THROWS_AS(resolve(spec), ModelError);
}

TEST_CASE("m_prime defaults to m") {
  ModelSpec spec{Variant::SirDeathSit13, {}};
  spec.params.b = 0.4;
  spec.params.c = 0.15;
  spec.params.m = 0.01;
  CHECK(resolve(spec).m_prime == 0.01);
}

TEST_CASE("vector field examples") {
  SUBCASE("basic SIR on the i = 0 line is at rest") {
    const auto d = vector_field(sir_basic(), make_state(0.9, 0.0, 0.1));
    CHECK(d.isZero(0.0));
  }
  SUBCASE("basic SIR at (0.9, 0.1, 0)") {
    const double b = 0.4, c = 0.15, s = 0.9, i = 0.1;
    const auto d = vector_field(sir_basic(), make_state(s, i, 0.0));
    CHECK(d(kS) == doctest::Approx(-b * s * i).epsilon(1e-14));
    CHECK(d(kI) == doctest::Approx(b * s * i - c * i).epsilon(1e-14));
    CHECK(d(kR) == doctest::Approx(c * i).epsilon(1e-14));
    CHECK(d(kS) == doctest::Approx(-0.036));
    CHECK(d(kI) == doctest::Approx(0.021));
    CHECK(d(kR) == doctest::Approx(0.015));
  }
  SUBCASE("situation 2 at (0, 0, 1) is at rest") {
    CHECK(vector_field(sit2(), make_state(0.0, 0.0, 1.0)).isZero(0.0));
  }
  SUBCASE("SIS") {
    ModelSpec spec{Variant::Sis, {}};
    spec.params.a = 0.4;
    spec.params.b = 0.15;
    const auto d = vector_field(spec, make_state(0.9, 0.1));
    CHECK(d(kI) == doctest::Approx(0.4 * 0.9 * 0.1 - 0.15 * 0.1).epsilon(1e-14));
    CHECK(d(kI) == doctest::Approx(0.021));
    CHECK(d(kS) == doctest::Approx(-0.021));
  }
  SUBCASE("NaN state is rejected") {
    CHECK_THROWS_AS(vector_field(sir_basic(), make_state(std::nan(""), 0.1, 0.0)), ModelError);
  }
}

TEST_CASE("reproduction number") {
  CHECK(*reproduction_number(sir_basic()) == doctest::Approx(0.4 / 0.15));
  CHECK(*reproduction_number(sir_basic()) == doctest::Approx(2.6667).epsilon(1e-4));
  const double vital = *reproduction_number(sir_vital());
  CHECK(vital == doctest::Approx(0.33 * 0.017 / (0.0018 * (0.035 + 0.0018))));
  CHECK(std::abs(vital - 84.69) <= 0.01);
  CHECK(*reproduction_number(sir_vital(0.0)) == 0.0);
  CHECK_FALSE(reproduction_number(sit2()).has_value());

  ModelSpec zero_c = sir_basic(0.4, 0.0);
  CHECK_THROWS_AS(reproduction_number(zero_c), ModelError);
  ModelSpec zero_m = sir_vital();
  zero_m.params.m = 0.0;
  CHECK_THROWS_AS(reproduction_number(zero_m), ModelError);
}

TEST_CASE("spread threshold") {
  CHECK(spread_threshold(sir_basic(0.4, 0.15), 0.9));
  CHECK_FALSE(spread_threshold(sir_basic(0.3, 0.3), 1.0));
  CHECK_FALSE(spread_threshold(sir_basic(0.1, 0.5), 0.9));
  CHECK_THROWS_AS(spread_threshold(sit2(), 0.9), ModelError);
}

TEST_CASE("final size matches the long-time limit of an independent integration") {
  const double s_inf = final_size(sir_basic(), 0.9, 0.0);
  const double ratio = 0.15 / 0.4;
  CHECK(std::abs(1.0 - s_inf + ratio * std::log(s_inf / 0.9)) <= 1e-10);
  CHECK(s_inf > 0.0);
  CHECK(s_inf < ratio);
  // s + i + r = 1 forces i(0) = 0.1 for this start.
  const SirSample end = reference_sir(0.4, 0.15, {0.9, 0.1, 0.0}, 0.01, 400.0, [](const SirSample&) {});
  CHECK(std::abs(end.s - s_inf) <= 1e-3);
}

TEST_CASE("final size limits") {
  CHECK(final_size(sir_basic(), 1e-9, 0.0) < 1e-8);
  // weak spreading from a nearly full population: almost nobody is reached
  const double s_inf = final_size(sir_basic(0.1, 0.15), 0.999, 0.0);
  const SirSample end = reference_sir(0.1, 0.15, {0.999, 0.001, 0.0}, 0.05, 2000.0, [](const SirSample&) {});
  CHECK(s_inf > 0.99);
  CHECK(std::abs(end.s - s_inf) <= 1e-3);
}

TEST_CASE("peak informed matches the trajectory maximum") {
  const PeakResult peak = peak_infected(sir_basic(), 0.9, 0.0);
  CHECK(peak.regime == PeakRegime::Outbreak);
  const double ratio = 0.15 / 0.4;
  CHECK(peak.value == doctest::Approx(1.0 - ratio * (1.0 + std::log(0.9 / ratio))).epsilon(1e-12));
  CHECK(peak.value == doctest::Approx(0.2967).epsilon(1e-4));
  double max_i = 0.0;
  reference_sir(0.4, 0.15, {0.9, 0.1, 0.0}, 0.001, 100.0, [&](const SirSample& x) { max_i = std::max(max_i, x.i); });
  CHECK(std::abs(max_i - peak.value) <= 1e-3);
}

TEST_CASE("peak informed in the monotone regime is the initial value") {
  const PeakResult peak = peak_infected(sir_basic(0.1, 0.5), 0.9, 0.0);
  CHECK(peak.regime == PeakRegime::MonotoneDecrease);
  CHECK(peak.value == doctest::Approx(0.1));
}

TEST_CASE("peak informed at the threshold boundary is continuous") {
  // s0 b = c: ln(1) = 0, so both regimes give 1 - r0 - c/b
  const PeakResult peak = peak_infected(sir_basic(0.5, 0.4), 0.8, 0.0);
  CHECK(peak.value == doctest::Approx(1.0 - 0.8).epsilon(1e-12));
}

TEST_CASE("analytic jacobian agrees with finite differences") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const ModelSpec& spec : every_variant()) {
    for (int trial = 0; trial < 10; ++trial) {
      CompartmentState x = CompartmentState::Zero();
      const Eigen::Index n = dimension(spec.variant);
      double budget = 1.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        x(k) = u(rng) * budget * 0.9;
        budget -= x(k);
      }
      const auto J = jacobian(spec, x);
      const auto F = finite_difference_jacobian(spec, x, 1e-6);
      REQUIRE(J.rows() == n);
      CHECK((J - F).cwiseAbs().maxCoeff() <= 1e-5);
    }
  }
}

TEST_CASE("situation 2 jacobian at the attractive point") {
  const auto J = jacobian(sit2(), make_state(0.0, 0.0, 1.0));
  Eigen::Matrix3d expected;
  expected << -0.01, 0, 0, 0, -0.15, 0, 0.01, 0.15, 0;
  CHECK((J - expected).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("basic SIR stability on the i = 0 line flips at s = c/b") {
  const ModelSpec spec = sir_basic();
  const double pivot = 0.15 / 0.4;
  CHECK(jacobian(spec, make_state(pivot + 0.1, 0.0, 0.0))(1, 1) > 0.0);
  CHECK(jacobian(spec, make_state(pivot - 0.1, 0.0, 0.0))(1, 1) < 0.0);
  CHECK(jacobian(spec, make_state(0.5, 0.0, 0.5)).row(1).isApprox(Eigen::RowVector3d(0.0, 0.4 * 0.5 - 0.15, 0.0)));
}

TEST_CASE("classification") {
  using C = std::complex<double>;
  CHECK(classify({C(-1, 0), C(-0.5, 2)}, std::nullopt) == Stability::Attractive);
  CHECK(classify({C(0.1, 0), C(-1, 0)}, std::nullopt) == Stability::NonAttractive);
  CHECK(classify({C(0, 0), C(-1, 0)}, std::nullopt) == Stability::Marginal);
  CHECK(classify({C(0, 0), C(-1, 0)}, 0) == Stability::Attractive);
  CHECK(classify({C(5e-10, 0), C(-1, 0)}, std::nullopt) == Stability::Marginal);
}

TEST_CASE("equilibria: situation 2") {
  const auto eq = equilibria(sit2());
  REQUIRE(eq.size() == 1);
  CHECK(eq[0].point.isApprox(make_state(0, 0, 1)));
  REQUIRE(eq[0].eigenvalues.size() == 3);
  std::vector<double> re;
  for (auto e : eq[0].eigenvalues) {
    CHECK(std::abs(e.imag()) <= 1e-9);
    re.push_back(e.real());
  }
  std::sort(re.begin(), re.end());
  CHECK(std::abs(re[0] + 0.15) <= 1e-9);
  CHECK(std::abs(re[1] + 0.01) <= 1e-9);
  CHECK(std::abs(re[2]) <= 1e-9);
  REQUIRE(eq[0].conserved_direction.has_value());
  CHECK(std::abs(eq[0].eigenvalues[*eq[0].conserved_direction]) <= 1e-9);
  CHECK(eq[0].classification == Stability::Attractive);
}

TEST_CASE("equilibria: situations 1 and 3") {
  ModelSpec spec = sit2();
  spec.variant = Variant::SirDeathSit13;
  spec.params.m_prime = 0.02;
  const auto eq = equilibria(spec);
  REQUIRE(eq.size() == 1);
  CHECK(eq[0].point.isZero());
  auto has = [&](double value) {
    return std::any_of(eq[0].eigenvalues.begin(), eq[0].eigenvalues.end(),
                       [&](auto e) { return std::abs(e - std::complex<double>(value, 0)) <= 1e-9; });
  };
  CHECK(has(-0.01));
  CHECK(has(-0.15 - 0.02));
  CHECK(eq[0].classification == Stability::Attractive);
}

TEST_CASE("equilibria: sleep model loses the datum") {
  const ModelSpec spec = every_variant()[4];
  REQUIRE(spec.variant == Variant::SirSleep);
  const auto eq = equilibria(spec);
  REQUIRE(eq.size() == 1);
  CHECK(eq[0].point.isZero());
  CHECK(eq[0].classification == Stability::Attractive);
}

TEST_CASE("equilibria: vital dynamics endemic point") {
  const auto eq = equilibria(sir_vital());
  REQUIRE(eq.size() == 2);
  CHECK(eq[0].kind == EquilibriumKind::InformationFree);
  CHECK(eq[0].point(kS) == doctest::Approx(0.017 / 0.0018));
  CHECK(eq[0].classification == Stability::NonAttractive);

  const auto& endemic = eq[1];
  CHECK(endemic.kind == EquilibriumKind::Endemic);
  CHECK(endemic.point(kS) == doctest::Approx((0.035 + 0.0018) / 0.33).epsilon(1e-12));
  CHECK(endemic.point(kI) == doctest::Approx(0.017 / 0.0368 - 0.0018 / 0.33).epsilon(1e-12));
  CHECK(endemic.point(kS) == doctest::Approx(0.11152).epsilon(1e-4));
  CHECK(endemic.point(kI) == doctest::Approx(0.45650).epsilon(1e-4));
  CHECK(vector_field(sir_vital(), endemic.point).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(endemic.classification == Stability::Attractive);
}

TEST_CASE("equilibria: vital dynamics below threshold") {
  const ModelSpec spec = sir_vital(0.001);
  REQUIRE(*reproduction_number(spec) < 1.0);
  const auto eq = equilibria(spec);
  REQUIRE(eq.size() == 1);
  CHECK(eq[0].kind == EquilibriumKind::InformationFree);
  CHECK(eq[0].classification == Stability::Attractive);
}

TEST_CASE("equilibria: global model points are fixed points") {
  const ModelSpec spec = every_variant()[6];
  REQUIRE(spec.variant == Variant::SirGlobal);
  for (const auto& eq : equilibria(spec)) CHECK(vector_field(spec, eq.point).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("equilibria: m = 0 is an explicit error for vital dynamics") {
  ModelSpec spec = sir_vital();
  spec.params.m = 0.0;
  CHECK_THROWS_AS(equilibria(spec), ModelError);
}

TEST_CASE("equilibria of every variant are fixed points") {
  for (const ModelSpec& spec : every_variant()) {
    for (const auto& eq : equilibria(spec)) {
      CAPTURE(to_string(spec.variant));
      CHECK(vector_field(spec, eq.point).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("SIS endemic level") {
  ModelSpec spec{Variant::Sis, {}};
  spec.params.a = 0.4;
  spec.params.b = 0.15;
  const auto eq = equilibria(spec);
  REQUIRE(eq.size() == 2);
  CHECK(eq[1].point(kS) == doctest::Approx(0.15 / 0.4));
  CHECK(eq[1].classification == Stability::Attractive);
  CHECK(eq[0].classification == Stability::NonAttractive);
}

TEST_CASE("check_state") {
  CHECK_NOTHROW(check_state(Variant::SirBasic, make_state(0.9, 0.1, 0.0)));
  CHECK_THROWS_AS(check_state(Variant::SirBasic, make_state(-0.1, 0.1, 0.0)), ModelError);
  CHECK_THROWS_AS(check_state(Variant::SirBasic, make_state(0.9, 0.2, 0.0)), ModelError);
}
