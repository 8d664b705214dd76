#include "support.hpp"

#include "expamoeba/exact_linalg.hpp"

#include <doctest.h>

using namespace testing;

namespace {

// cos(iz) + sin(i g z) - 2, written without exponentials
Complex ex31_closed_form(Complex z) {
  const Complex i(0.0, 1.0);
  return std::cos(i * z) + std::sin(i * kSqrt2 * z) - 2.0;
}

}  // namespace

TEST_CASE("rational arithmetic is exact and reduced") {
  Rational a(1, 2), b(1, 3);
  CHECK(a + b == Rational(5, 6));
  CHECK(a * b == Rational(1, 6));
  CHECK(a / b == Rational(3, 2));
  CHECK(Rational(6, -4) == Rational(-3, 2));
  CHECK(Rational(-3, 2).den() == 2);
  CHECK(Rational::parse("3/4") == Rational(3, 4));
  CHECK(Rational::parse("-0.125") == Rational(-1, 8));
  CHECK(Rational::from_double(0.375) == Rational(3, 8));
  CHECK_THROWS_AS(Rational(1, 0), Error);
  CHECK_THROWS_AS(Rational(std::numeric_limits<long long>::max()) * Rational(2), OverflowError);
}

TEST_CASE("exact inverse round trip") {
  RationalMatrix a(3, 3);
  a << Rational(2), Rational(1, 3), Rational(0), Rational(-1), Rational(5, 7), Rational(1), Rational(0),
      Rational(1, 2), Rational(4);
  RationalMatrix prod = a * exact_inverse(a);
  CHECK(prod == RationalMatrix::Identity(3, 3));
  CHECK(exact_rank(a) == 3);
  RationalMatrix s(2, 2);
  s << Rational(1), Rational(2), Rational(2), Rational(4);
  CHECK(exact_determinant(s) == Rational(0));
  CHECK_THROWS_AS(exact_inverse(s), Error);
}

TEST_CASE("eval_sum basic values") {
  GeneratorMatrix id = rational_identity(1);
  ExpSum ez = make_sum({{1.0, {1}}});
  CHECK(eval_sum(ez, id, cvec({0.0})) == Complex(1.0, 0.0));

  ExpSystem ex31 = load("ex31.json");
  Complex v = eval_sum(ex31.sums()[0], ex31.generators(), cvec({0.0}));
  CHECK(std::abs(v - Complex(-1.0, 0.0)) < 1e-15);
  for (Complex z : {Complex(0.3, -1.2), Complex(-2.0, 0.5), Complex(1.1, 7.0)}) {
    Complex got = eval_sum(ex31.sums()[0], ex31.generators(), cvec({z}));
    CHECK(std::abs(got - ex31_closed_form(z)) < 1e-12 * (1.0 + std::abs(got)));
  }

  // (e^z - 1)(e^{gz} - e^g) vanishes at z = 1
  ExpSystem ex32 = load("ex32.json");
  Complex at1 = eval_sum(ex32.sums()[0], ex32.generators(), cvec({1.0}));
  CHECK(std::abs(at1) < 1e-12);
  long double g = std::sqrt(2.0L);
  for (double x : {-0.7, 0.2, 2.5}) {
    long double oracle = (std::exp((long double)x) - 1) * (std::exp(g * x) - std::exp(g));
    Complex got = eval_sum(ex32.sums()[0], ex32.generators(), cvec({x}));
    CHECK(std::abs(got.real() - (double)oracle) < 1e-12 * (1.0 + std::fabs((double)oracle)));
    CHECK(std::abs(got.imag()) < 1e-12);
  }
}

TEST_CASE("eval_sum guards the exponent range") {
  GeneratorMatrix id = rational_identity(1);
  ExpSum ez = make_sum({{1.0, {1}}, {-1.0, {0}}});
  CHECK_NOTHROW(eval_sum(ez, id, cvec({699.0})));
  CHECK_THROWS_AS(eval_sum(ez, id, cvec({701.0})), OverflowError);
  CHECK_THROWS_AS(eval_sum(ez, id, cvec({0.0, 0.0})), DimensionError);
  // the normalized modulus never forms exp of large exponents
  CHECK(normalized_modulus(ez, id, cvec({5000.0})) == doctest::Approx(1.0));
}

TEST_CASE("support_k") {
  GeneratorMatrix id = rational_identity(1);
  ExpSum mono = make_sum({{Complex(2.0, 1.0), {3}}});
  CHECK(support_k(mono, id, cvec({Complex(0.4, 2.0)})) == doctest::Approx(std::exp(1.2)));
  ExpSum sym = make_sum({{1.0, {1}}, {1.0, {-1}}});
  for (double x : {-2.5, -0.1, 0.0, 1.7}) CHECK(support_k(sym, id, cvec({x})) == doctest::Approx(std::exp(std::fabs(x))));

  ExpSystem ex31 = load("ex31.json");
  const double spectrum[] = {1.0, -1.0, kSqrt2, -kSqrt2, 0.0};
  double best = 0.0;
  for (double l : spectrum) best = std::max(best, std::exp(2.0 * l));
  CHECK(support_k(ex31.sums()[0], ex31.generators(), cvec({2.0})) == doctest::Approx(best).epsilon(1e-14));
  CHECK(best == doctest::Approx(std::exp(2.0 * kSqrt2)));
}

TEST_CASE("K_functional") {
  GeneratorMatrix id = rational_identity(2);
  ExpSystem mono(id, {make_sum({{Complex(0.6, -0.8) * 3.0, {2, -1}}})});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int s = 0; s < 100; ++s) {
    CVector z = cvec({Complex(u(rng), u(rng)), Complex(u(rng), u(rng))});
    CHECK(K_functional(mono, z) == doctest::Approx(3.0).epsilon(1e-12));
  }

  GeneratorMatrix one = rational_identity(1);
  ExpSystem em1(one, {make_sum({{1.0, {1}}, {-1.0, {0}}})});
  CHECK(K_functional(em1, cvec({0.0})) == 0.0);
  ExpSystem ep1(one, {make_sum({{1.0, {1}}, {1.0, {0}}})});
  CHECK(K_functional(ep1, cvec({Complex(0.0, kPi / 2)})) == doctest::Approx(std::abs(Complex(1.0, 1.0))));
}

TEST_CASE("perturb") {
  ExpSystem ex31 = load("ex31.json");
  ExpSystem same = perturb(ex31, Character(Eigen::VectorXd::Zero(2)));
  for (std::size_t t = 0; t < ex31.sums()[0].terms.size(); ++t)
    CHECK(same.sums()[0].terms[t].c == ex31.sums()[0].terms[t].c);

  // chi(1) = 1, chi(g) = -i turns the sine into a cosine
  ExpSystem chi = perturb(ex31, Character(vec({0.0, 3 * kPi / 2})));
  const Complex i(0.0, 1.0);
  for (Complex z : {Complex(0.0), Complex(0.5, 0.1), Complex(-1.3, 2.0)}) {
    Complex oracle = std::cos(i * z) + std::cos(i * kSqrt2 * z) - 2.0;
    CHECK(std::abs(eval_sum(chi.sums()[0], chi.generators(), cvec({z})) - oracle) < 1e-12);
  }

  Eigen::VectorXd a = vec({1.0, 5.5}), b = vec({6.0, 2.25});
  ExpSystem twice = perturb(perturb(ex31, Character(a)), Character(b));
  ExpSystem once = perturb(ex31, Character(a + b));
  for (std::size_t t = 0; t < ex31.sums()[0].terms.size(); ++t) {
    CHECK(std::abs(twice.sums()[0].terms[t].c - once.sums()[0].terms[t].c) < 1e-12);
    CHECK(std::abs(std::abs(once.sums()[0].terms[t].c) - std::abs(ex31.sums()[0].terms[t].c)) < 1e-14);
    CHECK(once.sums()[0].terms[t].k == ex31.sums()[0].terms[t].k);
  }
  CHECK(once.generators() == ex31.generators());
  CHECK_THROWS_AS(perturb(ex31, Character(vec({1.0}))), DimensionError);
}

TEST_CASE("character angles are reduced") {
  Character c(vec({-kPi / 2, 9.0, 2 * kPi}));
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(c.theta(j) >= 0.0);
    CHECK(c.theta(j) < 2 * kPi);
  }
  CHECK(c.theta(0) == doctest::Approx(3 * kPi / 2));
  CHECK(c.theta(2) == doctest::Approx(0.0));
}

TEST_CASE("translation_character") {
  GeneratorMatrix one = rational_identity(1);
  CHECK(translation_character(one, vec({0.0})).theta.isZero());
  Character half = translation_character(one, vec({kPi}));
  CHECK(half.theta(0) == doctest::Approx(kPi));
  ExpSum ez = make_sum({{1.0, {1}}});
  ExpSystem F(one, {ez});
  ExpSystem Fh = perturb(F, half);
  CHECK(std::abs(eval_sum(Fh.sums()[0], one, cvec({0.8})) + std::exp(0.8)) < 1e-12);
}

TEST_CASE("translation identity on random sums") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> kd(-3, 3);
  Eigen::MatrixXd w(3, 2);
  w << 1.0, 0.5, kSqrt2, -1.0, 0.3, std::sqrt(3.0);
  GeneratorMatrix omega(w);
  const Complex i(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<T> terms;
    for (int t = 0; t < 5; ++t) terms.push_back({Complex(u(rng), u(rng)), {kd(rng), kd(rng), 10 * t + kd(rng)}});
    ExpSum f = make_sum(terms);
    ExpSystem F(omega, {f});
    Eigen::VectorXd y = 4.0 * vec({u(rng), u(rng)});
    ExpSystem Fy = perturb(F, translation_character(omega, y));
    for (int s = 0; s < 100; ++s) {
      Eigen::VectorXd x = 0.1 * vec({u(rng), u(rng)});
      CVector zx = x.cast<Complex>();
      CVector zy = zx + i * y.cast<Complex>();
      Complex lhs = eval_sum(Fy.sums()[0], omega, zx);
      Complex rhs = eval_sum(f, omega, zy);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + coefficient_mass(f) * support_k(f, omega, zx)));
    }
  }
}

TEST_CASE("system invariants") {
  GeneratorMatrix id = rational_identity(1);
  CHECK_THROWS_AS(ExpSystem(id, {}), Error);
  CHECK_THROWS_AS(ExpSystem(id, {make_sum({})}), Error);
  CHECK_THROWS_AS(ExpSystem(id, {make_sum({{1.0, {1}}, {2.0, {1}}})}), Error);
  CHECK_THROWS_AS(ExpSystem(id, {make_sum({{0.0, {1}}})}), Error);
  CHECK_THROWS_AS(ExpSystem(id, {make_sum({{1.0, {1, 0}}})}), DimensionError);
}

TEST_CASE("system hash ignores term order") {
  GeneratorMatrix id = rational_identity(2);
  ExpSystem a(id, {make_sum({{1.0, {0, 0}}, {1.0, {1, 0}}, {1.0, {0, 1}}})});
  ExpSystem b(id, {make_sum({{1.0, {0, 1}}, {1.0, {0, 0}}, {1.0, {1, 0}}})});
  ExpSystem c(id, {make_sum({{1.0, {0, 1}}, {1.0, {0, 0}}, {2.0, {1, 0}}})});
  CHECK(system_hash(a) == system_hash(b));
  CHECK(system_hash(a) != system_hash(c));
  CHECK(system_hash(a).size() == 16);
}
