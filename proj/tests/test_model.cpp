#include <doctest.h>

#include <random>

#include "hrwave/errors.hpp"
#include "hrwave/model.hpp"
#include "oracles/brute_force.hpp"

using namespace hrwave;
using oracle::kPi;

TEST_CASE("nonlinearity families") {
  const auto sg = Nonlinearity::parse("sine:40", 1.0);
  CHECK(sg.label() == "sine:40");
  CHECK(sg.f(0.0) == 0.0);
  CHECK(sg.g(0.5) == doctest::Approx(40 * std::sin(0.5)));
  const auto kg = Nonlinearity::parse("cubic:1", 2.0);
  CHECK(kg.f(2.0) == doctest::Approx(8 + 4));
  CHECK(kg.df(2.0) == doctest::Approx(12 + 2));
  const auto lin = Nonlinearity::parse("linear", 3.0);
  CHECK(lin.f(1.7) == 0.0);
  CHECK(lin.df(1.7) == 0.0);
  for (const auto& nl : {sg, kg}) {
    for (double u : {-1.3, 0.2, 2.1}) {
      const double h = 1e-5;
      CHECK(nl.dg(u) == doctest::Approx((nl.g(u + h) - nl.g(u - h)) / (2 * h)).epsilon(1e-7));
      CHECK(nl.d2g(u) == doctest::Approx((nl.dg(u + h) - nl.dg(u - h)) / (2 * h)).epsilon(1e-7));
    }
  }
  CHECK_THROWS(Nonlinearity::parse("tanh:1", 1.0));
  CHECK_THROWS(Nonlinearity::parse("sine:abc", 1.0));
  CHECK_THROWS(Nonlinearity::parse("sine:1", 0.0));
}

TEST_CASE("eval_f_on_grid") {
  SUBCASE("constant input") {
    const auto nl = Nonlinearity::parse("sine:40", 1.0);
    auto u = SpectralField<double>::zero(1, 8);
    u[{0}] = 0.7;
    const auto f = eval_f_on_grid(nl, u, Which::F);
    CHECK(std::abs(f[{0}] - nl.f(0.7)) < 1e-13);
    double rest = 0;
    for (int k = -8; k < 8; ++k)
      if (k) rest = std::max(rest, std::abs(f[{k}]));
    CHECK(rest < 1e-14);
    const auto df = eval_f_on_grid(nl, u, Which::FPrime);
    CHECK(std::abs(df[{0}] - nl.df(0.7)) < 1e-13);
  }
  SUBCASE("zero input of sine-Gordon") {
    const auto f = eval_f_on_grid(Nonlinearity::parse("sine:40", 1.0), SpectralField<double>::zero(2, 4), Which::F);
    CHECK(f.coeffs.abs().maxCoeff() == 0.0);
  }
  SUBCASE("matches pointwise evaluation, cubic") {
    std::mt19937_64 rng(8);
    const auto nl = Nonlinearity::parse("cubic:1", 1.0);
    for (int dim : {1, 2}) {
      const auto u = oracle::random_real_field(dim, 8, rng);
      const auto f = eval_f_on_grid(nl, u, Which::F);
      const int side = 16;
      for (int i = 0; i < side; ++i) {
        for (int j = 0; j < (dim == 1 ? 1 : side); ++j) {
          const double x1 = double(i) / side, x2 = double(j) / side;
          const double expect = nl.f(oracle::evaluate(u, x1, x2).real());
          CHECK(std::abs(oracle::evaluate(f, x1, x2) - expect) < 1e-13 * std::max(1.0, std::abs(expect)));
        }
      }
    }
  }
  SUBCASE("f = m u is reproduced exactly") {
    std::mt19937_64 rng(12);
    const auto nl = Nonlinearity::parse("sine:0", 2.5);
    const auto u = oracle::random_real_field(1, 16, rng);
    CHECK((eval_f_on_grid(nl, u, Which::F).coeffs - 2.5 * u.coeffs).abs().maxCoeff() < 1e-13);
  }
  SUBCASE("overflow signals blow-up") {
    auto u = SpectralField<double>::zero(1, 4);
    u[{0}] = 1e120;
    CHECK_THROWS_AS(eval_f_on_grid(Nonlinearity::parse("cubic:1", 1.0), u, Which::F), BlowUpError);
  }
  SUBCASE("non-real input is rejected") {
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(eval_f_on_grid(Nonlinearity::parse("sine:1", 1.0), oracle::random_complex_field(1, 4, rng), Which::F),
                    std::invalid_argument);
  }
}

TEST_CASE("exact box coefficients") {
  const auto f = exact_box_coefficients(0.3, 0.425, 5, 16);
  CHECK(f[{0}].real() == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(f.hermitian);
  CHECK(is_hermitian(f));
  const auto one = exact_box_coefficients(0, 1, 1, 8);
  CHECK(std::abs(one[{0}] - 1.0) < 1e-15);
  for (int k = 1; k < 8; ++k) {
    CHECK(std::abs(one[{k}]) < 1e-15);
    CHECK(std::abs(one[{-k}]) < 1e-15);
  }
  // Midpoint rule with 2^20 cells on the box itself.
  const int cells = 1 << 20;
  for (int k = 1; k <= 8; ++k) {
    std::complex<double> acc = 0;
    const double h = (0.425 - 0.3) / cells;
    for (int j = 0; j < cells; ++j) acc += std::polar(1.0, -2 * kPi * k * (0.3 + (j + 0.5) * h));
    CHECK(std::abs(f[{k}] - 5.0 * h * acc) < 1e-9);
  }
  CHECK_THROWS_AS(exact_box_coefficients(0.5, 0.5, 1, 8), std::invalid_argument);
  CHECK_THROWS_AS(exact_box_coefficients(-0.1, 0.5, 1, 8), std::invalid_argument);
}

TEST_CASE("box presets") {
  InitialData sg;
  REQUIRE(make_preset("boxes:sg1d", 1, 0, sg));
  const auto w = build_initial(sg, 64);
  const auto expect = exact_box_coefficients(0.3, 0.425, 5, 64) + exact_box_coefficients(0.575, 0.7, 2.5, 64);
  CHECK((w.u.coeffs - expect.coeffs).abs().maxCoeff() < 1e-15);
  CHECK((w.v.coeffs + expect.coeffs).abs().maxCoeff() < 1e-15);

  InitialData kg;
  REQUIRE(make_preset("boxes:kg1d", 1, 0, kg));
  CHECK(build_initial(kg, 32).v.coeffs.abs().maxCoeff() == 0.0);

  InitialData two;
  REQUIRE(make_preset("boxes:sg2d-two", 2, 0, two));
  const auto w2 = build_initial(two, 16);
  const auto x = exact_box_coefficients(0.3, 0.425, 1, 16);
  CHECK(std::abs(w2.u[{3, -2}] - 0.5 * x[{3}] * x[{-2}] -
                 0.25 * exact_box_coefficients(0.575, 0.7, 1, 16)[{3}] *
                     exact_box_coefficients(0.575, 0.7, 1, 16)[{-2}]) < 1e-15);
  CHECK(inverse_transform_complex(w2.u).values.imag().abs().maxCoeff() < 1e-13);

  InitialData empty{1, Boxes{}, "empty"};
  const auto z = build_initial(empty, 8);
  CHECK(z.u.coeffs.abs().maxCoeff() == 0.0);
  CHECK(z.v.coeffs.abs().maxCoeff() == 0.0);

  InitialData unused;
  CHECK_FALSE(make_preset("boxes:nope", 1, 0, unused));
  CHECK_THROWS(make_preset("boxes:sg1d", 2, 0, unused));
  CHECK_THROWS(make_preset("boxes:sg2d-one", 1, 0, unused));
}

TEST_CASE("box partial sums converge like N^-1/2") {
  InitialData sg;
  make_preset("boxes:sg1d", 1, 0, sg);
  const auto u = build_initial(sg, 2048).u;
  std::vector<double> logn, logerr;
  for (int N = 16; N <= 1024; N *= 2) {
    logn.push_back(std::log(double(N)));
    logerr.push_back(std::log(sobolev_norm(band(u, N, 2 * N), 0.0)));
  }
  const double n = double(logn.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < logn.size(); ++i) mx += logn[i] / n, my += logerr[i] / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < logn.size(); ++i) sxx += (logn[i] - mx) * (logn[i] - mx), sxy += (logn[i] - mx) * (logerr[i] - my);
  CHECK(sxy / sxx == doctest::Approx(-0.5).epsilon(0.2));
}

TEST_CASE("rough data") {
  Rough spec;
  spec.seed = 42;
  SUBCASE("norms hit the targets") {
    const auto w = build_rough(spec, 2, 64);
    CHECK(sobolev_norm(w.u, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sobolev_norm(w.v, -0.5) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("deterministic and real") {
    const auto a = build_rough(spec, 2, 32);
    const auto b = build_rough(spec, 2, 32);
    CHECK((a.u.coeffs == b.u.coeffs).all());
    CHECK((a.v.coeffs == b.v.coeffs).all());
    CHECK(inverse_transform_complex(a.u).values.imag().abs().maxCoeff() < 1e-12);
    CHECK(inverse_transform_complex(a.v).values.imag().abs().maxCoeff() < 1e-12);
    Rough other = spec;
    other.seed = 43;
    CHECK((build_rough(other, 2, 32).u.coeffs != a.u.coeffs).any());
  }
  SUBCASE("truncations of one dataset agree") {
    spec.normalization_bandwidth = 128;
    const auto coarse = build_rough(spec, 2, 16);
    const auto fine = build_rough(spec, 2, 64);
    const auto cut = resize(project(fine.u, 15), 16);
    CHECK((cut.coeffs - coarse.u.coeffs).abs().maxCoeff() == 0.0);
  }
  SUBCASE("magnitudes decay at the configured rate") {
    spec.seed = 7;
    const auto w = build_rough(spec, 2, 1024);
    std::vector<double> lk, lm;
    for (int lo = 4; lo < 1024; lo *= 2) {
      double sum = 0;
      int count = 0;
      for (int k = lo; k < 2 * lo && k < 1024; ++k, ++count) sum += std::abs(w.u[{k, 0}]) * std::pow(double(k), 1.01);
      lk.push_back(std::log(double(lo)));
      lm.push_back(std::log(sum / count));
    }
    // After removing k^-1.01 the band means are flat up to sampling noise.
    double mx = 0, my = 0;
    const double n = double(lk.size());
    for (std::size_t i = 0; i < lk.size(); ++i) mx += lk[i] / n, my += lm[i] / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lk.size(); ++i) sxx += (lk[i] - mx) * (lk[i] - mx), sxy += (lk[i] - mx) * (lm[i] - my);
    CHECK(std::abs(sxy / sxx) < 0.1);
  }
}

TEST_CASE("smooth data and mode source") {
  InitialData sm;
  REQUIRE(make_preset("smooth:sin", 1, 0, sm));
  const auto w = build_initial(sm, 16);
  CHECK(std::abs(w.u[{1}] - std::complex<double>(0, -0.5)) < 1e-15);
  CHECK(std::abs(w.u[{-1}] - std::complex<double>(0, 0.5)) < 1e-15);
  const ModeSource src(sm, 16);
  CHECK(std::abs(src({1}).first - w.u[{1}]) < 1e-15);
  CHECK(std::abs(src({5}).first) == 0.0);

  InitialData sg;
  make_preset("boxes:sg1d", 1, 0, sg);
  const ModeSource boxes(sg, 64);
  const auto built = build_initial(sg, 64);
  CHECK(boxes({-64}).first == 0.0);
  CHECK(boxes({17}).first == built.u[{17}]);
}
