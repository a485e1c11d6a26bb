#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>

#include "qjumps/parallel.hpp"
#include "qjumps/quadrature.hpp"
#include "qjumps/random.hpp"
#include "qjumps/stats.hpp"
#include "qjumps/trajectory.hpp"

using namespace qjumps;

TEST_SUITE("numerics") {
  TEST_CASE("adaptive quadrature on known integrals") {
    auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-13);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
    r = integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-12);
    CHECK(r.value == doctest::Approx(2.0 / 3.0).epsilon(1e-11));
    r = integrate_decaying([](double t) { return t * std::exp(-2.0 * t); }, 1.0, 1e-13);
    CHECK(r.value == doctest::Approx(0.25).epsilon(1e-12));
    r = integrate_decaying([](double t) { return std::exp(-t * t); }, 1.0, 1e-13);
    CHECK(r.value == doctest::Approx(0.5 * std::sqrt(std::numbers::pi)).epsilon(1e-12));
    CHECK_THROWS_AS(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-15, 0.0, 3), DomainError);
  }

  TEST_CASE("bisection") {
    const double root = bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14);
    CHECK(root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  }

  TEST_CASE("substreams are deterministic and distinct") {
    auto a = substream(1, 2, 3), b = substream(1, 2, 3), c = substream(1, 2, 4), d = substream(1, 3, 3);
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    CHECK(va != c.next_u64());
    CHECK(va != d.next_u64());
    RandomStream r(5);
    for (int i = 0; i < 100000; ++i) {
      const double u = r.uniform_open();
      REQUIRE(u > 0.0);
      REQUIRE(u <= 1.0);
    }
  }

  TEST_CASE("Welford accumulator and merge") {
    MeanAccumulator a, b, all;
    for (int i = 0; i < 100; ++i) {
      const double v = std::sin(i * 0.37);
      (i < 40 ? a : b).add(v);
      all.add(v);
    }
    a.merge(b);
    CHECK(a.count() == 100);
    CHECK(a.mean() == doctest::Approx(all.mean()).epsilon(1e-14));
    CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
    MeanAccumulator one;
    one.add(3.0);
    CHECK(one.variance() == 0.0);
  }

  TEST_CASE("blocked standard error sees serial correlation") {
    // AR(1) series with correlation 0.9: the naive SE is too small by ~√19.
    RandomStream r(6);
    std::vector<double> s(200000);
    double v = 0.0;
    for (auto& x : s) {
      v = 0.9 * v + std::sqrt(1 - 0.81) * r.normal();
      x = v;
    }
    MeanAccumulator naive;
    for (double x : s) naive.add(x);
    const auto blocked = blocked_mean(s, 500);
    CHECK(blocked.standard_error / naive.standard_error() == doctest::Approx(std::sqrt(19.0)).epsilon(0.2));
  }

  TEST_CASE("KS distance") {
    std::vector<double> u;
    RandomStream r(7);
    for (int i = 0; i < 100000; ++i) u.push_back(r.uniform());
    CHECK(ks_distance(u, [](double x) { return x; }) < 0.01);
    CHECK(ks_distance(u, [](double x) { return x * x; }) > 0.2);
    CHECK(ks_distance({0.5}, [](double x) { return x; }) == doctest::Approx(0.5));
  }

  TEST_CASE("parallel_for covers every index and rethrows") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                      if (i == 7) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
    CHECK(resolve_workers(3) == 3);
    CHECK(resolve_workers(0) >= 1);
  }

  TEST_CASE("stationary schedule") {
    const auto s = stationary_schedule(20.0, 0.5, 4);
    CHECK(s == std::vector<double>{20.0, 20.5, 21.0, 21.5});
  }
}
