#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "isic/errors.hpp"
#include "isic/flops.hpp"
#include "isic/linalg.hpp"
#include "support.hpp"

using namespace isic;

TEST_CASE("gram is Hermitian and matches the explicit product") {
  std::mt19937_64 g(11);
  const ComplexMatrix h = test::random_matrix(7, 4, g);
  const HermitianMatrix w = gram(h);
  CHECK(w.max_asymmetry() == 0.0);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < 7; ++k) acc += std::conj(h(k, i)) * h(k, j);
      CHECK(std::abs(w(i, j) - acc) < 1e-14);
    }
  }
}

TEST_CASE("hermitian_inverse inverts A + ridge I") {
  std::mt19937_64 g(3);
  for (std::size_t n = 1; n <= 12; ++n) {
    const ComplexMatrix h = test::random_matrix(n + 2, n, g);
    const HermitianMatrix w = gram(h);
    const double ridge = 0.1 * static_cast<double>(n);
    const HermitianMatrix inv = hermitian_inverse(w, ridge);
    CHECK(inv.max_asymmetry() == 0.0);

    ComplexMatrix a = w.to_dense();
    for (std::size_t i = 0; i < n; ++i) a(i, i) += ridge;
    const ComplexMatrix prod = test::multiply(a, inv.to_dense());
    CHECK(test::max_abs_diff(prod, ComplexMatrix::identity(n)) < 1e-12);
    CHECK(test::rel_diff(inv.to_dense(), test::dense_inverse(a)) < 1e-12);
  }
}

TEST_CASE("hermitian_inverse of a scalar") {
  HermitianMatrix a(1);
  a.set(0, 0, 3.0);
  CHECK(hermitian_inverse(a, 1.0)(0, 0) == Complex(0.25, 0.0));
}

TEST_CASE("hermitian_inverse rejects a non-positive-definite matrix") {
  HermitianMatrix a = HermitianMatrix::identity(3);
  a.set(1, 1, -2.0);
  CHECK_THROWS_AS(hermitian_inverse(a, 0.5), SingularMatrix);
  CHECK_THROWS_AS(hermitian_inverse(HermitianMatrix(), 1.0), InvalidArgument);
}

TEST_CASE("rank-1 updates") {
  std::mt19937_64 g(5);
  const ComplexMatrix h = test::random_matrix(6, 5, g);
  const HermitianMatrix base = gram(h);
  const ComplexVector q = test::random_vector(5, g);

  SUBCASE("full") {
    HermitianMatrix a = base;
    rank1_update(a, -0.7, q.span());
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j)
        CHECK(std::abs(a(i, j) - (base(i, j) - 0.7 * q[i] * std::conj(q[j]))) < 1e-14);
    CHECK(a.max_asymmetry() == 0.0);
  }
  SUBCASE("excluding one index leaves its row and column untouched") {
    HermitianMatrix a = base;
    rank1_update_excluding(a, 0.3, q.span(), 2);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 5; ++j) {
        if (i == 2 || j == 2) {
          CHECK(a(i, j) == base(i, j));
        } else {
          CHECK(std::abs(a(i, j) - (base(i, j) + 0.3 * q[i] * std::conj(q[j]))) < 1e-14);
        }
      }
    }
  }
  SUBCASE("zero coefficient is an exact no-op") {
    HermitianMatrix a = base;
    rank1_update_excluding(a, 0.0, q.span(), 1);
    CHECK(a == base);
  }
}

TEST_CASE("matvec, dot and residual") {
  std::mt19937_64 g(8);
  const ComplexMatrix a = test::random_matrix(4, 3, g);
  const ComplexVector x = test::random_vector(3, g);
  const ComplexVector y = test::random_vector(4, g);

  const ComplexVector ax = matvec(a, x.span());
  const ComplexVector ahy = matvec(a, y.span(), Op::ConjTranspose);
  CHECK(std::abs(dot(y.span(), ax.span()) - std::conj(dot(x.span(), ahy.span()))) < 1e-14);

  const ComplexVector r = residual(y.span(), a, x.span());
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(r[i] - (y[i] - ax[i])) < 1e-15);

  CHECK_THROWS_AS(matvec(a, y.span()), InvalidArgument);
  CHECK_THROWS_AS(dot(x.span(), y.span()), InvalidArgument);
  CHECK_THROWS_AS(residual(x.span(), a, x.span()), InvalidArgument);
}

TEST_CASE("subtract_outer does not conjugate") {
  ComplexMatrix a(1, 1);
  const ComplexVector x{Complex(0, 1)};
  const ComplexVector y{Complex(0, 1)};
  subtract_outer(a, x.span(), y.span());
  CHECK(a(0, 0) == Complex(1, 0));
}

TEST_CASE("DiagonalVariance clamps into [1e-12, 1]") {
  DiagonalVariance v(3);
  CHECK(v[0] == 1.0);
  CHECK(v.set(0, 2.0) == 1.0);
  CHECK(v.set(1, 1e-20) == DiagonalVariance::kMin);
  CHECK(v.set(2, std::numeric_limits<double>::quiet_NaN()) == DiagonalVariance::kMin);
  CHECK(v.set(2, 0.25) == 0.25);
}

TEST_CASE("memory units") {
  CHECK(ComplexMatrix(3, 5).memory_units() == 30);
  CHECK(HermitianMatrix(7).memory_units() == 49);
}

TEST_CASE("flop counter") {
  SUBCASE("flops = 6 cmul + 2 cadd + 2 rmul") {
    flops::FlopCounter c{3, 4, 5};
    CHECK(c.flops() == 18 + 8 + 10);
  }
  SUBCASE("gram tally") {
    std::mt19937_64 g(1);
    const ComplexMatrix h = test::random_matrix(5, 4, g);
    flops::FlopCounter c;
    {
      flops::Scope s(c);
      gram(h);
    }
    CHECK(c.cmul == 10 * 5);
    CHECK(c.cadd == 10 * 4);
  }
  SUBCASE("nothing is tallied outside a scope") {
    flops::FlopCounter c;
    { flops::Scope s(c); }
    std::mt19937_64 g(1);
    gram(test::random_matrix(3, 3, g));
    CHECK(c == flops::FlopCounter{});
  }
  SUBCASE("scopes nest and restore") {
    flops::FlopCounter outer, inner;
    {
      flops::Scope a(outer);
      flops::count(1, 0);
      {
        flops::Scope b(inner);
        flops::count(2, 0);
      }
      flops::count(4, 0);
    }
    CHECK(outer.cmul == 5);
    CHECK(inner.cmul == 2);
  }
  SUBCASE("per-thread counters merge to the single-thread count") {
    std::mt19937_64 g(2);
    const ComplexMatrix h = test::random_matrix(9, 6, g);
    auto work = [&h](flops::FlopCounter& c, int reps) {
      flops::Scope s(c);
      for (int r = 0; r < reps; ++r) hermitian_inverse(gram(h), 0.5);
    };
    flops::FlopCounter single;
    work(single, 8);
    flops::FlopCounter parts[4];
    std::thread threads[4];
    for (int t = 0; t < 4; ++t) threads[t] = std::thread(work, std::ref(parts[t]), 2);
    for (auto& t : threads) t.join();
    flops::FlopCounter merged;
    for (const auto& p : parts) merged += p;
    CHECK(merged == single);
  }
}
