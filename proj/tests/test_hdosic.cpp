#include <doctest.h>

#include <cmath>
#include <random>

#include "isic/detectors.hpp"
#include "isic/errors.hpp"
#include "isic/sim.hpp"
#include "support.hpp"

using namespace isic;

namespace {

HermitianMatrix reduced_inverse(const ComplexMatrix& h, const std::vector<std::size_t>& cols, double s2) {
  ComplexMatrix sub(h.rows(), cols.size());
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) sub(i, j) = h(i, cols[j]);
  return hermitian_inverse(gram(sub), s2);
}

// Re-solves (H_n^H H_n + s2 I)^-1 H_n^H y_n from scratch at every step.
std::vector<int> literal_hdosic(const ComplexMatrix& h, const ComplexVector& y, const DetectorConfig& cfg,
                                std::vector<std::size_t>* order = nullptr) {
  const std::size_t n = cfg.n;
  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;
  ComplexVector yc(y);
  std::vector<int> decisions(n);
  while (!active.empty()) {
    const std::size_t size = active.size();
    ComplexMatrix a(size, size);
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = 0; j < size; ++j) {
        for (std::size_t k = 0; k < h.rows(); ++k) a(i, j) += std::conj(h(k, active[i])) * h(k, active[j]);
        if (i == j) a(i, j) += cfg.sigma2;
      }
    const ComplexMatrix q = test::dense_inverse(a);
    std::size_t p = 0;
    for (std::size_t i = 1; i < size; ++i)
      if (q(i, i).real() < q(p, p).real()) p = i;
    Complex est = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
      Complex b = 0.0;
      for (std::size_t k = 0; k < h.rows(); ++k) b += std::conj(h(k, active[j])) * yc[k];
      est += q(p, j) * b;
    }
    const int d = nearest_scaled_point(est, 1.0 - cfg.sigma2 * q(p, p).real(), cfg.constellation);
    decisions[active[p]] = d;
    if (order) order->push_back(active[p]);
    for (std::size_t k = 0; k < h.rows(); ++k) yc[k] -= h(k, active[p]) * cfg.constellation.point(d);
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(p));
  }
  return decisions;
}

}  // namespace

TEST_CASE("expansion base case and orthogonal column") {
  const HermitianMatrix q1 = expand_inverse(HermitianMatrix(), {}, 4.0);
  REQUIRE(q1.size() == 1);
  CHECK(q1(0, 0) == Complex(0.25, 0.0));

  const ComplexVector zero(1);
  const HermitianMatrix q2 = expand_inverse(q1, zero.span(), 2.0);
  CHECK(q2(0, 0) == Complex(0.25, 0.0));
  CHECK(q2(1, 1) == Complex(0.5, 0.0));
  CHECK(q2(0, 1) == Complex(0.0, 0.0));
}

TEST_CASE("expansion rejects a non-positive Schur complement") {
  HermitianMatrix q(1);
  q.set(0, 0, 1.0);
  const ComplexVector r{{1.0, 0.0}};
  CHECK_THROWS_AS(expand_inverse(q, r.span(), 1.0), SingularMatrix);
  CHECK_THROWS_AS(expand_inverse(HermitianMatrix(), {}, 0.0), SingularMatrix);
  CHECK_THROWS_AS(expand_inverse(q, {}, 1.0), InvalidArgument);
}

TEST_CASE("column-by-column expansion matches direct inversion") {
  std::mt19937_64 g(8);
  const ComplexMatrix h = test::random_matrix(8, 6, g);
  const double s2 = 0.2;
  HermitianMatrix q;
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < 6; ++j) {
    ComplexVector r(j);
    double gamma = s2;
    for (std::size_t k = 0; k < 8; ++k) gamma += std::norm(h(k, j));
    for (std::size_t i = 0; i < j; ++i)
      for (std::size_t k = 0; k < 8; ++k) r[i] += std::conj(h(k, i)) * h(k, j);
    q = expand_inverse(q, r.span(), gamma);
    cols.push_back(j);
    CHECK(test::max_abs_diff(q.to_dense(), reduced_inverse(h, cols, s2).to_dense()) < 1e-10);
  }
}

TEST_CASE("deflation") {
  std::mt19937_64 g(12);
  const ComplexMatrix h = test::random_matrix(7, 5, g);
  const double s2 = 0.3;
  const HermitianMatrix full = reduced_inverse(h, {0, 1, 2, 3, 4}, s2);

  SUBCASE("matches the reduced Gram inverse") {
    for (std::size_t k = 0; k < 5; ++k) {
      std::vector<std::size_t> keep;
      for (std::size_t j = 0; j < 5; ++j)
        if (j != k) keep.push_back(j);
      CHECK(test::max_abs_diff(deflate_inverse(full, k).to_dense(), reduced_inverse(h, keep, s2).to_dense()) < 1e-10);
    }
  }
  SUBCASE("undoes an expansion") {
    const HermitianMatrix prev = reduced_inverse(h, {0, 1, 2, 3}, s2);
    ComplexVector r(4);
    double gamma = s2;
    for (std::size_t k = 0; k < 7; ++k) gamma += std::norm(h(k, 4));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t k = 0; k < 7; ++k) r[i] += std::conj(h(k, i)) * h(k, 4);
    const HermitianMatrix back = deflate_inverse(expand_inverse(prev, r.span(), gamma), 4);
    CHECK(test::max_abs_diff(back.to_dense(), prev.to_dense()) < 1e-13);
  }
  SUBCASE("diagonal input just loses a row and column") {
    const std::vector<double> d{0.5, 0.25, 0.125};
    const HermitianMatrix q = deflate_inverse(HermitianMatrix::from_diagonal(d), 1);
    CHECK(q == HermitianMatrix::from_diagonal(std::vector<double>{0.5, 0.125}));
  }
  SUBCASE("errors") {
    HermitianMatrix bad = HermitianMatrix::identity(2);
    bad.set(0, 0, 0.0);
    CHECK_THROWS_AS(deflate_inverse(bad, 0), PositiveDefinitenessLost);
    CHECK_THROWS_AS(deflate_inverse(bad, 2), InvalidArgument);
  }
}

TEST_CASE("orthogonal noiseless channel is recovered in any order") {
  const Constellation c(16);
  ComplexMatrix h(3, 3);
  h(0, 0) = 2.0;
  h(1, 1) = {0.0, 0.7};
  h(2, 2) = {-1.1, 0.3};
  const std::vector<int> truth{5, 12, 9};
  ComplexVector y(3);
  for (std::size_t i = 0; i < 3; ++i) y[i] = h(i, i) * c.point(truth[i]);
  const DetectorConfig cfg{3, 3, 1, c, 1e-10};
  CHECK(RecursiveHdOsic(h, y, cfg, LayerOrder::MaxSnr).run() == truth);
  CHECK(RecursiveHdOsic(h, y, cfg, LayerOrder::Natural).run() == truth);
}

TEST_CASE("strongest layer goes first") {
  std::mt19937_64 g(41);
  SUBCASE("one strong, one weak column") {
    ComplexMatrix h = test::random_matrix(2, 2, g);
    for (std::size_t i = 0; i < 2; ++i) {
      h(i, 0) *= 0.1;
      h(i, 1) *= 3.0;
    }
    const ComplexVector y = test::random_vector(2, g);
    std::vector<HdOsicStep> trace;
    RecursiveHdOsic(h, y, DetectorConfig{2, 2, 1, Constellation(4), 0.1}).run(&trace);
    CHECK(trace.front().index == 1);
  }
  SUBCASE("ordering agrees with the post-filtering SINR") {
    for (int t = 0; t < 50; ++t) {
      const std::size_t n = 4, m = 5;
      const double s2 = 0.3;
      const ComplexMatrix h = test::random_matrix(m, n, g);
      const ComplexVector y = test::random_vector(m, g);
      ComplexMatrix cov(m, m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          for (std::size_t k = 0; k < n; ++k) cov(i, j) += h(i, k) * std::conj(h(j, k));
          if (i == j) cov(i, j) += s2;
        }
      const ComplexMatrix d = test::dense_inverse(cov);
      std::size_t best = 0;
      double best_sinr = -1.0;
      for (std::size_t k = 0; k < n; ++k) {
        Complex mu = 0.0;
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j) mu += std::conj(h(i, k)) * d(i, j) * h(j, k);
        const double sinr = mu.real() / (1.0 - mu.real());
        if (sinr > best_sinr) {
          best_sinr = sinr;
          best = k;
        }
      }
      std::vector<HdOsicStep> trace;
      RecursiveHdOsic(h, y, DetectorConfig{n, m, 1, Constellation(4), s2}).run(&trace);
      CHECK(trace.front().index == best);
    }
  }
}

TEST_CASE("recursive HD-OSIC reproduces the step-by-step literal detector") {
  std::mt19937_64 g(303);
  const int orders[] = {4, 16, 64};
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(g() % 6);
    const std::size_t m = n + static_cast<std::size_t>(g() % 3);
    const Constellation c(orders[t % 3]);
    const double s2 = snr_to_sigma2(static_cast<double>(g() % 25), n);
    const ComplexMatrix h = test::random_matrix(m, n, g);
    ComplexVector y(m);
    const ComplexVector w = test::random_vector(m, g);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) y[i] += h(i, j) * c.point(static_cast<int>(g() % c.order()));
      y[i] += std::sqrt(s2) * w[i];
    }
    const DetectorConfig cfg{n, m, 1, c, s2};
    std::vector<std::size_t> order;
    const auto want = literal_hdosic(h, y, cfg, &order);
    std::vector<HdOsicStep> trace;
    CHECK(RecursiveHdOsic(h, y, cfg).run(&trace) == want);
    for (std::size_t i = 0; i < n; ++i) CHECK(trace[i].index == order[i]);
  }
}

TEST_CASE("constructor inverse and memory") {
  std::mt19937_64 g(6);
  const ComplexMatrix h = test::random_matrix(6, 4, g);
  const ComplexVector y = test::random_vector(6, g);
  const RecursiveHdOsic det(h, y, DetectorConfig{4, 6, 1, Constellation(4), 0.4});
  CHECK(test::max_abs_diff(det.inverse().to_dense(), hermitian_inverse(gram(h), 0.4).to_dense()) < 1e-12);
  CHECK(det.matrix_memory_units() == 16);
  CHECK_THROWS_AS(RecursiveHdOsic(h, ComplexVector(5), DetectorConfig{4, 6, 1, Constellation(4), 0.4}),
                  InvalidArgument);
}
