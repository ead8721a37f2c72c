#include <algorithm>
#include <numeric>

#include "isic/detectors.hpp"
#include "isic/errors.hpp"
#include "isic/flops.hpp"

namespace isic {

HermitianMatrix expand_inverse(const HermitianMatrix& previous, std::span<const Complex> r, double gamma) {
  const std::size_t n = previous.size();
  if (r.size() != n) throw InvalidArgument("expand_inverse: length mismatch");
  HermitianMatrix q(n + 1);
  if (n == 0) {
    if (!(gamma > 0.0)) throw SingularMatrix("expand_inverse: non-positive Schur complement");
    q.set(0, 0, 1.0 / gamma);
    return q;
  }

  const ComplexVector u = matvec(previous, r);
  const double schur = gamma - dot(r, u.span()).real();
  if (!(schur > 0.0)) throw SingularMatrix("expand_inverse: non-positive Schur complement");
  const double omega = 1.0 / schur;

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) q.set(i, j, previous(i, j));
  // Q-ddot = Q + q q^H / omega with q = -omega u, i.e. Q + omega u u^H.
  ComplexVector padded(n + 1);
  std::copy(u.begin(), u.end(), padded.begin());
  rank1_update_excluding(q, omega, padded.span(), n);
  for (std::size_t i = 0; i < n; ++i) q.set(i, n, -omega * u[i]);
  flops::count(0, 0, n);
  q.set(n, n, omega);
  return q;
}

HermitianMatrix deflate_inverse(const HermitianMatrix& q, std::size_t k) {
  const std::size_t n = q.size();
  if (k >= n) throw InvalidArgument("deflate_inverse: index out of range");
  const double omega = q.diagonal(k);
  if (!(omega > 0.0)) throw PositiveDefinitenessLost("deflate_inverse: Q(k,k) is not positive");

  ComplexVector column(n);
  for (std::size_t i = 0; i < n; ++i) column[i] = q(i, k);
  HermitianMatrix full = q;
  rank1_update_excluding(full, -1.0 / omega, column.span(), k);

  HermitianMatrix reduced(n - 1);
  for (std::size_t i = 0, ri = 0; i < n; ++i) {
    if (i == k) continue;
    for (std::size_t j = i, rj = ri; j < n; ++j) {
      if (j == k) continue;
      reduced.set(ri, rj, full(i, j));
      ++rj;
    }
    ++ri;
  }
  return reduced;
}

RecursiveHdOsic::RecursiveHdOsic(const ComplexMatrix& h, const ComplexVector& y, DetectorConfig config,
                                 LayerOrder order)
    : config_(std::move(config)), order_(order) {
  config_.validate();
  if (h.rows() != config_.m || h.cols() != config_.n || y.size() != config_.m) {
    throw InvalidArgument("RecursiveHdOsic: dimension mismatch");
  }
  const std::size_t n = config_.n;
  std::vector<ComplexVector> columns;
  columns.reserve(n);
  for (std::size_t j = 0; j < n; ++j) columns.push_back(h.column(j));

  for (std::size_t j = 0; j < n; ++j) {
    ComplexVector r(j);
    for (std::size_t i = 0; i < j; ++i) r[i] = dot(columns[i].span(), columns[j].span());
    const double gamma = dot(columns[j].span(), columns[j].span()).real() + config_.sigma2;
    q_ = expand_inverse(q_, r.span(), gamma);
  }
  const ComplexVector hy = matvec(h, y.span(), Op::ConjTranspose);
  t_ = matvec(q_, hy.span());
}

std::vector<int> RecursiveHdOsic::run(std::vector<HdOsicStep>* trace) {
  const Constellation& c = config_.constellation;
  const double s2 = config_.sigma2;
  std::vector<std::size_t> active(config_.n);
  std::iota(active.begin(), active.end(), std::size_t{0});
  std::vector<int> decisions(config_.n, 0);

  while (!active.empty()) {
    const std::size_t size = active.size();
    std::size_t p = 0;
    if (order_ == LayerOrder::MaxSnr) {
      for (std::size_t i = 1; i < size; ++i) {
        if (q_.diagonal(i) < q_.diagonal(p)) p = i;
      }
    }
    const double omega = q_.diagonal(p);
    const Complex estimate = t_[p];
    const double bias = 1.0 - s2 * omega;
    const int decision = nearest_scaled_point(estimate, bias, c);
    decisions[active[p]] = decision;
    if (trace) trace->push_back({active[p], estimate, bias, decision});

    const Complex gain = (c.point(decision) - estimate) / omega;
    ComplexVector next(size - 1);
    for (std::size_t i = 0, ri = 0; i < size; ++i) {
      if (i == p) continue;
      next[ri++] = t_[i] + gain * q_(i, p);
    }
    flops::count(size - 1, size - 1);
    t_ = std::move(next);
    q_ = deflate_inverse(q_, p);
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(p));
  }
  return decisions;
}

}  // namespace isic
