#include "bdmix/transition_powers.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <bit>
#include <cmath>

#include "parallel.hpp"

namespace bdmix {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// out = in * P for one row.
void step_row(const Chain& c, const double* in, double* out, std::size_t m) {
  const auto p = c.births();
  const auto q = c.deaths();
  const auto r = c.holds();
  for (std::size_t j = 0; j < m; ++j) {
    double v = in[j] * r[j];
    if (j > 0) v += in[j - 1] * p[j - 1];
    if (j + 1 < m) v += in[j + 1] * q[j + 1];
    out[j] = v;
  }
}

void multiply(std::vector<double>& a, const std::vector<double>& b, std::size_t m) {
  Eigen::Map<RowMajor> ma(a.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Eigen::Map<const RowMajor> mb(b.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  RowMajor prod = ma * mb;
  std::copy(prod.data(), prod.data() + m * m, a.begin());
}

double half_l1(const double* a, const double* b, std::size_t m) {
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) s += std::abs(a[j] - b[j]);
  return 0.5 * s;
}

}  // namespace

TransitionPowers::TransitionPowers(const Chain& chain)
    : chain_(chain),
      m_(chain.size()),
      rows_(m_ * m_, 0.0),
      powers_(std::make_shared<std::vector<std::vector<double>>>()) {
  for (std::size_t i = 0; i < m_; ++i) rows_[i * m_ + i] = 1.0;
}

void TransitionPowers::step() {
  std::vector<double> next(m_ * m_);
  detail::parallel_for(
      m_, [&](std::size_t x) { step_row(chain_, rows_.data() + x * m_, next.data() + x * m_, m_); }, 64);
  rows_.swap(next);
  ++time_;
}

const std::vector<double>& TransitionPowers::power_of_two(unsigned k) {
  auto& powers = *powers_;
  if (powers.empty()) {
    std::vector<double> p(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      p[i * m_ + i] = chain_.hold(i);
      if (i + 1 < m_) p[i * m_ + i + 1] = chain_.birth(i);
      if (i > 0) p[i * m_ + i - 1] = chain_.death(i);
    }
    powers.push_back(std::move(p));
  }
  while (powers.size() <= k) {
    std::vector<double> sq = powers.back();
    multiply(sq, powers.back(), m_);
    powers.push_back(std::move(sq));
  }
  return powers[k];
}

void TransitionPowers::advance(std::size_t h) {
  // A dense product costs roughly as much as 2m/3 tridiagonal steps.
  const std::size_t dense_threshold = std::max<std::size_t>(2 * m_ / 3, 1);
  while (h > 0) {
    const unsigned k = static_cast<unsigned>(std::bit_width(h) - 1);
    const std::size_t jump = std::size_t{1} << k;
    if (jump > dense_threshold) {
      multiply(rows_, power_of_two(k), m_);
      time_ += jump;
      h -= jump;
    } else {
      for (std::size_t i = 0; i < h; ++i) step();
      h = 0;
    }
  }
}

double TransitionPowers::worst_tv(std::span<const double> pi, State* argmax) const {
  std::vector<double> tv(m_);
  detail::parallel_for(m_, [&](std::size_t x) { tv[x] = half_l1(rows_.data() + x * m_, pi.data(), m_); }, 64);
  const auto it = std::max_element(tv.begin(), tv.end());
  if (argmax) *argmax = static_cast<State>(it - tv.begin());
  return *it;
}

double TransitionPowers::pairwise_tv() const {
  std::vector<double> best(m_, 0.0);
  detail::parallel_for(
      m_,
      [&](std::size_t x) {
        double b = 0.0;
        for (std::size_t y = x + 1; y < m_; ++y) {
          b = std::max(b, half_l1(rows_.data() + x * m_, rows_.data() + y * m_, m_));
        }
        best[x] = b;
      },
      8);
  return *std::max_element(best.begin(), best.end());
}

}  // namespace bdmix
