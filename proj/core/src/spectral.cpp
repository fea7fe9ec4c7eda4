#include "bdmix/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bdmix/config.hpp"
#include "bdmix/errors.hpp"
#include "parallel.hpp"

namespace bdmix {
namespace {

// Tridiagonal kept as (diagonal, squared off-diagonal). The characteristic
// polynomial only depends on the products p_i q_{i+1}, so no square roots
// enter the bisection.
struct SquaredTridiagonal {
  std::vector<double> a;
  std::vector<double> b2;
};

SquaredTridiagonal block(const Chain& chain, std::size_t size) {
  SquaredTridiagonal t;
  t.a.assign(chain.holds().begin(), chain.holds().begin() + static_cast<std::ptrdiff_t>(size));
  t.b2.resize(size > 0 ? size - 1 : 0);
  for (std::size_t i = 0; i + 1 < size; ++i) t.b2[i] = chain.birth(i) * chain.death(i + 1);
  return t;
}

class Bisector {
 public:
  explicit Bisector(const SquaredTridiagonal& t) : t_(t) {
    const std::size_t m = t.a.size();
    lo_ = std::numeric_limits<double>::infinity();
    hi_ = -lo_;
    double maxb2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double left = i > 0 ? std::sqrt(t.b2[i - 1]) : 0.0;
      const double right = i + 1 < m ? std::sqrt(t.b2[i]) : 0.0;
      lo_ = std::min(lo_, t.a[i] - left - right);
      hi_ = std::max(hi_, t.a[i] + left + right);
      if (i + 1 < m) maxb2 = std::max(maxb2, t.b2[i]);
    }
    const double width = std::max(hi_ - lo_, 1.0);
    lo_ -= 4 * std::numeric_limits<double>::epsilon() * width;
    hi_ += 4 * std::numeric_limits<double>::epsilon() * width;
    pivmin_ = std::numeric_limits<double>::min() * std::max(1.0, maxb2);
    abs_floor_ = 1e-18 * width;
  }

  // Number of eigenvalues strictly below x.
  std::size_t count_below(double x) const {
    std::size_t count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < t_.a.size(); ++i) {
      d = t_.a[i] - x - (i > 0 ? t_.b2[i - 1] / d : 0.0);
      if (std::abs(d) < pivmin_) d = -pivmin_;
      if (d < 0.0) ++count;
    }
    return count;
  }

  // k-th smallest eigenvalue (0-based).
  double kth(std::size_t k) const {
    double lo = lo_, hi = hi_;
    for (int iter = 0; iter < 400; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double tol = std::max(2 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)),
                                  abs_floor_);
      if (hi - lo <= tol) break;
      if (count_below(mid) > k) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

 private:
  const SquaredTridiagonal& t_;
  double lo_ = 0.0, hi_ = 0.0, pivmin_ = 0.0, abs_floor_ = 0.0;
};

std::vector<double> all_eigenvalues(const SquaredTridiagonal& t) {
  const std::size_t m = t.a.size();
  std::vector<double> out(m);
  if (m == 0) return out;
  Bisector bis(t);
  detail::parallel_for(m, [&](std::size_t k) { out[m - 1 - k] = bis.kth(k); }, 16);
  return out;
}

double safe_inverse(double gap) {
  return gap > 0.0 ? 1.0 / gap : std::numeric_limits<double>::infinity();
}

}  // namespace

Tridiagonal symmetrized_tridiagonal(const Chain& chain) {
  Tridiagonal t;
  t.diagonal.assign(chain.holds().begin(), chain.holds().end());
  t.offdiagonal.resize(chain.n());
  for (std::size_t i = 0; i < chain.n(); ++i) {
    const double prod = chain.birth(i) * chain.death(i + 1);
    if (prod < 0.0) throw NumericalError("negative product under square root");
    t.offdiagonal[i] = std::sqrt(prod);
  }
  return t;
}

SpectrumReport eigenvalues(const Chain& chain) {
  SpectrumReport rep;
  rep.eigenvalues = all_eigenvalues(block(chain, chain.size()));
  const auto& e = rep.eigenvalues;
  if (!chain.irreducible()) {
    rep.warnings.push_back("chain is reducible; gap refers to the full spectrum");
  }
  if (e.size() == 1) {
    rep.gap = 1.0;
    rep.lambda2 = 0.0;
  } else {
    rep.lambda2 = e[1];
    rep.gap = 1.0 - std::max(std::abs(e[1]), std::abs(e.back()));
  }
  rep.gap = std::max(rep.gap, 0.0);
  rep.t_rel = safe_inverse(rep.gap);
  rep.ergodic = rep.gap > tolerance();
  if (!rep.ergodic) rep.warnings.push_back("non-ergodic spectrum (gap is zero)");
  return rep;
}

std::vector<double> submatrix_eigenvalues(const Chain& chain, State ell) {
  if (ell > chain.n()) throw InvalidInput("submatrix size " + std::to_string(ell) + " exceeds n");
  return all_eigenvalues(block(chain, ell));
}

SpectrumReport absorbing_submatrix_spectrum(const Chain& chain, State ell) {
  if (ell == 0 || ell > chain.n()) {
    throw InvalidInput("ell must lie in [1, n], got " + std::to_string(ell));
  }
  SpectrumReport rep;
  rep.eigenvalues = all_eigenvalues(block(chain, ell));
  rep.lambda2 = rep.eigenvalues.front();
  rep.gap = 1.0 - rep.lambda2;
  rep.t_rel = safe_inverse(rep.gap);
  rep.ergodic = rep.gap > tolerance();
  return rep;
}

std::vector<double> tridiagonal_eigenvalues(std::span<const double> diagonal,
                                            std::span<const double> offdiagonal_squared) {
  if (offdiagonal_squared.size() + 1 != diagonal.size() && !(diagonal.empty() && offdiagonal_squared.empty())) {
    throw InvalidInput("off-diagonal must have one entry fewer than the diagonal");
  }
  SquaredTridiagonal t;
  t.a.assign(diagonal.begin(), diagonal.end());
  t.b2.assign(offdiagonal_squared.begin(), offdiagonal_squared.end());
  for (double x : t.b2) {
    if (!(x >= 0.0)) throw InvalidInput("squared off-diagonal entries must be non-negative");
  }
  return all_eigenvalues(t);
}

GapSummary spectral_gap(const Chain& chain) {
  GapSummary g;
  const std::size_t m = chain.size();
  if (m == 1) {
    g.gap = 1.0;
    g.t_rel = 1.0;
    return g;
  }
  const SquaredTridiagonal t = block(chain, m);
  Bisector bis(t);
  g.lambda2 = bis.kth(m - 2);
  g.lambda_min = bis.kth(0);
  g.gap = std::max(0.0, 1.0 - std::max(std::abs(g.lambda2), std::abs(g.lambda_min)));
  g.t_rel = safe_inverse(g.gap);
  return g;
}

}  // namespace bdmix
