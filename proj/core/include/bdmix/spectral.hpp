#pragma once

#include <span>
#include <string>
#include <vector>

#include "bdmix/chain.hpp"

namespace bdmix {

/// Symmetric tridiagonal matrix similar to the kernel. `offdiagonal[i]`
/// couples i and i+1 and equals sqrt(p_i q_{i+1}).
struct Tridiagonal {
  std::vector<double> diagonal;
  std::vector<double> offdiagonal;
};

struct SpectrumReport {
  /// Sorted descending.
  std::vector<double> eigenvalues;
  /// 1 - max |nontrivial eigenvalue|; for a principal submatrix, 1 - largest eigenvalue.
  double gap = 0.0;
  /// 1 / gap (infinite when gap is 0).
  double t_rel = 0.0;
  /// Largest nontrivial eigenvalue (largest eigenvalue for a submatrix).
  double lambda2 = 0.0;
  /// gap exceeds the global tolerance.
  bool ergodic = false;
  std::vector<std::string> warnings;
};

Tridiagonal symmetrized_tridiagonal(const Chain& chain);

/// All eigenvalues of the kernel, by Sturm-sequence bisection run to machine
/// precision. The trivial eigenvalue is the first entry and is excluded from
/// the gap by position.
SpectrumReport eigenvalues(const Chain& chain);

/// Spectrum of the principal submatrix on {0, ..., ell-1}.
SpectrumReport absorbing_submatrix_spectrum(const Chain& chain, State ell);

/// Eigenvalues of the principal block {0, ..., ell-1}, descending. Unlike
/// absorbing_submatrix_spectrum this accepts ell = 0 and any ell <= n.
std::vector<double> submatrix_eigenvalues(const Chain& chain, State ell);

/// Eigenvalues (descending) of the symmetric tridiagonal matrix with the given
/// diagonal and squared off-diagonal entries. Squared entries are what a
/// non-symmetric tridiagonal contributes through its products b_i c_i.
std::vector<double> tridiagonal_eigenvalues(std::span<const double> diagonal,
                                            std::span<const double> offdiagonal_squared);

/// gap and t_rel from two bisections instead of the full spectrum.
struct GapSummary {
  double lambda2 = 0.0;
  double lambda_min = 0.0;
  double gap = 0.0;
  double t_rel = 0.0;
};
GapSummary spectral_gap(const Chain& chain);

}  // namespace bdmix
