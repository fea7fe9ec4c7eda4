#pragma once

// Independent dense reference computations for the tests. Everything here
// works on full (n+1)x(n+1) matrices and shares no code with the library
// beyond Chain's accessors.

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bdmix/chain.hpp"

namespace oracle {

Eigen::MatrixXd dense(const bdmix::Chain& c);
Eigen::MatrixXd power(const bdmix::Chain& c, std::size_t t);

/// Left null vector of P - I, normalised.
std::vector<double> stationary(const bdmix::Chain& c);

/// Real parts of the eigenvalues of the dense kernel, descending.
std::vector<double> eigenvalues(const Eigen::MatrixXd& m);
std::vector<double> eigenvalues(const bdmix::Chain& c);

double tv(const Eigen::RowVectorXd& a, const std::vector<double>& b);
double worst_tv(const bdmix::Chain& c, std::size_t t);
double pairwise_tv(const bdmix::Chain& c, std::size_t t);
double worst_separation(const bdmix::Chain& c, std::size_t t);

/// First t with d(t) <= eps by scanning t = 0, 1, ...
std::size_t linear_mixing_time(const bdmix::Chain& c, double eps, std::size_t horizon = 1000000);

/// E_x tau_target for every x, from (I - P) h = 1 off the target.
std::vector<double> expected_hitting(const bdmix::Chain& c, bdmix::State target);

/// P_start(tau_target = t), t = 0..horizon, by brute-force matrix powers of
/// the absorbed kernel.
std::vector<double> hitting_pmf(const bdmix::Chain& c, bdmix::State start, bdmix::State target,
                                std::size_t horizon);

/// H_t(x,.) = exp(t(P - I)) row x, by Eigen's dense matrix exponential.
std::vector<double> heat_kernel(const bdmix::Chain& c, bdmix::State x, double t);

// Named chains used throughout.
bdmix::Chain c2();
bdmix::Chain swap_chain();
bdmix::Chain c4();
/// Lazy biased walk on {0,1,2,3}: interior p = 1/3, q = 1/6.
bdmix::Chain lazy_biased3();

/// Lazy irreducible chain, p and q drawn from U[lo, hi] (boundary entries 0).
bdmix::Chain random_lazy(std::mt19937_64& rng, std::size_t n, double lo = 0.05, double hi = 0.25);
/// Irreducible chain with arbitrary holding (possibly zero).
bdmix::Chain random_chain(std::mt19937_64& rng, std::size_t n);
/// Irreducible monotone chain: p_i + q_{i+1} <= 1.
bdmix::Chain random_monotone(std::mt19937_64& rng, std::size_t n);

}  // namespace oracle
