#include "bdmix/families.hpp"

#include <cmath>
#include <sstream>

#include "bdmix/errors.hpp"
#include "bdmix/hitting.hpp"
#include "bdmix/spectral.hpp"

namespace bdmix {
namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(15);
  os << x;
  return os.str();
}

void require_size(std::size_t n, const char* family) {
  if (n == 0) throw InvalidInput(std::string(family) + " needs n >= 1");
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) throw InvalidInput("not a number: '" + s + "'");
  return v;
}

}  // namespace

Chain realize_eigenvalues(std::span<const double> thetas) {
  const std::size_t n = thetas.size();
  std::vector<double> p(n + 1, 0.0), q(n + 1, 0.0), r(n + 1, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(thetas[i] >= 0.0 && thetas[i] < 1.0)) {
      throw InvalidInput("theta[" + std::to_string(i) + "] = " + num(thetas[i]) + " outside [0, 1)");
    }
    p[i] = 1.0 - thetas[i];
    r[i] = thetas[i];
  }
  return Chain::create(std::move(p), std::move(q), std::move(r));
}

Chain generate(const FamilySpec& spec) {
  const std::size_t n = spec.n;
  std::vector<double> p(n + 1, 0.0), q(n + 1, 0.0), r(n + 1, 0.0);
  switch (spec.kind) {
    case FamilyKind::lazy_srw:
      require_size(n, "lazy_srw");
      for (std::size_t i = 0; i <= n; ++i) {
        p[i] = i < n ? 0.25 : 0.0;
        q[i] = i > 0 ? 0.25 : 0.0;
        r[i] = 1.0 - p[i] - q[i];
      }
      break;
    case FamilyKind::biased_walk: {
      require_size(n, "biased_walk");
      const double beta = spec.beta;
      if (!(beta > 0.5 && beta < 1.0)) throw InvalidInput("biased_walk needs beta in (1/2, 1), got " + num(beta));
      for (std::size_t i = 0; i <= n; ++i) {
        p[i] = i < n ? beta / 2.0 : 0.0;
        q[i] = i > 0 ? (1.0 - beta) / 2.0 : 0.0;
        r[i] = i > 0 && i < n ? 0.5 : 1.0 - p[i] - q[i];
      }
      break;
    }
    case FamilyKind::ehrenfest_like: {
      require_size(n, "ehrenfest_like");
      const double two_n = 2.0 * static_cast<double>(n);
      for (std::size_t i = 0; i <= n; ++i) {
        p[i] = static_cast<double>(n - i) / two_n;
        q[i] = static_cast<double>(i) / two_n;
        r[i] = 0.5;
      }
      break;
    }
    case FamilyKind::pure_birth:
      return realize_eigenvalues(spec.thetas);
    case FamilyKind::custom:
      if (!spec.custom) throw InvalidInput("custom family without a builder");
      return spec.custom(n);
  }
  return Chain::create(std::move(p), std::move(q), std::move(r));
}

FamilySpec parse_family(const std::string& text) {
  FamilySpec spec;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : text.substr(colon + 1);
  spec.name = text;
  if (head == "lazy_srw" || head == "srw") {
    spec.kind = FamilyKind::lazy_srw;
  } else if (head == "biased" || head == "biased_walk") {
    spec.kind = FamilyKind::biased_walk;
    if (!arg.empty()) spec.beta = parse_real(arg);
    if (!(spec.beta > 0.5 && spec.beta < 1.0)) throw InvalidInput("biased family needs beta in (1/2, 1)");
  } else if (head == "ehrenfest" || head == "ehrenfest_like") {
    spec.kind = FamilyKind::ehrenfest_like;
  } else if (head == "pure_birth") {
    spec.kind = FamilyKind::pure_birth;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) spec.thetas.push_back(parse_real(item));
    spec.n = spec.thetas.size();
  } else {
    throw InvalidInput("unknown family '" + head + "' (expected lazy_srw, biased:<beta>, ehrenfest, pure_birth:<thetas>)");
  }
  return spec;
}

TightnessReport tightness_family(double h_m, double t_R, std::size_t n, double perturb) {
  if (!std::isfinite(h_m) || !(h_m > 0.0)) throw InvalidInput("h_m must be positive");
  if (!std::isfinite(t_R) || !(t_R >= 2.0)) {
    throw InvalidInput("infeasible: t_R >= 2 is required so that lambda = 1 - 2/t_R is non-negative (t_R = " +
                       num(t_R) + ")");
  }
  if (n == 0) throw InvalidInput("n must be at least 1");
  if (!(perturb >= 0.0 && perturb < 0.5)) throw InvalidInput("perturb must lie in [0, 1/2)");
  const double nn = static_cast<double>(n);
  if (h_m > nn * t_R) {
    throw InvalidInput("infeasible: h_m <= n t_R is violated (" + num(h_m) + " > " + num(nn * t_R) + ")");
  }

  TightnessReport rep{Chain::create({0.0}, {0.0}, {1.0}), 0.0, 0, 0.0, 0.0, {}, 0.0, 0.0, 0.0, false};
  rep.K = h_m / (2.0 * t_R);
  rep.k_floor = static_cast<std::size_t>(std::floor(rep.K));
  rep.lambda = 1.0 - 2.0 / t_R;
  const std::size_t rest = n - rep.k_floor;
  const double k = static_cast<double>(rep.k_floor);
  const double mean_rest = (h_m / 2.0 - k * t_R / 2.0) / static_cast<double>(rest);
  rep.lambda_prime = 1.0 - 1.0 / mean_rest;
  if (rep.lambda_prime < 0.0) {
    throw InvalidInput("infeasible: lambda' = " + num(rep.lambda_prime) +
                       " < 0; need h_m >= 4(n - floor(K)) for integer K, exactly h_m >= 2(n - floor(K)) + "
                       "floor(K) t_R = " +
                       num(2.0 * static_cast<double>(rest) + k * t_R) + " (h_m = " + num(h_m) + ")");
  }
  rep.eigenvalues.assign(rep.k_floor, rep.lambda);
  rep.eigenvalues.insert(rep.eigenvalues.end(), rest, rep.lambda_prime);
  rep.variance_lower_bound = k * rep.lambda / ((1.0 - rep.lambda) * (1.0 - rep.lambda));

  const Chain base = realize_eigenvalues(rep.eigenvalues);
  std::vector<double> p(base.births().begin(), base.births().end());
  std::vector<double> q(base.deaths().begin(), base.deaths().end());
  std::vector<double> r(base.holds().begin(), base.holds().end());
  if (perturb > 0.0) {
    for (std::size_t i = 1; i <= n; ++i) {
      q[i] = perturb;
      if (r[i] >= perturb) {
        r[i] -= perturb;
      } else {
        const double from_hold = r[i];
        r[i] = 0.0;
        p[i] -= perturb - from_hold;
      }
    }
  }
  rep.chain = lazy_version(Chain::create(std::move(p), std::move(q), std::move(r)));
  rep.irreducible = rep.chain.irreducible();
  rep.expected_hitting = expected_hitting_time(rep.chain, 0, n);
  rep.t_rel = spectral_gap(rep.chain).t_rel;
  return rep;
}

}  // namespace bdmix
