#include "bdmix_cli/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "bdmix/chain.hpp"
#include "bdmix/chain_io.hpp"
#include "bdmix/config.hpp"
#include "bdmix/cutoff.hpp"
#include "bdmix/errors.hpp"
#include "bdmix/evolve.hpp"
#include "bdmix/families.hpp"
#include "bdmix/hitting.hpp"
#include "bdmix/montecarlo.hpp"
#include "bdmix/separation.hpp"
#include "bdmix/spectral.hpp"
#include "bdmix/transition_powers.hpp"
#include "report.hpp"

namespace bdmix::cli {
namespace {

#ifndef BDMIX_VERSION
#define BDMIX_VERSION "dev"
#endif

/// A file, or `fallback` when the path is empty or "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path.empty() ? "-" : path) {
    if (path_ == "-") {
      os_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path_, std::ios::binary);
      if (!*file_) throw InvalidInput("cannot write '" + path_ + "'");
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }
  void close() {
    os_->flush();
    if (!*os_) throw InvalidInput("write to '" + path_ + "' failed");
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

std::string label(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

struct Options {
  std::size_t workers = 0;
  std::size_t max_states = kDefaultMaxStates;
  std::string output = "-";
  std::string manifest_path;

  std::string chain_path;
  std::vector<double> eps;
  double eps_single = 0.05;
  std::size_t horizon = 0;
  bool linear_scan = false;

  double until = 1e-3;
  std::size_t max_time = 0;
  bool with_separation = false;
  bool with_pairwise = false;

  std::size_t start = 0;
  std::optional<std::size_t> target;
  double tail_tol = 1e-12;
  std::string pmf_csv;

  std::string family;
  std::vector<std::size_t> sizes;
  std::string summary_path;

  std::string realize_path;
  std::vector<std::string> tightness;

  std::string mode = "coupling";
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::size_t sim_horizon = 1000;
  double delta = 0.5;
  double commute_eps = 0.25;
  std::string histogram_path;
};

class Runner {
 public:
  Runner(Options& o, std::ostream& out, std::ostream& err) : o_(o), out_(out), err_(err) {}

  int validate();
  int spectrum();
  int profile();
  int mixing();
  int hitting();
  int separation();
  int family_scan();
  int construct();
  int verify();
  int simulate();

 private:
  Chain load_chain() {
    const std::string text = read_text_file(o_.chain_path);
    m_.input_digest = hex_digest(fnv1a(text));
    return parse_chain_json(text, o_.max_states);
  }

  void begin(const std::string& command) {
    m_.command = command;
    m_.version = BDMIX_VERSION;
    m_.tolerance = tolerance();
    m_.outputs.push_back(o_.output.empty() ? "-" : o_.output);
  }

  /// Primary JSON document, with the manifest attached.
  void emit_json(Json doc) {
    doc["manifest"] = m_.to_json();
    Sink sink(o_.output, out_);
    write_json(sink.stream(), doc);
    sink.close();
    write_manifest();
  }

  void write_manifest() {
    if (o_.manifest_path.empty()) return;
    Sink sink(o_.manifest_path, out_);
    write_json(sink.stream(), m_.to_json());
    sink.close();
  }

  State target_or_end(const Chain& c) const { return o_.target ? *o_.target : c.n(); }

  Options& o_;
  std::ostream& out_;
  std::ostream& err_;
  Manifest m_;
};

Json to_json(std::span<const double> v) { return Json(std::vector<double>(v.begin(), v.end())); }

Json chain_json(const Chain& c) {
  Json doc;
  doc["n"] = c.n();
  doc["p"] = to_json(c.births());
  doc["q"] = to_json(c.deaths());
  doc["r"] = to_json(c.holds());
  return doc;
}

int Runner::validate() {
  begin("validate");
  const Chain c = load_chain();
  const ChainFlags& f = c.flags();
  bool holds = false;
  for (double r : c.holds()) holds = holds || r > tolerance();
  Json doc;
  doc["n"] = c.n();
  doc["states"] = c.size();
  doc["irreducible"] = f.irreducible;
  // An irreducible birth-and-death chain is periodic exactly when it never holds.
  doc["aperiodic"] = f.irreducible && holds;
  doc["lazy"] = f.lazy;
  doc["delta_lazy"] = f.delta_lazy;
  doc["monotone"] = f.monotone;
  doc["absorbing_states"] = f.absorbing_states;
  emit_json(std::move(doc));
  return kOk;
}

int Runner::spectrum() {
  begin("spectrum");
  const Chain c = load_chain();
  const SpectrumReport s = eigenvalues(c);
  Json doc;
  doc["eigenvalues"] = s.eigenvalues;
  doc["gap"] = s.gap;
  doc["t_rel"] = s.t_rel;
  doc["lambda2"] = s.lambda2;
  doc["ergodic"] = s.ergodic;
  doc["warnings"] = s.warnings;
  emit_json(std::move(doc));
  return kOk;
}

int Runner::profile() {
  begin("profile");
  const Chain c = load_chain();
  ProfileOptions opts;
  opts.until = o_.until;
  opts.max_time = o_.max_time;
  opts.separation = o_.with_separation;
  opts.pairwise = o_.with_pairwise;
  const DistanceProfile p = distance_profile(c, opts);
  Sink sink(o_.output, out_);
  std::ostream& os = sink.stream();
  os << m_.csv_banner() << "\n";
  os << "t,d_tv";
  if (opts.separation) os << ",d_sep";
  if (opts.pairwise) os << ",d_bar";
  os << "\n";
  for (std::size_t i = 0; i < p.times.size(); ++i) {
    os << p.times[i] << "," << format_real(p.d_tv[i]);
    if (opts.separation) os << "," << format_real(p.d_sep[i]);
    if (opts.pairwise) os << "," << format_real(p.d_bar[i]);
    os << "\n";
  }
  sink.close();
  write_manifest();
  return kOk;
}

int Runner::mixing() {
  begin("mixing");
  const Chain c = load_chain();
  if (o_.eps.empty()) o_.eps = {0.25};
  MixingOptions opts;
  opts.horizon = o_.horizon;
  opts.linear_scan = o_.linear_scan;
  const std::vector<std::size_t> t = mixing_times(c, o_.eps, opts);
  Json doc;
  doc["eps"] = o_.eps;
  doc["t_mix"] = t;
  emit_json(std::move(doc));
  return kOk;
}

int Runner::hitting() {
  begin("hitting");
  const Chain c = load_chain();
  const State target = target_or_end(c);
  const HittingLaw law = hitting_pmf(c, o_.start, target, o_.tail_tol);
  if (!o_.pmf_csv.empty()) m_.outputs.push_back(o_.pmf_csv);

  Json doc;
  doc["start"] = o_.start;
  doc["target"] = target;
  doc["expectation"] = law.expectation;
  doc["variance"] = law.variance;
  doc["expectation_error"] = law.expectation_error;
  doc["variance_error"] = law.variance_error;
  doc["pmf_length"] = law.pmf.size();
  doc["tail"] = law.tail;
  // From 0 the law is a sum of geometrics with these failure probabilities.
  if (o_.start == 0 && target > 0) doc["thetas"] = submatrix_eigenvalues(c, target);
  doc["pmf_csv_path"] = o_.pmf_csv.empty() ? Json(nullptr) : Json(o_.pmf_csv);
  doc["diagnostics"] = law.diagnostics;

  if (!o_.pmf_csv.empty()) {
    Sink sink(o_.pmf_csv, out_);
    std::ostream& os = sink.stream();
    os << m_.csv_banner() << "\n" << "t,probability\n";
    for (std::size_t t = 0; t < law.pmf.size(); ++t) os << t << "," << format_real(law.pmf[t]) << "\n";
    sink.close();
  }
  emit_json(std::move(doc));
  return kOk;
}

int Runner::separation() {
  begin("separation");
  const Chain c = load_chain();
  const Distribution pi = stationary(c);
  const std::size_t budget = o_.max_time ? o_.max_time : default_horizon(c);
  TransitionPowers rows(c);
  Sink sink(o_.output, out_);
  std::ostream& os = sink.stream();
  os << m_.csv_banner() << "\n" << "t,d_sep,worst_x,worst_y\n";
  bool reached = false;
  for (;;) {
    const SeparationReport r = separation_report(rows, pi.weights());
    os << rows.time() << "," << format_real(r.worst) << "," << r.argmax_pair.first << "," << r.argmax_pair.second
       << "\n";
    if (r.worst <= o_.until) {
      reached = true;
      break;
    }
    if (rows.time() >= budget) break;
    rows.step();
  }
  sink.close();
  write_manifest();
  if (!reached) {
    err_ << "separation stayed above " << format_real(o_.until) << " through t = " << budget << "\n";
    return kHorizonExceeded;
  }
  return kOk;
}

int Runner::family_scan() {
  begin("family-scan");
  if (o_.eps.empty()) o_.eps = {0.1, 0.25};
  FamilySpec spec = parse_family(o_.family);
  std::string key = o_.family + "|";
  for (std::size_t n : o_.sizes) key += std::to_string(n) + ",";
  key += "|";
  for (double e : o_.eps) key += format_real(e) + ",";
  m_.input_digest = hex_digest(fnv1a(key));
  if (!o_.summary_path.empty()) m_.outputs.push_back(o_.summary_path);

  const FamilyReport rep = bdmix::family_scan(spec, o_.sizes, o_.eps);

  Sink sink(o_.output, out_);
  std::ostream& os = sink.stream();
  os << m_.csv_banner() << "\n";
  os << "n,ok,gap,t_rel,t_mix_quarter,product";
  for (double e : o_.eps) {
    const std::string l = label(e);
    os << ",t_mix_" << l << ",t_mix_complement_" << l << ",window_" << l << ",ratio_" << l << ",normalized_window_" << l;
  }
  os << "\n";
  bool all_ok = true;
  for (const FamilyRow& r : rep.rows) {
    os << r.n << "," << (r.ok ? 1 : 0);
    if (!r.ok) {
      all_ok = false;
      os << std::string(4 + 5 * o_.eps.size(), ',') << "\n";
      err_ << "n = " << r.n << ": " << r.error << "\n";
      continue;
    }
    os << "," << format_real(r.gap) << "," << format_real(r.t_rel) << "," << r.t_mix_quarter << ","
       << format_real(r.product);
    for (std::size_t k = 0; k < o_.eps.size(); ++k) {
      os << "," << r.t_mix[k] << "," << r.t_mix_complement[k] << "," << format_real(r.window[k]) << ","
         << format_real(r.ratio[k]) << "," << format_real(r.normalized_window[k]);
    }
    os << "\n";
  }
  sink.close();

  if (!o_.summary_path.empty()) {
    Json doc;
    doc["family"] = rep.family;
    doc["sizes"] = o_.sizes;
    doc["eps"] = rep.eps;
    Json trends = Json::array();
    for (const TrendSummary& t : rep.trends) {
      Json j;
      j["eps"] = t.eps;
      j["ratio_slope"] = t.ratio_slope;
      j["ratio_strictly_decreasing"] = t.ratio_strictly_decreasing;
      j["cutoff_trend"] = t.cutoff_trend;
      trends.push_back(std::move(j));
    }
    doc["trends"] = std::move(trends);
    doc["product_strictly_increasing"] = rep.product_strictly_increasing;
    doc["product_spread"] = rep.product_spread;
    Json failed = Json::array();
    for (const FamilyRow& r : rep.rows) {
      if (!r.ok) failed.push_back(Json{{"n", r.n}, {"error", r.error}});
    }
    doc["failed_rows"] = std::move(failed);
    doc["manifest"] = m_.to_json();
    Sink s(o_.summary_path, out_);
    write_json(s.stream(), doc);
    s.close();
  }
  write_manifest();
  return all_ok ? kOk : kHorizonExceeded;
}

double parse_number(const std::string& s, const char* what) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) {
    throw InvalidInput(std::string(what) + ": '" + s + "' is not a finite number");
  }
  return x;
}

int Runner::construct() {
  begin("construct");
  Json doc;
  if (!o_.realize_path.empty()) {
    const std::string text = read_text_file(o_.realize_path);
    m_.input_digest = hex_digest(fnv1a(text));
    const std::vector<double> thetas = parse_real_array_json(text);
    doc = chain_json(realize_eigenvalues(thetas));
  } else {
    if (o_.tightness.size() != 4) throw InvalidInput("--tightness takes h_m t_R n perturb");
    std::string key;
    for (const auto& t : o_.tightness) key += t + " ";
    m_.input_digest = hex_digest(fnv1a(key));
    const double h_m = parse_number(o_.tightness[0], "h_m");
    const double t_R = parse_number(o_.tightness[1], "t_R");
    const double n = parse_number(o_.tightness[2], "n");
    const double perturb = parse_number(o_.tightness[3], "perturb");
    if (!(n >= 1.0) || n != std::floor(n)) throw InvalidInput("n must be a positive integer");
    const TightnessReport rep = tightness_family(h_m, t_R, static_cast<std::size_t>(n), perturb);
    doc = chain_json(rep.chain);
    Json info;
    info["K"] = rep.K;
    info["k_floor"] = rep.k_floor;
    info["lambda"] = rep.lambda;
    info["lambda_prime"] = rep.lambda_prime;
    info["eigenvalues"] = rep.eigenvalues;
    info["expected_hitting"] = rep.expected_hitting;
    info["t_rel"] = rep.t_rel;
    info["variance_lower_bound"] = rep.variance_lower_bound;
    info["irreducible"] = rep.irreducible;
    doc["construction"] = std::move(info);
  }
  emit_json(std::move(doc));
  return kOk;
}

int Runner::verify() {
  begin("verify");
  const Chain c = load_chain();
  const LemmaSuiteReport suite = lemma_suite(c, o_.eps_single);
  const WindowVerdict w = window_bound_check(c, o_.eps_single);

  Json checks = Json::array();
  for (const LemmaCheck& k : suite.checks) {
    Json j;
    j["id"] = k.id;
    j["description"] = k.description;
    j["status"] = to_string(k.status);
    j["theorem_backed"] = k.theorem_backed;
    j["slack"] = k.slack;
    j["note"] = k.note;
    checks.push_back(std::move(j));
  }
  Json win;
  win["epsilon"] = w.epsilon;
  win["lhs"] = w.lhs;
  win["rhs"] = w.rhs;
  win["c1"] = w.c1;
  win["c2"] = w.c2;
  win["c_eps_used"] = w.c_eps_used;
  win["effective_regime"] = w.effective_regime;
  win["sharper_checked"] = w.sharper_checked;
  win["sharper_lhs"] = w.sharper_lhs;
  win["sharper_rhs"] = w.sharper_rhs;
  win["sharper_holds"] = w.sharper_holds;
  win["holds"] = w.holds;
  win["t_mix_eps"] = w.t_mix_eps;
  win["t_mix_complement"] = w.t_mix_complement;
  win["t_mix_quarter"] = w.t_mix_quarter;
  win["t_rel"] = w.t_rel;

  const bool violated = suite.theorem_violation() || !w.holds;
  Json doc;
  doc["eps"] = o_.eps_single;
  doc["checks"] = std::move(checks);
  doc["window"] = std::move(win);
  doc["theorem_violation"] = violated;
  emit_json(std::move(doc));
  if (violated) {
    err_ << "a theorem-backed check failed\n";
    return kTheoremViolated;
  }
  return kOk;
}

int Runner::simulate() {
  begin("simulate");
  m_.seed = o_.seed;
  const Chain c = load_chain();
  SimConfig cfg;
  cfg.trials = o_.trials;
  cfg.seed = o_.seed;
  cfg.horizon = o_.sim_horizon;
  if (!o_.histogram_path.empty()) m_.outputs.push_back(o_.histogram_path);

  Json doc;
  doc["mode"] = o_.mode;
  doc["trials"] = cfg.trials;
  doc["horizon"] = cfg.horizon;
  std::function<void(std::ostream&)> histogram;

  const auto coupling_json = [&](const CouplingStats& s) {
    double sum = 0.0;
    std::size_t done = 0, latest = 0;
    for (std::size_t t : s.coalescence) {
      if (t > cfg.horizon) continue;
      sum += static_cast<double>(t);
      ++done;
      latest = std::max(latest, t);
    }
    doc["censored"] = s.censored;
    doc["crossings"] = s.crossings;
    doc["mean_coalescence"] = done ? Json(sum / static_cast<double>(done)) : Json(nullptr);
    doc["max_coalescence"] = done ? Json(latest) : Json(nullptr);
    histogram = [s](std::ostream& os) {
      os << "t,survival,survival_se\n";
      for (std::size_t t = 0; t < s.survival.size(); ++t) {
        os << t << "," << format_real(s.survival[t]) << "," << format_real(s.survival_se[t]) << "\n";
      }
    };
  };

  if (o_.mode == "path") {
    const std::vector<State> path = sample_path(c, o_.start, cfg.horizon, cfg.seed);
    doc["start"] = o_.start;
    doc["final_state"] = path.back();
    histogram = [path](std::ostream& os) {
      os << "t,state\n";
      for (std::size_t t = 0; t < path.size(); ++t) os << t << "," << path[t] << "\n";
    };
  } else if (o_.mode == "coupling") {
    doc["start"] = o_.start;
    coupling_json(no_crossing_coupling(c, o_.start, cfg));
  } else if (o_.mode == "delta-coupling") {
    const DeltaCouplingStats s = delta_lazy_coupling(c, o_.delta, cfg, o_.start, o_.commute_eps);
    doc["start"] = o_.start;
    doc["delta"] = s.delta;
    coupling_json(s);
    doc["mean_multiplicity"] = s.mean_multiplicity;
    doc["multiplicity_se"] = s.multiplicity_se;
    doc["multiplicity_samples"] = s.multiplicity_samples;
    double trips = 0.0;
    for (std::size_t k : s.commute_trips) trips += static_cast<double>(k);
    doc["mean_commute_trips"] = s.commute_trips.empty() ? 0.0 : trips / static_cast<double>(s.commute_trips.size());
  } else if (o_.mode == "hitting") {
    const State target = target_or_end(c);
    const HittingSample s = empirical_hitting(c, o_.start, target, cfg);
    doc["start"] = o_.start;
    doc["target"] = target;
    doc["completed"] = s.completed;
    doc["censored"] = s.censored;
    doc["mean"] = s.mean;
    doc["variance"] = s.variance;
    doc["mean_se"] = s.mean_se;
    doc["variance_se"] = s.variance_se;
    histogram = [s](std::ostream& os) {
      os << "t,count\n";
      for (std::size_t t = 0; t < s.histogram.size(); ++t) os << t << "," << s.histogram[t] << "\n";
    };
  } else {
    throw InvalidInput("unknown mode '" + o_.mode + "' (expected path, coupling, delta-coupling, hitting)");
  }

  if (!o_.histogram_path.empty()) {
    Sink sink(o_.histogram_path, out_);
    sink.stream() << m_.csv_banner() << "\n";
    histogram(sink.stream());
    sink.close();
  }
  emit_json(std::move(doc));
  return kOk;
}

/// Reads BDMIX_TOLERANCE, if set.
std::optional<double> env_tolerance() {
  const char* v = std::getenv("BDMIX_TOLERANCE");
  if (!v || !*v) return std::nullopt;
  const double tol = parse_number(v, "BDMIX_TOLERANCE");
  if (!(tol > 0.0)) throw InvalidInput("BDMIX_TOLERANCE must be positive");
  return tol;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Exact computations on finite birth-and-death chains", "bdmix"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", BDMIX_VERSION);
  app.add_option("--workers", o.workers, "Worker threads; 0 uses every core");
  app.add_option("--max-states", o.max_states, "Refuse chains with more states than this");

  std::function<int(Runner&)> action;
  const auto sub = [&](const char* name, const char* help, int (Runner::*fn)()) {
    CLI::App* s = app.add_subcommand(name, help);
    s->fallthrough();
    s->callback([&action, fn] { action = [fn](Runner& r) { return (r.*fn)(); }; });
    s->add_option("-o,--output", o.output, "Primary output file ('-' for stdout)");
    s->add_option("--manifest", o.manifest_path, "Also write the run manifest here");
    return s;
  };
  const auto chain_opt = [&](CLI::App* s) {
    s->add_option("--chain", o.chain_path, "Chain JSON file")->required();
  };

  CLI::App* s = sub("validate", "Check a chain file and report its structural flags", &Runner::validate);
  chain_opt(s);

  s = sub("spectrum", "Eigenvalues, spectral gap and relaxation time (JSON)", &Runner::spectrum);
  chain_opt(s);

  s = sub("profile", "Distance to stationarity per step (CSV)", &Runner::profile);
  chain_opt(s);
  s->add_option("--until", o.until, "Stop once d(t) is at most this");
  s->add_option("--max-time", o.max_time, "Step budget; 0 picks 10^4 (n+1)");
  s->add_flag("--separation", o.with_separation, "Add the d_sep column");
  s->add_flag("--pairwise", o.with_pairwise, "Add the d_bar column");

  s = sub("mixing", "Mixing times t_mix(eps) (JSON)", &Runner::mixing);
  chain_opt(s);
  s->add_option("--eps", o.eps, "Levels, comma separated")->delimiter(',');
  s->add_option("--horizon", o.horizon, "Step budget; 0 picks 10^4 (n+1)");
  s->add_flag("--linear-scan", o.linear_scan, "Scan t = 0, 1, ... instead of doubling");

  s = sub("hitting", "Law of a hitting time (JSON, optional pmf CSV)", &Runner::hitting);
  chain_opt(s);
  s->add_option("--start", o.start, "Start state");
  s->add_option("--target", o.target, "Target state (default n)");
  s->add_option("--tol", o.tail_tol, "Stop once the surviving mass is below this");
  s->add_option("--pmf-csv", o.pmf_csv, "Write the pmf here");

  s = sub("separation", "Worst separation per step and where it is attained (CSV)", &Runner::separation);
  chain_opt(s);
  s->add_option("--until", o.until, "Stop once d_sep(t) is at most this");
  s->add_option("--max-time", o.max_time, "Step budget; 0 picks 10^4 (n+1)");

  s = sub("family-scan", "Mixing summary across sizes of a family (CSV, optional JSON summary)",
          &Runner::family_scan);
  s->add_option("--family", o.family, "lazy_srw, biased:<beta>, ehrenfest or pure_birth:<thetas>")->required();
  s->add_option("--sizes", o.sizes, "Values of n, comma separated")->delimiter(',')->required();
  s->add_option("--eps", o.eps, "Levels in (0, 1/2], comma separated")->delimiter(',');
  s->add_option("--summary", o.summary_path, "Write the trend summary JSON here");

  s = sub("construct", "Build a chain from a spectrum or from the tightness recipe (chain JSON)",
          &Runner::construct);
  auto* realize = s->add_option("--realize", o.realize_path, "JSON array of eigenvalues");
  auto* tight = s->add_option("--tightness", o.tightness, "h_m t_R n perturb")->expected(4);
  realize->excludes(tight);
  s->require_option(1);

  s = sub("verify", "Run the lemma checks and the window inequality (JSON)", &Runner::verify);
  chain_opt(s);
  s->add_option("--eps", o.eps_single, "Level in (0, 1/2)");

  s = sub("simulate", "Monte Carlo paths, couplings and hitting times (JSON, optional CSV)", &Runner::simulate);
  chain_opt(s);
  s->add_option("--mode", o.mode, "path, coupling, delta-coupling or hitting")
      ->check(CLI::IsMember({"path", "coupling", "delta-coupling", "hitting"}));
  s->add_option("--trials", o.trials, "Independent trials");
  s->add_option("--seed", o.seed, "Random seed");
  s->add_option("--horizon", o.sim_horizon, "Steps per trial");
  s->add_option("--start", o.start, "Start state");
  s->add_option("--target", o.target, "Target state for hitting mode (default n)");
  s->add_option("--delta", o.delta, "Laziness removed by the delta coupling");
  s->add_option("--commute-eps", o.commute_eps, "Quantile level of the commute endpoints");
  s->add_option("--histogram", o.histogram_path, "Write the per-step CSV here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << BDMIX_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto chosen = app.get_subcommands();
    err << (chosen.empty() ? app.help() : chosen.front()->help());
    return kInputError;
  }

  const std::size_t saved_workers = worker_count();
  try {
    std::optional<ScopedTolerance> tol;
    if (const auto t = env_tolerance()) tol.emplace(*t);
    set_worker_count(o.workers);
    Runner runner(o, out, err);
    const int code = action(runner);
    set_worker_count(saved_workers);
    return code;
  } catch (const HorizonExceeded& e) {
    set_worker_count(saved_workers);
    err << "horizon exceeded: " << e.what() << "\n";
    return kHorizonExceeded;
  } catch (const std::exception& e) {
    set_worker_count(saved_workers);
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace bdmix::cli
