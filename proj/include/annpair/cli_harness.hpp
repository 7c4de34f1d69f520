#pragma once

// Batch commands behind the annpair tool. Each command reads a RunConfig,
// writes JSON/CSV files under output_path and returns an exit code:
//   0 all hard checks passed, 1 a check failed, 2 bad configuration or inputs.
// Every file starts with (CSV) or carries (JSON) the config digest.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "annpair/bump.hpp"
#include "annpair/concentration.hpp"
#include "annpair/counterexample.hpp"
#include "annpair/global_assembly.hpp"
#include "annpair/json_io.hpp"
#include "annpair/lattice_counting.hpp"
#include "annpair/numeric.hpp"
#include "annpair/scale_search.hpp"
#include "annpair/set_predicates.hpp"

namespace annpair {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int check_failed = 1;
inline constexpr int config_error = 2;
}  // namespace exit_code

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  int n_lo = 2;
  int n_hi = 4;
  double target_c = 3.0;
  std::int64_t n_cap = std::int64_t{1} << 24;
  double grid_refinement = 1.0;
  double sigma = 0.2;
  int j_max = 24;
  int alpha_samples = 100;
  std::string output_path = "annpair_out";
  std::uint64_t seed = 1;
  std::string q_file;  // bm-audit input; defaults to <output>/Q_assembled.json
  Integrator integrator = Integrator::automatic;
  Placement placement = Placement::density_rule;
  int lambda_count = 4;
  double lambda_window = 4096.0;
};

/// "a..b" or a single "a".
[[nodiscard]] inline std::pair<int, int> parse_n_range(const std::string& s) {
  auto to_int = [&](const std::string& t) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad --n-range '" + s + "'");
    }
    if (used != t.size()) throw ConfigError("bad --n-range '" + s + "'");
    return v;
  };
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const int v = to_int(s);
    return {v, v};
  }
  return {to_int(s.substr(0, dots)), to_int(s.substr(dots + 2))};
}

inline void validate(const RunConfig& c) {
  if (c.n_lo < 2 || c.n_hi < c.n_lo || c.n_hi > 12) throw ConfigError("n range must satisfy 2 <= a <= b <= 12");
  if (!(c.target_c > 0.0) || !std::isfinite(c.target_c)) throw ConfigError("--target-c must be positive");
  if (c.n_cap < 1) throw ConfigError("--n-cap must be >= 1");
  if (!(c.grid_refinement >= 1.0) || c.grid_refinement > 64.0) throw ConfigError("--grid-refinement must lie in [1, 64]");
  if (!(c.sigma > 0.0 && c.sigma < 1.0)) throw ConfigError("--sigma must lie in (0, 1)");
  if (c.j_max < 0 || c.j_max > 40) throw ConfigError("--j-max must lie in 0..40");
  if (c.alpha_samples < 1 || c.alpha_samples > 1000000) throw ConfigError("--alpha-samples must lie in 1..1e6");
  if (c.lambda_count < 1) throw ConfigError("--lambda-count must be >= 1");
  if (!(c.lambda_window >= 1.0) || c.lambda_window > 1e7) throw ConfigError("--lambda-window must lie in [1, 1e7]");
  if (c.output_path.empty()) throw ConfigError("--output must not be empty");
}

/// Digest of everything that affects results; command and output path excluded,
/// so construct and verify runs with the same settings share a digest.
[[nodiscard]] inline std::string config_digest(const RunConfig& c) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "n=%d..%d;target_c=%.17g;n_cap=%lld;grid=%.17g;sigma=%.17g;j_max=%d;alphas=%d;seed=%llu;"
                "q=%s;integrator=%s;placement=%d;lambda=%d/%.17g",
                c.n_lo, c.n_hi, c.target_c, static_cast<long long>(c.n_cap), c.grid_refinement, c.sigma, c.j_max,
                c.alpha_samples, static_cast<unsigned long long>(c.seed), c.q_file.c_str(), to_string(c.integrator),
                static_cast<int>(c.placement), c.lambda_count, c.lambda_window);
  Fnv1a h;
  h.update(std::string_view(buf));
  return hex64(h.digest());
}

namespace detail {

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& digest, const std::string& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << "# config_digest: " << digest << '\n' << header << '\n';
  }
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << fmt(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string fmt(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
  }
  static std::string fmt(bool v) { return v ? "1" : "0"; }
  static std::string fmt(const std::string& v) { return v; }
  static std::string fmt(const char* v) { return v; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string fmt(I v) {
    return std::to_string(v);
  }
  std::ofstream out_;
};

inline std::filesystem::path out_dir(const RunConfig& c) {
  std::filesystem::path p(c.output_path);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory " + p.string() + ": " + ec.message());
  return p;
}

inline std::string level_file(const char* stem, int n) { return std::string(stem) + "_n" + std::to_string(n) + ".json"; }

inline json tagged(json j, const std::string& digest) {
  j["config_digest"] = digest;
  return j;
}

inline std::shared_ptr<const Bump> shared_bump() { return std::make_shared<const Bump>(build_bump()); }

inline std::vector<CounterexampleInstance> load_levels(const RunConfig& c, const std::shared_ptr<const Bump>& bump) {
  std::vector<CounterexampleInstance> levels;
  const std::filesystem::path dir(c.output_path);
  for (int n = c.n_lo; n <= c.n_hi; ++n) {
    const auto path = dir / level_file("instance", n);
    if (!std::filesystem::exists(path)) throw ConfigError("missing " + path.string() + " (run construct first)");
    try {
      levels.push_back(instance_from_json(read_json_file(path.string()).at("instance"), bump));
    } catch (const FormatError& e) {
      throw ConfigError(e.what());
    } catch (const json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  return levels;
}

/// 53 random bits in [0, 1); avoids distribution objects whose output varies by library.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

inline const Interval& common_gap() {
  static const Interval g(0.4, 0.6);
  return g;
}

}  // namespace detail

/// Builds levels n_lo..n_hi with choose_N and writes instance, S_n, Q_n and
/// assembled-set files.
inline int cmd_construct(const RunConfig& cfg, std::ostream& log) {
  const auto dir = detail::out_dir(cfg);
  const auto digest = config_digest(cfg);
  const auto bump = detail::shared_bump();
  ScaleSearchOptions so;
  so.target_c = cfg.target_c;
  so.n_cap = cfg.n_cap;
  so.concentration = {cfg.integrator, cfg.grid_refinement};

  std::vector<CounterexampleInstance> levels;
  detail::CsvFile scale(dir / "scale_search.csv", digest, "n,N,tail_bound,mass_off,total_mass,accepted");
  for (int n = cfg.n_lo; n <= cfg.n_hi; ++n) {
    ScaleSearchResult res;
    try {
      res = choose_N(n, bump, so);
    } catch (const ScaleSearchError& e) {
      log << "construct: level n = " << e.level() << " failed: " << e.what() << '\n';
      return exit_code::check_failed;
    }
    for (const auto& p : res.probes) scale.row(n, p.N, p.tail, p.off, p.total, p.accepted);
    auto inst = build_instance(res.params, bump);
    json j{{"instance", to_json(inst)},
           {"search",
            {{"target_ratio", res.target_ratio}, {"ratio", res.report.ratio}, {"probes", res.probes.size()}}}};
    write_json_file((dir / detail::level_file("instance", n)).string(), detail::tagged(j, digest));
    write_json_file((dir / detail::level_file("S", n)).string(), detail::tagged(to_json(inst.S_n), digest));
    write_json_file((dir / detail::level_file("Q", n)).string(), detail::tagged(to_json(inst.Q_n), digest));
    log << "construct: n = " << n << " d = " << res.params.d << " N = " << res.params.N << " L = " << res.params.L
        << " ratio = " << res.report.ratio << '\n';
    levels.push_back(std::move(inst));
  }
  const auto g = assemble_global(levels, cfg.placement);
  json offsets = json::array();
  for (const auto& p : g.placements) offsets.push_back({{"n", p.n}, {"N", p.N}, {"offset", p.offset}});
  auto qj = to_json(g.Q);
  qj["offsets"] = offsets;
  write_json_file((dir / "Q_assembled.json").string(), detail::tagged(qj, digest));
  write_json_file((dir / "S_assembled.json").string(), detail::tagged(to_json(g.S), digest));
  return exit_code::ok;
}

/// Concentration reports, gap checks, density profile and thinness for built levels.
inline int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  const auto dir = detail::out_dir(cfg);
  const auto digest = config_digest(cfg);
  const auto bump = detail::shared_bump();
  const auto levels = detail::load_levels(cfg, bump);
  int failures = 0;
  auto fail = [&](const std::string& what) {
    ++failures;
    log << "verify: FAIL " << what << '\n';
  };

  std::vector<ConcentrationReport> reports;
  double fitted_c = 0.0;
  for (const auto& inst : levels) {
    reports.push_back(concentration_ratio(inst.params, bump, {cfg.integrator, cfg.grid_refinement}));
    fitted_c = std::max(fitted_c, reports.back().ratio * inst.params.n);
  }
  {
    detail::CsvFile csv(dir / "concentration.csv", digest,
                        "n,d,N,L,total_mass,mass_on_Q,mass_off,tail_bound,ratio,fitted_C");
    for (const auto& r : reports) {
      csv.row(r.n, r.d, r.N, r.L, r.total_mass, r.mass_on_Q, r.mass_off_Q_in_window, r.tail_bound, r.ratio, fitted_c);
    }
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    if (r.mass_on_Q + r.mass_off_Q_in_window > r.total_mass * (1.0 + 1e-8)) {
      fail("mass split exceeds total at n = " + std::to_string(r.n));
    }
    if (r.ratio > cfg.target_c / r.n * (1.0 + 1e-9)) fail("ratio above target at n = " + std::to_string(r.n));
    if (i > 0 && !(r.ratio < reports[i - 1].ratio)) fail("ratio not decreasing at n = " + std::to_string(r.n));
  }
  log << "verify: fitted C = " << fitted_c << '\n';

  const auto g = assemble_global(levels, cfg.placement);
  {
    detail::CsvFile csv(dir / "gap_check.csv", digest, "level,pass");
    for (const auto& inst : levels) {
      const auto h = *inst.S_n.hull();
      const bool ok = periodic_gap_check(inst.S_n, detail::common_gap(), 1.0, Interval(h.lo() - 1.0, h.hi() + 1.0));
      csv.row(std::to_string(inst.params.n), ok);
      if (!ok) fail("gap check at n = " + std::to_string(inst.params.n));
    }
    const auto h = *g.S.hull();
    const bool ok = periodic_gap_check(g.S, detail::common_gap(), 1.0, Interval(h.lo() - 1.0, h.hi() + 1.0));
    csv.row(std::string("assembled"), ok);
    if (!ok) fail("gap check on assembled S");
  }
  {
    detail::CsvFile csv(dir / "density_profile.csv", digest, "n,radius,density,bound");
    for (const auto& p : g.placements) {
      csv.row(p.n, p.edge_radius, p.edge_density, p.density_bound);
      if (p.edge_density > p.density_bound) fail("density above bound at n = " + std::to_string(p.n));
    }
    if (g.placements.size() > 1 && !(g.placements.back().edge_density < g.placements.front().edge_density)) {
      fail("density profile final entry not below the first");
    }
  }
  {
    // Reported only: the density offset rule and ε-thinness pull in opposite directions.
    detail::CsvFile csv(dir / "thinness.csv", digest, "n,eps,worst_probe,worst_ratio,c_measured,pass");
    for (const auto& t : blockwise_thinness(g, cfg.target_c)) {
      csv.row(t.n, t.result.eps, t.result.worst_probe, t.result.worst_ratio, t.c_measured, t.result.pass);
      log << "verify: thinness n = " << t.n << (t.result.pass ? " pass" : " fail") << " (C measured "
          << t.c_measured << ")\n";
    }
  }
  log << "verify: " << (failures == 0 ? "all hard checks passed" : std::to_string(failures) + " hard check(s) failed")
      << '\n';
  return failures == 0 ? exit_code::ok : exit_code::check_failed;
}

/// Block certificates for sampled α, the averaged identity and E_r at doubling
/// radii, and a Λ assembly.
inline int cmd_bm_audit(const RunConfig& cfg, std::ostream& log) {
  const auto dir = detail::out_dir(cfg);
  const auto digest = config_digest(cfg);
  const std::string q_path = cfg.q_file.empty() ? (dir / "Q_assembled.json").string() : cfg.q_file;
  AnySet q;
  try {
    q = set_from_json(read_json_file(q_path));
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(q_path + ": " + e.what());
  }
  int failures = 0;

  std::mt19937_64 rng(cfg.seed);
  int tail_passes = 0;
  {
    detail::CsvFile certs(dir / "certificates.csv", digest, "alpha,j,count,threshold,pass");
    detail::CsvFile summary(dir / "bm_summary.csv", digest, "alpha,passed,largest_passing,tail_from,tail_pass");
    for (int i = 0; i < cfg.alpha_samples; ++i) {
      const double alpha = detail::unit_draw(rng);
      const auto audit = bm_hypothesis_audit(alpha, q, cfg.sigma, cfg.j_max);
      for (const auto& c : audit.certificates) certs.row(c.alpha, c.block_index, c.count, c.threshold, c.pass);
      summary.row(alpha, audit.passed, audit.largest_passing, audit.tail_from, audit.tail_pass);
      tail_passes += audit.tail_pass ? 1 : 0;
    }
  }
  log << "bm-audit: " << tail_passes << " of " << cfg.alpha_samples << " alphas pass every block in the tail range\n";

  {
    detail::CsvFile csv(dir / "identity.csv", digest, "r,lhs,rhs,diff,e_r_measure");
    for (int k = 0; k <= cfg.j_max; ++k) {
      const double r = std::ldexp(1.0, k);
      const auto profile = lattice_count_profile(q, r);
      CompensatedSum covered;
      q.for_each_in(Interval(0.0, r), [&](double lo, double hi) { covered += hi - lo; });
      const double lhs = profile.integral();
      const double rhs = (r - covered.value()) / r;
      const double e_r = profile.superlevel(1.0 - cfg.sigma / 4.0).measure();
      csv.row(r, lhs, rhs, lhs - rhs, e_r);
      if (!(std::abs(lhs - rhs) <= 1e-12)) {
        ++failures;
        log << "bm-audit: FAIL averaged identity at r = " << r << '\n';
      }
    }
  }

  try {
    const auto lam = assemble_lambda(q, cfg.sigma, cfg.lambda_count, Interval(0.0, cfg.lambda_window), cfg.j_max);
    json counts = json::array();
    for (const auto& g : lam.per_alpha) counts.push_back(g.size());
    json j{{"alphas", lam.alphas},
           {"skipped", lam.skipped},
           {"window", json::array({lam.window.lo(), lam.window.hi()})},
           {"j_max", lam.j_max},
           {"tail_from", lam.tail_from},
           {"points_per_alpha", counts},
           {"lambda", lam.lambda}};
    write_json_file((dir / "lambda.json").string(), detail::tagged(j, digest));
    log << "bm-audit: lambda has " << lam.lambda.size() << " points from " << lam.alphas.size() << " alphas ("
        << lam.skipped.size() << " skipped)\n";
  } catch (const InsufficientAlphas& e) {
    ++failures;
    log << "bm-audit: FAIL " << e.what() << '\n';
  }
  return failures == 0 ? exit_code::ok : exit_code::check_failed;
}

/// Plot-ready CSV: bump transform with its envelope, Fejér profile and f
/// samples per level.
inline int cmd_export(const RunConfig& cfg, std::ostream& log) {
  const auto dir = detail::out_dir(cfg);
  const auto digest = config_digest(cfg);
  const auto bump = detail::shared_bump();
  const auto levels = detail::load_levels(cfg, bump);
  {
    detail::CsvFile csv(dir / "bump_hat.csv", digest, "xi,hat,envelope");
    for (int i = 0; i <= static_cast<int>(bump->table_limit() * 8.0); ++i) {
      const double xi = i / 8.0;
      csv.row(xi, bump->hat(xi).value, bump->envelope(xi));
    }
  }
  for (const auto& inst : levels) {
    const int n = inst.params.n;
    {
      detail::CsvFile csv(dir / ("fejer_n" + std::to_string(n) + ".csv"), digest, "u,P,bound,in_I");
      const auto& base = inst.f.poly().base();
      for (int i = 0; i < 1024; ++i) {
        const double u = i / 1024.0;
        csv.row(u, base.eval_phase(u), 1.0 / n, std::abs(u - 0.5) <= 1.0 / n);
      }
    }
    detail::CsvFile csv(dir / ("f_samples_n" + std::to_string(n) + ".csv"), digest, "t,f,f_sq,in_Q,bound_only");
    const double N = static_cast<double>(inst.params.N);
    // Four periods around 0 at 64 samples each, then a coarse sweep out to N.
    for (int i = -128; i < 128; ++i) {
      const double t = i / (64.0 * N);
      const auto v = inst.f.eval(t);
      csv.row(t, v.value, v.value * v.value, inst.Q_n.contains(t), v.bound_only);
    }
    for (int i = 0; i <= 512; ++i) {
      const double t = (i + 0.5) / (512.0) * N;
      const auto v = inst.f.eval(t);
      csv.row(t, v.value, v.value * v.value, inst.Q_n.contains(t), v.bound_only);
    }
  }
  log << "export: wrote " << levels.size() << " level(s) to " << dir.string() << '\n';
  return exit_code::ok;
}

/// Dispatches on cfg.command; configuration problems map to exit code 2.
inline int run(const RunConfig& cfg, std::ostream& log) {
  try {
    validate(cfg);
    if (cfg.command == "construct") return cmd_construct(cfg, log);
    if (cfg.command == "verify") return cmd_verify(cfg, log);
    if (cfg.command == "bm-audit") return cmd_bm_audit(cfg, log);
    if (cfg.command == "export") return cmd_export(cfg, log);
    throw ConfigError("unknown command '" + cfg.command + "'");
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return exit_code::config_error;
  }
}

}  // namespace annpair
