// rsh: property checks, trajectory export and single bracket evaluation.
//
// Exit codes: 0 all checks pass, 1 some check fails, 2 configuration error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rsh/harness.hpp"

namespace {

using namespace rsh;
using harness::config_error;

Part parse_part(const std::string& s) {
  if (s == "re") return Part::re;
  if (s == "im") return Part::im;
  throw config_error("part must be 're' or 'im', got '" + s + "'");
}

// "m,k,part", e.g. "2,1,re"
ObservableSet parse_observable(const std::string& spec) {
  std::stringstream ss(spec);
  std::string m, k, part;
  if (!std::getline(ss, m, ',') || !std::getline(ss, k, ',') || !std::getline(ss, part, ',') ||
      !ss.eof())
    throw config_error("observable must be m,k,part: '" + spec + "'");
  int mi = 0, ki = 0;
  try {
    std::size_t pm = 0, pk = 0;
    mi = std::stoi(m, &pm);
    ki = std::stoi(k, &pk);
    if (pm != m.size() || pk != k.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw config_error("observable exponents must be integers: '" + spec + "'");
  }
  if (mi < 0 || ki < 0 || (mi == 0 && ki == 0))
    throw config_error("observable exponents must be >= 0 and not both zero: '" + spec + "'");
  return invariant_observable(mi, ki, parse_part(part));
}

ChartKind parse_chart(const std::string& s) {
  if (s == "full") return ChartKind::full;
  if (s == "red") return ChartKind::red;
  if (s == "rs") return ChartKind::rs;
  if (s == "suth") return ChartKind::suth;
  throw config_error("unknown chart '" + s + "'");
}

double evaluate_bracket(ChartKind chart, int which, const ObservableSet& F,
                        const ObservableSet& H, int n, std::uint64_t seed) {
  switch (chart) {
    case ChartKind::full: {
      const auto x = sample_point<FullPoint>(n, seed);
      return which == 1 ? pb1_full(F.full, H.full, x) : pb2_full(F.full, H.full, x);
    }
    case ChartKind::red: {
      const auto x = sample_point<RedPoint>(n, seed);
      return which == 1 ? pb1_red(F.red, H.red, x) : pb2_red(F.red, H.red, x);
    }
    case ChartKind::rs: {
      if (which != 2) throw config_error("the rs chart carries only bracket 2");
      const auto x = sample_point<RSPoint>(n, seed);
      return pb_rs(F.rs, H.rs, x);
    }
    case ChartKind::suth: {
      if (which != 1) throw config_error("the suth chart carries only bracket 1");
      const auto x = sample_point<SuthPoint>(n, seed);
      return pb_suth(F.suth, H.suth, x);
    }
  }
  throw config_error("unknown chart");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rsh: Poisson bracket hierarchy checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rsh::version));

  std::string suite = "all", profile, out;
  int n = 3, seeds = 5;
  unsigned threads = 0;
  double min_gap = harness::check_min_gap;
  std::uint64_t base_seed = 0;
  auto* check = app.add_subcommand("check", "run property checks and write a JSON report");
  check->add_option("--suite", suite, "all|theorem1|theorem2|prop3|prop4|flows")->capture_default_str();
  check->add_option("--n", n, "matrix size")->capture_default_str();
  check->add_option("--seeds", seeds, "seeds per check")->capture_default_str();
  check->add_option("--profile", profile, "strict|default|nested (overrides per-check tolerances)");
  check->add_option("--base-seed", base_seed, "first seed")->capture_default_str();
  check->add_option("--threads", threads, "worker threads, 0 = hardware")->capture_default_str();
  check->add_option("--min-gap", min_gap, "minimum phase separation of sampled points")
      ->capture_default_str();
  check->add_option("--out", out, "JSON report path")->required();

  int fk = 1, fn = 3, steps = 100;
  double t0 = 0.0, t1 = 1.0;
  std::uint64_t fseed = 0;
  std::string fout;
  auto* flow = app.add_subcommand("flow", "export a reduced trajectory as CSV");
  flow->add_option("--n", fn, "matrix size")->capture_default_str();
  flow->add_option("--k", fk, "flow index")->capture_default_str();
  flow->add_option("--t0", t0)->capture_default_str();
  flow->add_option("--t1", t1)->capture_default_str();
  flow->add_option("--steps", steps, "grid intervals")->capture_default_str();
  flow->add_option("--seed", fseed)->capture_default_str();
  flow->add_option("--out", fout, "CSV path")->required();

  std::string chart = "full", fspec, hspec;
  int which = 1, bn = 3;
  std::uint64_t bseed = 0;
  auto* br = app.add_subcommand("bracket", "evaluate one bracket at a seeded point");
  br->set_help_flag("--help", "Print this help message and exit");
  br->add_option("--chart", chart, "full|red|rs|suth")->capture_default_str();
  br->add_option("--which", which, "1|2")->capture_default_str();
  br->add_option("--f", fspec, "m,k,part")->required();
  br->add_option("--h", hspec, "m,k,part")->required();
  br->add_option("--n", bn, "matrix size")->capture_default_str();
  br->add_option("--seed", bseed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) {
      harness::RunOptions opts;
      opts.threads = threads;
      if (!(min_gap > 0.0) || !(min_gap < 2.0)) throw config_error("--min-gap must lie in (0, 2)");
      opts.sampling.min_gap = min_gap;
      opts.profile_override = harness::resolve_profile(
          profile.empty() ? std::nullopt : std::optional<std::string>(profile),
          std::getenv("RS_HIERARCHY_PROFILE"));
      const auto specs = harness::make_specs(suite, n, seeds, base_seed);
      const auto report = harness::run_checks(specs, opts);
      std::ofstream os(out, std::ios::binary);
      if (!os) throw config_error("cannot open " + out);
      harness::write_json(os, harness::to_json(report));
      for (const auto& r : report.results)
        std::printf("%-18s %s  max_rel=%.3e  tol=%.0e\n", r.id.c_str(), r.pass ? "PASS" : "FAIL",
                    r.max_rel_defect, r.tolerance);
      return report.all_pass() ? 0 : 1;
    }
    if (*flow) {
      if (fn < 2) throw config_error("n must be >= 2");
      if (fk < 1) throw config_error("k must be >= 1");
      const auto grid = harness::linspace(t0, t1, steps);
      const auto x0 = sample_point<FullPoint>(fn, fseed);
      std::ofstream os(fout, std::ios::binary);
      if (!os) throw config_error("cannot open " + fout);
      try {
        const auto tr = harness::export_trajectory(x0, fk, grid, os);
        for (const auto& w : tr.warnings) std::cerr << "warning: " << w << "\n";
      } catch (const trajectory_error& e) {
        std::cerr << e.what() << "\n";
        return 1;
      }
      return 0;
    }
    if (*br) {
      if (which != 1 && which != 2) throw config_error("--which must be 1 or 2");
      if (bn < 2) throw config_error("n must be >= 2");
      const double v = evaluate_bracket(parse_chart(chart), which, parse_observable(fspec),
                                        parse_observable(hspec), bn, bseed);
      std::printf("%s\n", harness::format_double(v).c_str());
      return 0;
    }
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
