#pragma once

// Check registry, concurrent runner, JSON report and CSV trajectory export.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"
#include "rsh/brackets.hpp"
#include "rsh/dynamics.hpp"
#include "rsh/observables.hpp"
#include "rsh/oracles.hpp"
#include "rsh/sampling.hpp"

namespace rsh::harness {

// strict: analytic-derivative paths; standard ("default"): first-order FD
// paths; nested: Jacobi paths.
enum class Profile { strict, standard, nested };

inline std::string_view profile_name(Profile p) {
  switch (p) {
    case Profile::strict: return "strict";
    case Profile::standard: return "default";
    case Profile::nested: return "nested";
  }
  return "?";
}

inline std::optional<Profile> parse_profile(std::string_view s) {
  if (s == "strict") return Profile::strict;
  if (s == "default") return Profile::standard;
  if (s == "nested") return Profile::nested;
  return std::nullopt;
}

inline double profile_tolerance(Profile p) {
  switch (p) {
    case Profile::strict: return 1e-10;
    case Profile::standard: return 1e-6;
    case Profile::nested: return 1e-4;
  }
  return 0.0;
}

class config_error : public error {
 public:
  using error::error;
};

struct CheckSpec {
  std::string id;
  ChartKind chart = ChartKind::full;
  int n = 3;
  int seeds = 1;
  std::uint64_t base_seed = 0;
  int max_m = 3;
  int max_k = 3;
};

struct Defect {
  double abs = 0.0;
  double rel = 0.0;

  void merge(const Defect& o) {
    abs = std::max(abs, o.abs);
    rel = std::max(rel, o.rel);
  }

  static Defect of(double diff, double scale) {
    const double a = std::abs(diff);
    return {a, a / scale};
  }
};

struct CheckResult {
  std::string id;
  std::string description;
  ChartKind chart = ChartKind::full;
  int n = 0;
  int seeds_run = 0;
  std::vector<std::uint64_t> seeds;
  double max_abs_defect = 0.0;
  double max_rel_defect = 0.0;
  Profile profile = Profile::standard;
  double tolerance = 0.0;
  bool pass = false;
  double wall_time_s = 0.0;
  std::vector<std::string> failures;
};

// Check points keep their phases at least this far apart (chordal distance);
// defects of the FD and chart-transition paths grow like powers of 1/gap.
inline constexpr double check_min_gap = 0.1;

struct RunOptions {
  std::optional<Profile> profile_override;
  unsigned threads = 0;  // 0: hardware concurrency
  Config config{};
  SampleOptions sampling{check_min_gap};
};

struct CheckReport {
  std::vector<CheckResult> results;
  RunOptions options;

  bool all_pass() const {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass; });
  }
};

struct CheckContext {
  const CheckSpec& spec;
  std::uint64_t seed;
  const RunOptions& options;
};

using CheckFn = std::function<Defect(const CheckContext&)>;

struct CheckDef {
  std::string id;
  std::string suite;
  ChartKind chart;
  Profile profile;
  double tolerance;  // acceptance tolerance on the relative defect
  std::string description;
  CheckFn run;
};

// ---------------------------------------------------------------------------
// Shared helpers for check bodies

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::mt19937_64 check_rng(const CheckContext& c) {
  const std::uint64_t h = fnv1a(c.spec.id);
  std::seed_seq seq{std::uint32_t(h), std::uint32_t(h >> 32), std::uint32_t(c.seed),
                    std::uint32_t(c.seed >> 32), std::uint32_t(c.spec.n)};
  return std::mt19937_64(seq);
}

struct Member {
  int m;
  int k;
  Part part;
};

// Re/Im tr(g^m L^k) with m <= max_m, k <= max_k; Im tr(L^k) is identically
// zero and is left out.
inline std::vector<Member> family(int max_m, int max_k) {
  std::vector<Member> out;
  for (int m = 0; m <= max_m; ++m)
    for (int k = 0; k <= max_k; ++k) {
      if (m == 0 && k == 0) continue;
      out.push_back({m, k, Part::re});
      if (m > 0) out.push_back({m, k, Part::im});
    }
  return out;
}

inline ObservableSet pick(std::mt19937_64& rng, const CheckContext& c) {
  const auto fam = family(c.spec.max_m, c.spec.max_k);
  std::uniform_int_distribution<std::size_t> u(0, fam.size() - 1);
  const Member& mb = fam[u(rng)];
  return invariant_observable(mb.m, mb.k, mb.part, c.options.config);
}

template <class Point>
Point sample(const CheckContext& c) {
  return sample_point<Point>(c.spec.n, c.seed, c.options.sampling);
}

inline const DiffOptions fd_only{false};
inline const DiffOptions analytic{true};

template <class Point>
using Member_of = Observable<Point> ObservableSet::*;

// Antisymmetry and Leibniz rule for each bracket on one chart.
template <class Point>
Defect bracket_axioms(const CheckContext& c, const std::vector<BracketFn<Point>>& brackets,
                      Member_of<Point> chart, const DiffOptions& opts) {
  auto rng = check_rng(c);
  const Point x = sample<Point>(c);
  const auto F = pick(rng, c).*chart;
  const auto G = pick(rng, c).*chart;
  const auto H = pick(rng, c).*chart;
  const auto GH = product(G, H);
  const auto gF = gradient(F, x, opts);
  const auto gG = gradient(G, x, opts);
  const auto gH = gradient(H, x, opts);
  const auto gGH = gradient(GH, x, opts);
  const double g = G(x);
  const double h = H(x);
  Defect d;
  for (const auto& b : brackets) {
    const BracketTerms fh = b(x, gF, gH);
    const BracketTerms hf = b(x, gH, gF);
    d.merge(Defect::of(fh.value() + hf.value(), 1.0 + fh.magnitude() + hf.magnitude()));
    const BracketTerms fgh = b(x, gF, gGH);
    const BracketTerms fg = b(x, gF, gG);
    d.merge(Defect::of(fgh.value() - g * fh.value() - h * fg.value(),
                       1.0 + fgh.magnitude() + std::abs(g) * fh.magnitude() +
                           std::abs(h) * fg.magnitude()));
  }
  return d;
}

template <class Point>
Defect jacobi_check(const CheckContext& c, const std::vector<BracketFn<Point>>& brackets,
                    Member_of<Point> chart) {
  auto rng = check_rng(c);
  const Point x = sample<Point>(c);
  const auto F = pick(rng, c).*chart;
  const auto G = pick(rng, c).*chart;
  const auto H = pick(rng, c).*chart;
  JacobiOptions opts;
  opts.inner = fd_only;
  Defect d;
  for (const auto& b : brackets) {
    const JacobiResult r = jacobi(b, F, G, H, x, opts);
    d.merge(Defect::of(r.defect, r.scale));
  }
  return d;
}

// |{F,H_k}_2 - {F,H_{k+1}}_1|, k = 1..4, gradient of F by finite differences.
template <class Point>
Defect ladder_check(const CheckContext& c, const BracketFn<Point>& b1, const BracketFn<Point>& b2,
                    Member_of<Point> chart) {
  auto rng = check_rng(c);
  const Point x = sample<Point>(c);
  const auto F = pick(rng, c).*chart;
  const auto gF = gradient(F, x, fd_only);
  Defect d;
  for (int k = 1; k <= 4; ++k) {
    const auto gHk = gradient(free_hamiltonian(k).*chart, x, analytic);
    const auto gHk1 = gradient(free_hamiltonian(k + 1).*chart, x, analytic);
    const BracketTerms t2 = b2(x, gF, gHk);
    const BracketTerms t1 = b1(x, gF, gHk1);
    d.merge(Defect::of(t2.value() - t1.value(), 1.0 + t2.magnitude() + t1.magnitude()));
  }
  return d;
}

template <class Point>
Defect involution_check(const CheckContext& c, const std::vector<BracketFn<Point>>& brackets,
                        Member_of<Point> chart) {
  const Point x = sample<Point>(c);
  Defect d;
  for (int k = 1; k <= 5; ++k)
    for (int l = 1; l <= 5; ++l) {
      const auto gk = gradient(free_hamiltonian(k).*chart, x, analytic);
      const auto gl = gradient(free_hamiltonian(l).*chart, x, analytic);
      for (const auto& b : brackets) {
        const BracketTerms t = b(x, gk, gl);
        d.merge(Defect::of(t.value(), 1.0 + t.magnitude()));
      }
    }
  return d;
}

inline Defect compare(const BracketTerms& a, const BracketTerms& b) {
  return Defect::of(a.value() - b.value(), 1.0 + std::max(a.magnitude(), b.magnitude()));
}

inline constexpr int pairs_per_seed = 3;

// ---------------------------------------------------------------------------
// Individual checks

inline Defect theorem2_consistency(const CheckContext& c, bool second) {
  auto rng = check_rng(c);
  const RedPoint x = sample<RedPoint>(c);
  const FullPoint xf = x.as_full();
  Defect d;
  for (int i = 0; i < pairs_per_seed; ++i) {
    const ObservableSet F = pick(rng, c);
    const ObservableSet H = pick(rng, c);
    const RedGradient gf = gradient(F.red, x, fd_only);
    const RedGradient gh = gradient(H.red, x, fd_only);
    const FullGradient gF = gradient(F.full, xf, fd_only);
    const FullGradient gH = gradient(H.full, xf, fd_only);
    const BracketTerms red = second ? pb2_red_terms(x, gf, gh, c.options.config)
                                    : pb1_red_terms(x, gf, gh, c.options.config);
    const BracketTerms full = second ? pb2_full_terms(xf, gF, gH) : pb1_full_terms(xf, gF, gH);
    d.merge(compare(red, full));
  }
  return d;
}

inline Defect prop3(const CheckContext& c) {
  auto rng = check_rng(c);
  const RSPoint x = sample<RSPoint>(c);
  const RedPoint y = from_rs(x, c.options.config);
  Defect d;
  for (int i = 0; i < pairs_per_seed; ++i) {
    const ObservableSet F = pick(rng, c);
    const ObservableSet H = pick(rng, c);
    const BracketTerms rs =
        pb_rs_terms(x, gradient(F.rs, x, fd_only), gradient(H.rs, x, fd_only));
    const BracketTerms red = pb2_red_terms(y, gradient(F.red, y, fd_only),
                                           gradient(H.red, y, fd_only), c.options.config);
    d.merge(compare(rs, red));
  }
  return d;
}

inline Defect prop4(const CheckContext& c) {
  auto rng = check_rng(c);
  const SuthPoint x = sample<SuthPoint>(c);
  const RedPoint y = from_suth(x, c.options.config);
  Defect d;
  for (int i = 0; i < pairs_per_seed; ++i) {
    const ObservableSet F = pick(rng, c);
    const ObservableSet H = pick(rng, c);
    const BracketTerms su =
        pb_suth_terms(x, gradient(F.suth, x, fd_only), gradient(H.suth, x, fd_only));
    const BracketTerms red = pb1_red_terms(y, gradient(F.red, y, fd_only),
                                           gradient(H.red, y, fd_only), c.options.config);
    d.merge(compare(su, red));
  }
  return d;
}

inline Defect rs_round_trip(const CheckContext& c) {
  const Config& cfg = c.options.config;
  const RSPoint x = sample<RSPoint>(c);
  const RedPoint y = from_rs(x, cfg);
  const RSPoint x2 = to_rs(y, cfg);
  Defect d;
  d.merge(Defect::of((x2.p - x.p).norm() + (x2.lambda.matrix() - x.lambda.matrix()).norm(),
                     1.0 + x.p.norm() + x.lambda.matrix().norm()));
  const RedPoint y2 = from_rs(x2, cfg);
  d.merge(Defect::of((y2.L.matrix() - y.L.matrix()).norm(), 1.0 + y.L.matrix().norm()));
  return d;
}

inline Defect bplus_residual_check(const CheckContext& c) {
  const RSPoint x = sample<RSPoint>(c);
  const UnipotentUpper b = solve_bplus(x.Q, x.lambda, c.options.config);
  return Defect::of(bplus_residual(x.Q, x.lambda, b), b.matrix().norm());
}

inline Defect suth_round_trip(const CheckContext& c) {
  const Config& cfg = c.options.config;
  const SuthPoint x = sample<SuthPoint>(c);
  const SuthPoint x2 = to_suth(from_suth(x, cfg), cfg);
  Defect d;
  d.merge(Defect::of((x2.p - x.p).norm() + (x2.phi - x.phi).norm(),
                     1.0 + x.p.norm() + x.phi.norm()));
  const RedPoint y = sample<RedPoint>(c);
  const RedPoint y2 = from_suth(to_suth(y, cfg), cfg);
  d.merge(Defect::of((y2.L.matrix() - y.L.matrix()).norm(), 1.0 + y.L.matrix().norm()));
  return d;
}

inline Defect h_rs_identity(const CheckContext& c) {
  const RSPoint x = sample<RSPoint>(c);
  const double tr = from_rs(x, c.options.config).L.matrix().trace().real();
  return Defect::of(h_rs(x, c.options.config) - tr, std::abs(tr));
}

inline Defect h_suth_identity(const CheckContext& c) {
  const SuthPoint x = sample<SuthPoint>(c);
  const double half_tr_sq = 0.5 * from_suth(x, c.options.config).L.matrix().squaredNorm();
  return Defect::of(h_suth2(x, c.options.config) - half_tr_sq, half_tr_sq);
}

// Exact flow against RK4 (1000 steps on [0,1]) at ten checkpoints, k = 1, 2.
inline Defect flow_vs_rk4(const CheckContext& c) {
  const FullPoint x0 = sample<FullPoint>(c);
  Defect d;
  for (int k = 1; k <= 2; ++k) {
    Mat g = x0.g.matrix();
    for (int s = 1; s <= 10; ++s) {
      g = oracle::rk4_flow(g, x0.L.matrix(), k, 0.1, 100);
      const FullPoint exact = flow(x0, k, 0.1 * s);
      const double diff = (g - exact.g.matrix()).norm();
      d.merge({diff, diff});
    }
  }
  return d;
}

inline Defect conserved_drift(const CheckContext& c) {
  const FullPoint x0 = sample<FullPoint>(c);
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(i / 40.0);
  Defect d;
  for (int k = 1; k <= 3; ++k) {
    const Trajectory tr = trajectory(x0, k, grid, 0, c.options.config);
    const auto& h0 = tr.samples.front().conserved;
    for (const auto& s : tr.samples)
      for (std::size_t l = 0; l < h0.size(); ++l) {
        const double diff = s.conserved[l] - h0[l];
        d.merge(h0[l] == 0.0 ? Defect{std::abs(diff), diff == 0.0 ? 0.0 : HUGE_VAL}
                             : Defect::of(diff, std::abs(h0[l])));
      }
  }
  return d;
}

inline Defect flow_group(const CheckContext& c) {
  auto rng = check_rng(c);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const FullPoint x0 = sample<FullPoint>(c);
  Defect d;
  for (int k = 1; k <= 3; ++k) {
    const double t1 = u(rng);
    const double t2 = u(rng);
    const double diff =
        (flow(x0, k, t1 + t2).g.matrix() - flow(flow(x0, k, t1), k, t2).g.matrix()).norm();
    d.merge({diff, diff});
  }
  return d;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Registry

inline const std::vector<CheckDef>& registry() {
  using namespace detail;
  static const std::vector<CheckDef> defs = [] {
    std::vector<CheckDef> v;
    const std::vector<BracketFn<FullPoint>> full12{bracket1_full, bracket2_full};
    const std::vector<BracketFn<RedPoint>> red12{bracket1_red, bracket2_red};
    const std::vector<BracketFn<SuthPoint>> suth{bracket_suth};
    const std::vector<BracketFn<FullPoint>> pencils{pencil(-1.0), pencil(0.5), pencil(1.0)};

    v.push_back({"A1.full", "theorem1", ChartKind::full, Profile::standard, 1e-6,
                 "antisymmetry and Leibniz, pb1_full/pb2_full, FD gradients",
                 [=](const CheckContext& c) { return bracket_axioms(c, full12, &ObservableSet::full, fd_only); }});
    v.push_back({"A1.full.analytic", "theorem1", ChartKind::full, Profile::strict, 1e-10,
                 "antisymmetry and Leibniz, pb1_full/pb2_full, analytic gradients",
                 [=](const CheckContext& c) { return bracket_axioms(c, full12, &ObservableSet::full, analytic); }});
    v.push_back({"A2.pb1", "theorem1", ChartKind::full, Profile::nested, 1e-4,
                 "Jacobi identity, pb1_full",
                 [](const CheckContext& c) { return jacobi_check<FullPoint>(c, {bracket1_full}, &ObservableSet::full); }});
    v.push_back({"A2.pb2", "theorem1", ChartKind::full, Profile::nested, 1e-4,
                 "Jacobi identity, pb2_full",
                 [](const CheckContext& c) { return jacobi_check<FullPoint>(c, {bracket2_full}, &ObservableSet::full); }});
    v.push_back({"A2.pencil", "theorem1", ChartKind::full, Profile::nested, 1e-4,
                 "Jacobi identity, pb1_full + s pb2_full, s in {-1, 0.5, 1}",
                 [=](const CheckContext& c) { return jacobi_check(c, pencils, &ObservableSet::full); }});
    v.push_back({"A3.full", "theorem1", ChartKind::full, Profile::standard, 1e-8,
                 "{F,H_k}_2 = {F,H_k+1}_1, k = 1..4, full chart",
                 [](const CheckContext& c) { return ladder_check(c, bracket1_full, bracket2_full, &ObservableSet::full); }});
    v.push_back({"A4.full", "theorem1", ChartKind::full, Profile::strict, 1e-10,
                 "{H_k,H_l}_1 = {H_k,H_l}_2 = 0, k,l <= 5, full chart",
                 [=](const CheckContext& c) { return involution_check(c, full12, &ObservableSet::full); }});

    v.push_back({"A1.red", "theorem2", ChartKind::red, Profile::standard, 1e-6,
                 "antisymmetry and Leibniz, pb1_red/pb2_red, FD gradients",
                 [=](const CheckContext& c) { return bracket_axioms(c, red12, &ObservableSet::red, fd_only); }});
    v.push_back({"A1.red.analytic", "theorem2", ChartKind::red, Profile::strict, 1e-10,
                 "antisymmetry and Leibniz, pb1_red/pb2_red, analytic gradients",
                 [=](const CheckContext& c) { return bracket_axioms(c, red12, &ObservableSet::red, analytic); }});
    v.push_back({"jacobi.red", "theorem2", ChartKind::red, Profile::nested, 1e-4,
                 "Jacobi identity, pb1_red and pb2_red",
                 [=](const CheckContext& c) { return jacobi_check(c, red12, &ObservableSet::red); }});
    v.push_back({"A3.red", "theorem2", ChartKind::red, Profile::standard, 1e-8,
                 "{f,H_k}_2 = {f,H_k+1}_1, k = 1..4, reduced chart",
                 [](const CheckContext& c) { return ladder_check(c, bracket1_red, bracket2_red, &ObservableSet::red); }});
    v.push_back({"A4.red", "theorem2", ChartKind::red, Profile::strict, 1e-10,
                 "reduced H_k in involution under both brackets",
                 [=](const CheckContext& c) { return involution_check(c, red12, &ObservableSet::red); }});
    v.push_back({"A5.pb1", "theorem2", ChartKind::red, Profile::standard, 1e-6,
                 "pb1_red(f,h) = pb1_full(F,H) at (Q,L)",
                 [](const CheckContext& c) { return theorem2_consistency(c, false); }});
    v.push_back({"A5.pb2", "theorem2", ChartKind::red, Profile::standard, 1e-6,
                 "pb2_red(f,h) = pb2_full(F,H) at (Q,L)",
                 [](const CheckContext& c) { return theorem2_consistency(c, true); }});

    v.push_back({"A6", "prop3", ChartKind::rs, Profile::standard, 1e-5,
                 "pb_rs at (Q,p,lambda) = pb2_red at from_rs(Q,p,lambda)",
                 [](const CheckContext& c) { return prop3(c); }});
    v.push_back({"A8.rs", "prop3", ChartKind::rs, Profile::strict, 1e-12,
                 "to_rs / from_rs round trips",
                 [](const CheckContext& c) { return rs_round_trip(c); }});
    v.push_back({"A8.bplus", "prop3", ChartKind::rs, Profile::strict, 1e-12,
                 "solve_bplus residual |b+ lambda - Q^-1 b+ Q| / |b+|",
                 [](const CheckContext& c) { return bplus_residual_check(c); }});
    v.push_back({"A9.rs", "prop3", ChartKind::rs, Profile::strict, 1e-12,
                 "h_rs = tr(L) through from_rs",
                 [](const CheckContext& c) { return h_rs_identity(c); }});

    v.push_back({"A7", "prop4", ChartKind::suth, Profile::standard, 1e-6,
                 "pb_suth at (Q,p,phi) = pb1_red at from_suth(Q,p,phi)",
                 [](const CheckContext& c) { return prop4(c); }});
    v.push_back({"A1.suth", "prop4", ChartKind::suth, Profile::standard, 1e-6,
                 "antisymmetry and Leibniz, pb_suth, FD gradients",
                 [=](const CheckContext& c) { return bracket_axioms(c, suth, &ObservableSet::suth, fd_only); }});
    v.push_back({"jacobi.suth", "prop4", ChartKind::suth, Profile::nested, 1e-4,
                 "Jacobi identity, pb_suth",
                 [=](const CheckContext& c) { return jacobi_check(c, suth, &ObservableSet::suth); }});
    v.push_back({"A8.suth", "prop4", ChartKind::suth, Profile::strict, 1e-12,
                 "to_suth / from_suth round trips",
                 [](const CheckContext& c) { return suth_round_trip(c); }});
    v.push_back({"A9.suth", "prop4", ChartKind::suth, Profile::strict, 1e-12,
                 "h_suth2 = tr(L^2)/2 through from_suth",
                 [](const CheckContext& c) { return h_suth_identity(c); }});

    v.push_back({"A10.rk4", "flows", ChartKind::full, Profile::strict, 1e-8,
                 "exact flow vs RK4 (1000 steps) on [0,1], k = 1, 2",
                 [](const CheckContext& c) { return flow_vs_rk4(c); }});
    v.push_back({"A10.drift", "flows", ChartKind::full, Profile::strict, 1e-10,
                 "conserved h_1..h_n drift along trajectories, k = 1..3",
                 [](const CheckContext& c) { return conserved_drift(c); }});
    v.push_back({"A10.group", "flows", ChartKind::full, Profile::strict, 1e-12,
                 "flow(t1+t2) = flow(t2) o flow(t1)",
                 [](const CheckContext& c) { return flow_group(c); }});
    return v;
  }();
  return defs;
}

inline const CheckDef* find_check(std::string_view id) {
  for (const auto& d : registry())
    if (d.id == id) return &d;
  return nullptr;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"all", "theorem1", "theorem2", "prop3", "prop4",
                                              "flows"};
  return names;
}

inline std::vector<std::string> suite_checks(std::string_view suite) {
  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    throw config_error("unknown suite '" + std::string(suite) + "'");
  std::vector<std::string> ids;
  for (const auto& d : registry())
    if (suite == "all" || d.suite == suite) ids.push_back(d.id);
  return ids;
}

inline std::vector<CheckSpec> make_specs(std::string_view suite, int n, int seeds,
                                         std::uint64_t base_seed = 0) {
  if (n < 2) throw config_error("n must be >= 2");
  if (seeds < 1) throw config_error("seeds must be >= 1");
  std::vector<CheckSpec> specs;
  for (const auto& id : suite_checks(suite))
    specs.push_back({id, find_check(id)->chart, n, seeds, base_seed});
  return specs;
}

// ---------------------------------------------------------------------------
// Runner

namespace detail {

struct TaskOutcome {
  bool ok = false;
  bool sampler_failure = false;
  Defect defect;
  std::string message;
  double seconds = 0.0;
};

inline TaskOutcome run_task(const CheckDef& def, const CheckSpec& spec, std::uint64_t seed,
                            const RunOptions& options) {
  TaskOutcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    out.defect = def.run(CheckContext{spec, seed, options});
    out.ok = std::isfinite(out.defect.rel);
    if (!out.ok) out.message = "seed " + std::to_string(seed) + ": non-finite defect";
  } catch (const sampler_error& e) {
    out.sampler_failure = true;
    out.message = e.what();
  } catch (const std::exception& e) {
    out.message = "seed " + std::to_string(seed) + ": " + e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace detail

// Deterministic given the specs and options: tasks run concurrently over
// (check, seed) pairs and are aggregated in spec order.
inline CheckReport run_checks(const std::vector<CheckSpec>& specs, const RunOptions& options = {}) {
  struct Task {
    std::size_t spec_index;
    std::uint64_t seed;
  };
  std::vector<const CheckDef*> defs;
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const CheckDef* def = find_check(specs[i].id);
    if (!def) throw config_error("unknown check id '" + specs[i].id + "'");
    if (specs[i].n < 2) throw config_error("check " + specs[i].id + ": n must be >= 2");
    if (specs[i].seeds < 1) throw config_error("check " + specs[i].id + ": seeds must be >= 1");
    defs.push_back(def);
    for (int s = 0; s < specs[i].seeds; ++s)
      tasks.push_back({i, specs[i].base_seed + std::uint64_t(s)});
  }

  std::vector<detail::TaskOutcome> outcomes(tasks.size());
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, unsigned(tasks.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++)
      outcomes[t] = detail::run_task(*defs[tasks[t].spec_index], specs[tasks[t].spec_index],
                                     tasks[t].seed, options);
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  CheckReport report;
  report.options = options;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const CheckDef& def = *defs[i];
    CheckResult r;
    r.id = def.id;
    r.description = def.description;
    r.chart = def.chart;
    r.n = specs[i].n;
    r.profile = options.profile_override.value_or(def.profile);
    r.tolerance = options.profile_override ? profile_tolerance(*options.profile_override)
                                           : def.tolerance;
    bool hard_failure = false;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      if (tasks[t].spec_index != i) continue;
      const auto& o = outcomes[t];
      r.wall_time_s += o.seconds;
      if (o.ok) {
        ++r.seeds_run;
        r.seeds.push_back(tasks[t].seed);
        r.max_abs_defect = std::max(r.max_abs_defect, o.defect.abs);
        r.max_rel_defect = std::max(r.max_rel_defect, o.defect.rel);
      } else {
        hard_failure = hard_failure || !o.sampler_failure;
        r.failures.push_back(o.message);
      }
    }
    r.pass = !hard_failure && r.seeds_run > 0 && r.max_rel_defect <= r.tolerance;
    report.results.push_back(std::move(r));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization: every float is written with 17 significant digits.

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void write_json_value(std::ostream& os, const nlohmann::json& j, int indent, int depth) {
  const std::string pad(std::size_t(indent * (depth + 1)), ' ');
  const std::string pad_close(std::size_t(indent * depth), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << nlohmann::json(it.key()).dump() << ": ";
        write_json_value(os, it.value(), indent, depth + 1);
      }
      os << "\n" << pad_close << "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_json_value(os, j[i], indent, depth + 1);
      }
      os << "\n" << pad_close << "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v))
        os << format_double(v);
      else
        os << "null";
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace detail

inline void write_json(std::ostream& os, const nlohmann::json& j) {
  detail::write_json_value(os, j, 2, 0);
  os << "\n";
}

inline nlohmann::json to_json(const CheckReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& r : report.results) {
    checks.push_back({{"id", r.id},
                      {"description", r.description},
                      {"chart", std::string(chart_name(r.chart))},
                      {"n", r.n},
                      {"seeds_run", r.seeds_run},
                      {"seeds", r.seeds},
                      {"max_abs_defect", r.max_abs_defect},
                      {"max_rel_defect", r.max_rel_defect},
                      {"profile", std::string(profile_name(r.profile))},
                      {"tolerance", r.tolerance},
                      {"pass", r.pass},
                      {"wall_time_s", r.wall_time_s},
                      {"failures", r.failures}});
  }
  const auto& o = report.options;
  nlohmann::json config = {
      {"regularity_gap", o.config.regularity_gap},
      {"pd_floor", o.config.pd_floor},
      {"profile_override",
       o.profile_override ? nlohmann::json(std::string(profile_name(*o.profile_override)))
                          : nlohmann::json(nullptr)},
      {"threads", o.threads},
      {"sampling",
       {{"min_gap", o.sampling.min_gap},
        {"p_sigma", o.sampling.p_sigma},
        {"lambda_sigma", o.sampling.lambda_sigma},
        {"phi_sigma", o.sampling.phi_sigma}}}};
  return {{"library", "rsh"},
          {"version", version},
          {"config", config},
          {"checks", checks},
          {"all_pass", report.all_pass()}};
}

inline std::vector<double> linspace(double t0, double t1, int steps) {
  if (steps < 1) throw config_error("steps must be >= 1");
  std::vector<double> grid;
  for (int i = 0; i <= steps; ++i) grid.push_back(t0 + (t1 - t0) * i / steps);
  return grid;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, Eigen::Index n,
                                 std::size_t K) {
  os << "t";
  for (Eigen::Index j = 1; j <= n; ++j) os << ",q_" << j;
  for (std::size_t l = 1; l <= K; ++l) os << ",h_" << l;
  os << ",gauge_defect\n";
  for (const auto& s : tr.samples) {
    os << format_double(s.t);
    for (Eigen::Index j = 0; j < n; ++j) os << "," << format_double(s.point.Q.phases()(j));
    for (double h : s.conserved) os << "," << format_double(h);
    os << "," << format_double(s.gauge_defect) << "\n";
  }
}

// Writes the trajectory as CSV. On loss of regularity the samples before the
// failure are written and the trajectory_error is rethrown.
inline Trajectory export_trajectory(const FullPoint& x0, int k, const std::vector<double>& t_grid,
                                    std::ostream& os, int K = 0, const Config& cfg = {}) {
  const std::size_t nk = K > 0 ? std::size_t(K) : std::size_t(x0.dim());
  try {
    Trajectory tr = trajectory(x0, k, t_grid, int(nk), cfg);
    write_trajectory_csv(os, tr, x0.dim(), nk);
    return tr;
  } catch (const trajectory_error& e) {
    write_trajectory_csv(os, e.partial, x0.dim(), nk);
    throw;
  }
}

inline Trajectory export_trajectory(const FullPoint& x0, int k, const std::vector<double>& t_grid,
                                    const std::string& path, int K = 0, const Config& cfg = {}) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw error("export_trajectory: cannot open " + path);
  Trajectory tr = export_trajectory(x0, k, t_grid, os, K, cfg);
  os.flush();
  if (!os) throw error("export_trajectory: write failed for " + path);
  return tr;
}

// RS_HIERARCHY_PROFILE wins over the command-line value.
inline std::optional<Profile> resolve_profile(const std::optional<std::string>& cli,
                                              const char* env) {
  const std::optional<std::string> chosen =
      (env && *env) ? std::optional<std::string>(env) : cli;
  if (!chosen) return std::nullopt;
  const auto p = parse_profile(*chosen);
  if (!p) throw config_error("unknown profile '" + *chosen + "'");
  return p;
}

}  // namespace rsh::harness
