// Evaluates both brackets of a pair of trace invariants on each chart and
// follows one free flow for a few steps.

#include <cstdio>

#include "rsh/harness.hpp"

int main() {
  using namespace rsh;
  const auto F = invariant_observable(1, 1, Part::re);
  const auto H = invariant_observable(2, 1, Part::im);

  const auto x = sample_point<FullPoint>(3, 7);
  std::printf("full:  {F,H}_1 = %.6f   {F,H}_2 = %.6f\n", pb1_full(F.full, H.full, x),
              pb2_full(F.full, H.full, x));

  // L must be positive definite for the Ruijsenaars chart.
  const RSPoint r = sample_point<RSPoint>(3, 7);
  const RedPoint y = from_rs(r);
  std::printf("red:   {f,h}_1 = %.6f   {f,h}_2 = %.6f\n", pb1_red(F.red, H.red, y),
              pb2_red(F.red, H.red, y));

  // Same reduced point, seen through the two canonical charts.
  const SuthPoint s = to_suth(y);
  std::printf("rs:    {f,h}   = %.6f   (matches red bracket 2)\n", pb_rs(F.rs, H.rs, r));
  std::printf("suth:  {f,h}   = %.6f   (matches red bracket 1)\n", pb_suth(F.suth, H.suth, s));
  std::printf("h_rs = %.6f   tr L = %.6f\n", h_rs(r), y.L.matrix().trace().real());

  const auto tr = trajectory(x, 2, harness::linspace(0.0, 1.0, 4));
  for (const auto& smp : tr.samples)
    std::printf("t=%.2f  q = %.4f %.4f %.4f  h_2 = %.12f\n", smp.t, smp.point.Q.phases()(0),
                smp.point.Q.phases()(1), smp.point.Q.phases()(2), smp.conserved[1]);
}
