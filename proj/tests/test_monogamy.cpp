#include <gtest/gtest.h>

#include <cmath>

#include "entmono/monogamy.hpp"
#include "oracles.hpp"

using namespace entmono;

namespace {

QuantumState bell_times(const Vector& c) {
  return QuantumState::pure({2, 2, 2}, tensor(max_entangled(2).vector(), c));
}

}  // namespace

TEST(CkwPure, Examples) {
  const MonogamyTriple zero = ckw_pure(basis_state({2, 2, 2}, 0));
  EXPECT_NEAR(zero.e_ab, 0.0, 1e-12);
  EXPECT_NEAR(zero.e_ac, 0.0, 1e-12);
  EXPECT_NEAR(zero.e_abc, 0.0, 1e-12);

  const MonogamyTriple bell = ckw_pure(bell_times(Vector::basis(2, 0)));
  EXPECT_NEAR(bell.e_ab, 1.0, 1e-12);
  EXPECT_NEAR(bell.e_ac, 0.0, 1e-12);
  EXPECT_NEAR(bell.e_abc, 1.0, 1e-12);

  const MonogamyTriple w = ckw_pure(counterexample_state());
  EXPECT_NEAR(w.e_ab, 0.5, 1e-12);
  EXPECT_NEAR(w.e_ac, 0.5, 1e-12);
  EXPECT_NEAR(w.e_abc, 1.0, 1e-12);
  EXPECT_NEAR(slack(w), 0.0, 1e-12);

  EXPECT_THROW(ckw_pure(haar_random_pure(Dims{2, 2, 3}, 1)), Error);
  EXPECT_THROW(ckw_pure(basis_state({2, 2, 2}, 0).as_mixed()), Error);
}

TEST(CkwPure, SlackEqualsThreeTangle) {
  for (Seed s = 0; s < 200; ++s) {
    const QuantumState psi = haar_random_pure(Dims{2, 2, 2}, s);
    const MonogamyTriple t = ckw_pure(psi);
    EXPECT_NEAR(slack(t), oracle::three_tangle(psi.vector()), 1e-10) << s;
    // Pair terms against the textbook Wootters formula on Eigen-reduced states.
    // The reduced states have rank 2, so the oracle's square roots of zero
    // eigenvalues turn rounding noise into ~1e-8 errors.
    EXPECT_NEAR(t.e_ab, std::pow(oracle::wootters(oracle::trace_out(psi.density(), {2, 2, 2}, 2)), 2), 1e-7);
    EXPECT_NEAR(t.e_ac, std::pow(oracle::wootters(oracle::trace_out(psi.density(), {2, 2, 2}, 1)), 2), 1e-7);
  }
}

TEST(CkwPure, SwappingBAndCSwapsPairTerms) {
  const std::size_t swap_bc[] = {0, 2, 1};
  for (Seed s = 0; s < 50; ++s) {
    const QuantumState psi = haar_random_pure(Dims{2, 2, 2}, s);
    const QuantumState swapped = QuantumState::pure({2, 2, 2}, permute_subsystems(psi.vector(), psi.dims(), swap_bc));
    const MonogamyTriple a = ckw_pure(psi), b = ckw_pure(swapped);
    EXPECT_NEAR(a.e_ab, b.e_ac, 1e-14);
    EXPECT_NEAR(a.e_ac, b.e_ab, 1e-14);
    EXPECT_NEAR(a.e_abc, b.e_abc, 1e-14);
  }
}

TEST(CkwMixed, Examples) {
  OptimizerConfig cfg;
  cfg.restarts = 4;
  const QuantumState psi = haar_random_pure(Dims{2, 2, 2}, 4);
  const MonogamyTriple p = ckw_pure(psi), m = ckw_mixed(psi.as_mixed(), cfg);
  EXPECT_NEAR(m.e_ab, p.e_ab, 1e-6);
  EXPECT_NEAR(m.e_ac, p.e_ac, 1e-6);
  EXPECT_NEAR(m.e_abc, p.e_abc, 1e-6);

  const Matrix mix = basis_state({2, 2, 2}, 0).density() * cplx(0.5) +
                     bell_times(Vector::basis(2, 0)).density() * cplx(0.5);
  EXPECT_GE(slack(ckw_mixed(QuantumState::mixed({2, 2, 2}, mix), cfg)), -1e-6);

  const Matrix p0 = Matrix::projector(Vector::basis(2, 0)), p1 = Matrix::projector(Vector::basis(2, 1));
  const SeparableTerm terms[] = {{0.5, {p0, p0, p1}}, {0.5, {p1, p0, p0}}};
  const MonogamyTriple sep = ckw_mixed(separable_mixture(terms), cfg);
  EXPECT_NEAR(sep.e_ab, 0.0, 1e-10);
  EXPECT_NEAR(sep.e_ac, 0.0, 1e-10);
  EXPECT_LE(sep.e_abc, 1e-4);
}

TEST(EvaluatePureTriple, MeasuresAndMonotonicity) {
  for (MeasureId m : {MeasureId::concurrence, MeasureId::concurrence_sq, MeasureId::eof, MeasureId::ree})
    for (Seed s = 0; s < 50; ++s) {
      const MonogamyTriple t = evaluate_pure_triple(m, haar_random_pure(Dims{2, 2, 2}, s));
      EXPECT_GE(t.e_abc, std::max(t.e_ab, t.e_ac) - 1e-8) << to_string(m);
    }
  const MonogamyTriple e = evaluate_pure_triple(MeasureId::eof, counterexample_state());
  EXPECT_NEAR(e.e_abc, 1.0, 1e-12);
  EXPECT_NEAR(e.e_ab, 0.600876, 1e-6);
  EXPECT_NEAR(e.e_ac, 0.600876, 1e-6);
  EXPECT_GT(e.e_ab + e.e_ac, e.e_abc);
  EXPECT_NEAR(slack(e), 1.0 - 0.600876, 1e-6);
  // Qubit A with larger B and C still works for eof via the convex roof.
  OptimizerConfig cfg;
  cfg.restarts = 2;
  const MonogamyTriple big = evaluate_pure_triple(MeasureId::eof, haar_random_pure(Dims{2, 2, 3}, 1), cfg);
  EXPECT_GE(big.e_abc, std::max(big.e_ab, big.e_ac) - 1e-8);
}

TEST(Scan, CkwReportIsConsistentAndDeterministic) {
  const ScanReport a = scan_ckw(500, 7), b = scan_ckw(500, 7, 3);
  ASSERT_EQ(a.samples.size(), 500u);
  EXPECT_EQ(a.violations, 0u);
  EXPECT_EQ(a.kind, SlackKind::ckw);
  double min_slack = 1e9;
  for (std::size_t i = 0; i < 500; ++i) {
    EXPECT_EQ(a.samples[i].index, i);
    EXPECT_EQ(a.samples[i].seed, derive_seed(7, i));
    EXPECT_EQ(a.samples[i].slack, b.samples[i].slack);
    min_slack = std::min(min_slack, a.samples[i].slack);
  }
  EXPECT_EQ(a.min_slack, min_slack);
  EXPECT_GE(a.min_slack, -1e-9);
  EXPECT_NE(scan_ckw(10, 8).samples[0].slack, a.samples[0].slack);
}

TEST(Scan, FinalizeCountsViolations) {
  ScanReport r;
  r.tolerance = 1e-9;
  r.samples.push_back({0, 0, {}, -1e-3});
  r.samples.push_back({1, 0, {}, -1e-10});
  r.samples.push_back({2, 0, {}, 0.5});
  finalize(r);
  EXPECT_EQ(r.violations, 1u);
  EXPECT_EQ(r.min_slack, -1e-3);
}

TEST(Scan, MixedCkwFlagsHeuristicRhs) {
  OptimizerConfig cfg;
  cfg.restarts = 2;
  const ScanReport r = scan_ckw_mixed(4, 3, 2, cfg);
  EXPECT_TRUE(r.heuristic_rhs);
  EXPECT_EQ(r.samples.size(), 4u);
  EXPECT_EQ(r.violations, 0u);
}

TEST(Scan, DimsChecks) {
  EXPECT_THROW(check_scan_dims(MeasureId::concurrence_sq, {2, 2, 3}), Error);
  EXPECT_THROW(check_scan_dims(MeasureId::eof, {2, 2}), Error);
  EXPECT_NO_THROW(check_scan_dims(MeasureId::eof, {2, 2, 3}));
}

TEST(Region, TablesRespectTheirRegions) {
  const auto conc = region_table(region_scan(MeasureId::concurrence_sq, {2, 2, 2}, 500, 1));
  for (const auto& r : conc) EXPECT_LE(r.x + r.y, 1.0 + 1e-9);
  const auto eof = region_table(region_scan(MeasureId::eof, {2, 2, 2}, 300, 2));
  for (const auto& r : eof) EXPECT_LE(std::max(r.x, r.y), 1.0 + 1e-8);
  EXPECT_TRUE(region_table(region_scan(MeasureId::eof, {2, 2, 2}, 0, 2)).empty());
}

TEST(Alpha, PowerMeanPropertiesAndLimit) {
  const double grid[] = {0.0, 0.3, 0.7, 1.0};
  for (double x : grid)
    for (double y : grid) {
      EXPECT_LE(std::abs(power_mean(x, y, 100.0) - std::max(x, y)), 0.01);
      double prev = power_mean(x, y, 1.0);
      for (double a : {2.0, 10.0, 100.0}) {
        const double v = power_mean(x, y, a);
        EXPECT_LE(v, prev + 1e-15);
        prev = v;
      }
    }
  EXPECT_NEAR(power_mean(0.3, 0.4, 2.0), 0.5, 1e-15);
  EXPECT_NEAR(power_mean(1e-200, 2e-200, 1.0), 3e-200, 1e-214);
}

TEST(Alpha, SearchExamples) {
  const AlphaResult conc = alpha_search(MeasureId::concurrence, {2, 2, 2}, 1000, 0, 1e-3);
  EXPECT_LE(conc.alpha, 2.0 + 1e-3);
  EXPECT_TRUE(alpha_holds(conc.triples, conc.alpha));

  std::vector<MonogamyTriple> flat(5);
  for (std::size_t i = 0; i < 5; ++i) flat[i] = {0.1 * double(i), 0.0, 0.1 * double(i)};
  EXPECT_EQ(alpha_search(flat, 1e-3).alpha, alpha_lo);

  const AlphaResult eof = alpha_search(MeasureId::eof, {2, 2, 2}, 1000, 0, 1e-3);
  EXPECT_TRUE(std::isfinite(eof.alpha));
  EXPECT_GT(eof.alpha, 1.0);

  std::vector<MonogamyTriple> broken{{1.0, 1.0, 0.5}};
  const AlphaResult inf = alpha_search(broken, 1e-3);
  EXPECT_TRUE(std::isinf(inf.alpha));
  ASSERT_TRUE(inf.violating_index.has_value());
  EXPECT_EQ(*inf.violating_index, 0u);
}

TEST(Alpha, NestedSampleSetsAreMonotone) {
  const auto triples = sample_triples(MeasureId::eof, {2, 2, 2}, 400, 3);
  const std::span<const MonogamyTriple> all(triples);
  double prev = 0.0;
  for (std::size_t n : {50u, 100u, 200u, 400u}) {
    const double a = alpha_search(all.first(n), 1e-4).alpha;
    EXPECT_GE(a, prev - 1e-4);
    prev = a;
  }
}

TEST(Def15, ProbeBehaviour) {
  const Def15Report r = def15_probe(MeasureId::concurrence_sq, {2, 2, 2}, 2000, 5, 1e-3);
  EXPECT_LE(r.max_e_ac_in_slab, 1e-3);
  ASSERT_EQ(r.targeted.size(), 6u);
  for (const auto& t : r.targeted) {
    EXPECT_TRUE(t.in_slab) << t.label;
    EXPECT_EQ(t.triple.e_ac, 0.0) << t.label;
  }
  const MonogamyTriple ce = evaluate_pure_triple(MeasureId::eof, counterexample_state());
  EXPECT_FALSE(ce.e_abc - ce.e_ab < 1e-3);
  EXPECT_THROW(def15_probe(MeasureId::concurrence_sq, {2, 2, 2}, 10, 5, 0.0), Error);
}

TEST(Bounds, Examples) {
  const BoundParams params;
  EXPECT_EQ(bound_eval(BoundKind::f_sum, params, {0.0, 0.6, 1.0}), 0.6);
  EXPECT_NEAR(bound_eval(BoundKind::f_euclid, params, {0.3, 0.4, 1.0}), 0.5, 1e-15);
  EXPECT_NEAR(bound_eval(BoundKind::f_piecewise_44, params, {0.9 * 0.8, 0.9 * 0.8, 0.8}), 0.8, 1e-12);
  EXPECT_NEAR(bound_eval(BoundKind::f_piecewise_44, params, {0.2, 0.3, 1.0}), 0.3, 1e-15);
  EXPECT_NEAR(bound_eval(BoundKind::power_mean, params, {0.3, 0.7, 1.0}, 100.0), 0.7, 0.01);
  EXPECT_THROW(bound_eval(BoundKind::power_mean, params, {0.3, 0.7, 1.0}), Error);
  EXPECT_THROW(bound_eval(BoundKind::f_sum, params, {-0.1, 0.7, 1.0}), Error);
  for (BoundKind k : {BoundKind::bound_45, BoundKind::bound_46})
    for (double e : {0.0, 0.2, 0.9}) EXPECT_EQ(bound_eval(k, params, {e, 0.0, 1.0}), e);
  BoundParams bad;
  bad.c = 0.0;
  EXPECT_THROW(bound_eval(BoundKind::bound_45, bad, {0.1, 0.1, 1.0}), Error);
  EXPECT_FALSE(parse_bound_kind("nope").has_value());
  EXPECT_EQ(parse_bound_kind("bound_46"), BoundKind::bound_46);
}

TEST(Bounds, DimensionWeightedFormula) {
  BoundParams p;
  p.c = 2.0;
  p.dims = {3, 4, 5};
  const double x = 0.4, y = 0.5;
  const double wc = 2.0 / (3.0 * 5.0 * std::pow(std::log2(3.0), 8));
  const double wb = 2.0 / (3.0 * 4.0 * std::pow(std::log2(3.0), 8));
  EXPECT_NEAR(bound_eval(BoundKind::bound_45, p, {x, y, 1.0}), std::max(x + wc * std::pow(y, 8), y + wb * std::pow(x, 8)), 1e-15);
}

TEST(Fingerprint, StableAndSensitive) {
  const QuantumState a = haar_random_pure(Dims{2, 2, 2}, 1);
  EXPECT_EQ(fingerprint(a), fingerprint(haar_random_pure(Dims{2, 2, 2}, 1)));
  EXPECT_NE(fingerprint(a), fingerprint(haar_random_pure(Dims{2, 2, 2}, 2)));
}
