#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pancharatnam/oracle.hpp"
#include "pancharatnam/random.hpp"
#include "pancharatnam/scenarios.hpp"

using namespace pancharatnam;

TEST_CASE("oracle_deficit agrees with phase_deficit on random states", "[oracle]") {
  SeededRng rng(51);
  const std::vector<HilbertShape> shapes = {HilbertShape({2, 2}), HilbertShape({2, 3}),
                                            HilbertShape({4, 4}), HilbertShape({2, 2, 2})};
  for (int trial = 0; trial < 32; ++trial) {
    const HilbertShape& shape = shapes[static_cast<std::size_t>(trial) % shapes.size()];
    const StateVector psi =
        (trial % 2 == 0) ? random_state(shape, rng) : random_product_state(shape, rng);
    const LocalUnitarySet locals = random_local_unitaries(shape, rng);

    const DeficitReport fast = phase_deficit(psi, locals);
    const DeficitReport slow = oracle_deficit(psi, locals);
    REQUIRE(fast.all_defined() == slow.all_defined());
    CHECK(std::abs(fast.global_phase.phase - slow.global_phase.phase) < 1e-12);
    CHECK(std::abs(fast.global_phase.visibility - slow.global_phase.visibility) < 1e-12);
    REQUIRE(fast.local_phases.size() == slow.local_phases.size());
    for (std::size_t i = 0; i < fast.local_phases.size(); ++i) {
      CHECK(std::abs(fast.local_phases[i].phase - slow.local_phases[i].phase) < 1e-12);
      CHECK(std::abs(fast.local_phases[i].visibility - slow.local_phases[i].visibility) < 1e-12);
    }
    if (fast.all_defined()) {
      CHECK(std::abs(wrap_angle(fast.deficit - slow.deficit)) < 1e-12);
      CHECK(fast.entangled_witnessed == slow.entangled_witnessed);
    }
  }
}

TEST_CASE("oracle_deficit vanishes on product states", "[oracle]") {
  SeededRng rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const HilbertShape shape({2, 3, 2});
    const StateVector psi = random_product_state(shape, rng);
    const DeficitReport report = oracle_deficit(psi, random_local_unitaries(shape, rng));
    REQUIRE(report.all_defined());
    CHECK(std::abs(report.deficit) < 1e-10);
  }
}

TEST_CASE("truncation_for_tolerance finds the minimal adequate cutoff", "[oracle]") {
  const FockSpec zero = truncation_for_tolerance(0.0, 1e-12);
  CHECK(zero.n_max == 0);

  const FockSpec spec = truncation_for_tolerance(2.0, 1e-12);
  CHECK(spec.n_max == 18);
  CHECK(spec.tail_bound < 1e-12);
  CHECK(poisson_tail(2.0, spec.n_max - 1) >= 1e-12);

  CHECK(truncation_for_tolerance(2.0, 1e-6).n_max < spec.n_max);
  CHECK_THROWS_AS(truncation_for_tolerance(2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(truncation_for_tolerance(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(truncation_for_tolerance(-0.5, 1e-6), std::invalid_argument);
}

TEST_CASE("cat phases are stable under a doubled truncation", "[oracle]") {
  CatParams base;
  base.fock = truncation_for_tolerance(std::max(base.n_minus, base.n_plus), 1e-12);
  CatParams fine = base;
  fine.fock = FockSpec(2 * base.fock.n_max, base.fock.tail_bound);

  const ScenarioSystem coarse_system = cat_build(base);
  const ScenarioSystem fine_system = cat_build(fine);
  const DeficitReport coarse = oracle_deficit(coarse_system.initial, coarse_system.locals);
  const DeficitReport refined = oracle_deficit(fine_system.initial, fine_system.locals);
  REQUIRE(coarse.all_defined());
  REQUIRE(refined.all_defined());
  CHECK(std::abs(wrap_angle(coarse.deficit - refined.deficit)) < 1e-8);
  CHECK(std::abs(coarse.global_phase.phase - refined.global_phase.phase) < 1e-8);
}

TEST_CASE("audit registry is complete and self-describing", "[oracle]") {
  const auto ids = audit_formula_ids();
  REQUIRE(ids.size() == 11);
  for (const auto& id : ids) {
    const AuditGrid grid = default_audit_grid(id);
    CHECK_FALSE(grid.axes.empty());
    CHECK_FALSE(grid.description.empty());
  }
  CHECK_THROWS_AS(default_audit_grid("nonsense"), std::invalid_argument);
}

TEST_CASE("audit confirms the transcribed formulas", "[oracle]") {
  for (const char* id : {"micro_macro_closed", "cat_closed.trace_ab", "cat_closed.trace_a",
                         "cat_closed.trace_b", "kondo_closed.locals", "kondo_concurrence"}) {
    const DiscrepancyRecord rec = compare_to_oracle(id);
    INFO(rec.formula_id << " max " << rec.max_abs_error);
    CHECK(rec.classification == "CONFIRMED");
    CHECK(rec.max_abs_error < 1e-6);
    CHECK(rec.undefined_oracle == 0);
  }
}

TEST_CASE("audit flags the printed cat deficit", "[oracle]") {
  const DiscrepancyRecord rec = compare_to_oracle("cat_closed.delta");
  CHECK(rec.classification == "DEVIATES");
  // The transposed arctangent pair contributes a clean quarter turn.
  CHECK(rec.max_abs_error == Catch::Approx(kPi / 2.0).margin(1e-9));
  CHECK(rec.unit == "radians");
}

TEST_CASE("audit flags the printed cat entropy and its domain hole", "[oracle]") {
  const DiscrepancyRecord rec = compare_to_oracle("cat_closed.entropy");
  CHECK(rec.classification == "DEVIATES");
  CHECK(rec.unit == "bits");
  // xi < arccos(3/4) pushes the printed overlap above 1 on the 50-point grid.
  CHECK(rec.undefined_published == 12);
  CHECK(rec.undefined_oracle == 0);
  CHECK(rec.max_abs_error > 0.1);
}

TEST_CASE("audit flags the printed kondo global phase and deficit", "[oracle]") {
  const DiscrepancyRecord global = compare_to_oracle("kondo_closed.global");
  CHECK(global.classification == "DEVIATES");

  const DiscrepancyRecord delta = compare_to_oracle("kondo_closed.delta");
  CHECK(delta.classification == "DEVIATES");
  CHECK(delta.max_abs_error == Catch::Approx(0.46364760900080615).margin(1e-12));
  REQUIRE_FALSE(delta.worst_point.empty());
  CHECK(delta.worst_point[0].first == "theta");
  CHECK(std::abs(delta.worst_point[0].second) < 1e-12);

  const DiscrepancyRecord e = compare_to_oracle("kondo_closed.e_from_delta");
  CHECK(e.classification == "DEVIATES");
}

TEST_CASE("audit accepts custom grids and rejects empty ones", "[oracle]") {
  const AuditGrid single{{{"theta", {0.0}}}, "single point"};
  const DiscrepancyRecord rec = compare_to_oracle("kondo_closed.delta", single);
  CHECK(rec.points == 1);
  CHECK(rec.max_abs_error == Catch::Approx(0.46364760900080615).margin(1e-12));

  CHECK_THROWS_AS(compare_to_oracle("kondo_closed.delta", AuditGrid{}), std::invalid_argument);
  const AuditGrid hollow{{{"theta", {}}}, "empty axis"};
  CHECK_THROWS_AS(compare_to_oracle("kondo_closed.delta", hollow), std::invalid_argument);
}

TEST_CASE("audit results are deterministic", "[oracle]") {
  const DiscrepancyRecord a = compare_to_oracle("kondo_closed.delta");
  const DiscrepancyRecord b = compare_to_oracle("kondo_closed.delta");
  CHECK(a.max_abs_error == b.max_abs_error);
  CHECK(a.points == b.points);
  REQUIRE(a.worst_point.size() == b.worst_point.size());
  for (std::size_t i = 0; i < a.worst_point.size(); ++i)
    CHECK(a.worst_point[i].second == b.worst_point[i].second);

  const auto full = run_full_audit();
  REQUIRE(full.size() == 11);
  CHECK(full[0].formula_id == "micro_macro_closed");
  CHECK(full[10].formula_id == "kondo_concurrence");
}
