#include <cmath>

#include <doctest.h>

#include "lipfield/driver.hpp"
#include "lipfield/errors.hpp"

using namespace lipfield;
using doctest::Approx;

namespace {

BarProblem elastic_bar(int n, double l, std::vector<double> peaks, int steps) {
  BarProblem p;
  p.mesh = build_uniform_mesh(1.0, n);
  p.model = MaterialModel::softening_elasticity(1.0, 1.0, SofteningFunction::h2(0.3));
  p.length = l;
  p.load.peaks = std::move(peaks);
  p.load.steps_per_segment = {steps};
  return p;
}

BarState start(const BarProblem& p) { return BarState::zero(p.mesh); }

}  // namespace

TEST_CASE("trigger") {
  const auto g = apply_trigger(std::vector<double>(5, 0.0), 1e-3);
  CHECK(g == std::vector<double>{0, 0, 1e-3, 0, 0});
  const auto h = apply_trigger(std::vector<double>{0.1, kDamageMax, 0.2}, 1e-3);
  CHECK(h == std::vector<double>{0.1, kDamageMax, 0.2});
  CHECK(apply_trigger(std::vector<double>(4, 0.0), 1e-3)[2] == 1e-3);
}

TEST_CASE("load program") {
  LoadProgram lp;
  lp.peaks = {1.0, 0.0};
  lp.steps_per_segment = {2, 4};
  const auto path = lp.displacement_path();
  REQUIRE(path.size() == 6);
  CHECK(path[1] == 1.0);
  CHECK(path[2] == Approx(0.75));
  CHECK(path[5] == 0.0);
  lp.steps_per_segment = {2, 0};
  CHECK_THROWS_AS(lp.validate(), InvalidArgument);
  lp.steps_per_segment = {1, 2, 3};
  CHECK_THROWS_AS(lp.validate(), InvalidArgument);
  LoadProgram sb;
  sb.kind = LoadProgram::Kind::SnapBackControlled;
  CHECK_THROWS_AS(sb.validate(), InvalidArgument);
}

TEST_CASE("elastic step needs one alternation") {
  const BarProblem p = elastic_bar(16, 0.5, {1.0}, 1);
  const StepOutcome out = run_step(p, start(p), 1.0);
  CHECK(out.record.alternations == 1);
  for (double d : out.state.damage) CHECK(d == 0.0);
  CHECK(out.record.mean_stress == Approx(1.0));
}

TEST_CASE("alternation cap") {
  BarProblem p = elastic_bar(16, 0.5, {2.0}, 1);
  p.solver.max_alternations = 1;
  CHECK_THROWS_AS(run_step(p, start(p), 2.0), NonConvergence);
  p.load.peaks = {1.0, 2.0};
  try {
    run_scenario(p);
    FAIL("expected StepFailure");
  } catch (const StepFailure& e) {
    CHECK(e.step() == 2);
  }
}

TEST_CASE("localizing step decreases the potential and stays Lipschitz") {
  const BarProblem p = elastic_bar(32, 0.25, {1.5}, 1);
  // Drive to just below onset, then take a damaging step.
  StepOutcome pre = run_step(p, start(p), 1.40);
  const StepOutcome out = run_step(p, pre.state, 1.48);
  const auto& trace = out.potential_trace;
  REQUIRE(trace.size() >= 3);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    CAPTURE(i);
    CHECK(trace[i] <= trace[i - 1] + 1e-12 * std::abs(trace[i - 1]));
  }
  CHECK(is_lip(p.mesh, out.state.damage, p.length, 1e-10));
  const int mid = 16;
  for (int e = 0; e < 32; ++e) {
    CHECK(out.state.damage[e] <= out.state.damage[mid] + 1e-12);
  }
  CHECK(out.state.damage[mid] > 0.0);
}

TEST_CASE("single element bar reproduces the material point") {
  const MaterialModel models[] = {
      MaterialModel::softening_elasticity(1.0, 1.0, SofteningFunction::h1()),
      MaterialModel::softening_elasto_hardening_plasticity(2.0, 1.0, 1.0, 1.0, SofteningFunction::h1()),
      MaterialModel::softening_plasticity(1.0, 1.0 / 16.0, 4.0)};
  const std::vector<double> peaks = {2.0, 0.5, 3.0};
  for (const MaterialModel& m : models) {
    BarProblem p;
    p.mesh = build_uniform_mesh(1.0, 1);
    p.model = m;
    p.load.peaks = peaks;
    p.load.steps_per_segment = {60};
    const RunResult bar = run_scenario(p);
    std::vector<StrainTarget> targets(peaks.begin(), peaks.end());
    const auto point = run_material_point(m, targets, 60);
    REQUIRE(bar.records.size() == point.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
      CHECK(std::abs(bar.records[i].mean_stress - point[i].stress) <= 1e-12);
      CHECK(std::abs(bar.records[i].max_damage - point[i].damage) <= 1e-12);
    }
  }
}

TEST_CASE("material point unloading targets") {
  const auto m = MaterialModel::softening_plasticity(1.0, 1.0 / 16.0, 4.0);
  const std::vector<StrainTarget> targets = {0.2, std::nullopt};
  const auto rec = run_material_point(m, targets, 50);
  CHECK(rec.back().stress == Approx(0.0).scale(1e-12));
  CHECK(rec.back().strain == Approx(rec.back().plastic_strain));
  CHECK_THROWS_AS(run_material_point(m, targets, 0), InvalidArgument);
}

TEST_CASE("snap-back control") {
  BarProblem p = elastic_bar(51, 0.1, {}, 1);
  SUBCASE("pre-peak step is a uniform step of size increment * L") {
    const StepOutcome out = run_snapback(p, start(p), 0.1);
    CHECK(out.state.load == Approx(0.1).epsilon(1e-9));
    for (int e = 0; e < 51; ++e) CHECK(out.state.strain(p.mesh, e) == Approx(0.1).epsilon(1e-9));
  }
  SUBCASE("the control only selects the load") {
    p.load.kind = LoadProgram::Kind::SnapBackControlled;
    p.load.strain_increment = 0.3;
    p.load.max_steps = 8;
    const RunResult r = run_scenario(p);
    const StepOutcome again = run_step(p, start(p), r.records[1].load);
    CHECK(again.record.mean_stress == Approx(r.records[1].mean_stress).epsilon(1e-9));
  }
  SUBCASE("post-peak response snaps back") {
    p.load.kind = LoadProgram::Kind::SnapBackControlled;
    p.load.strain_increment = 0.2;
    p.load.max_steps = 5000;
    const RunResult r = run_scenario(p);
    bool snapped = false;
    for (std::size_t i = 1; i < r.records.size(); ++i) {
      if (r.records[i].load < r.records[i - 1].load &&
          r.records[i].mean_stress < r.records[i - 1].mean_stress) {
        snapped = true;
      }
    }
    CHECK(snapped);
    CHECK(r.records.back().mean_stress <= 0.01 * r.peak_stress);
  }
  SUBCASE("outer iteration cap") {
    p.solver.snapback_max_outer = 1;
    StepOutcome pre = run_snapback(elastic_bar(51, 0.1, {}, 1), start(p), 0.1);
    CHECK_THROWS_AS(run_snapback(p, pre.state, 0.1), NonConvergence);
  }
  SUBCASE("increment must be positive") {
    CHECK_THROWS_AS(run_snapback(p, start(p), 0.0), InvalidArgument);
  }
}

TEST_CASE("dissipated energy") {
  SUBCASE("elastic cycle dissipates nothing") {
    const BarProblem p = elastic_bar(4, 0.5, {1.0, 0.0}, 50);
    const RunResult r = run_scenario(p);
    CHECK(std::abs(dissipated_energy(r.records, 1.0)) <= 1e-12);
  }
  SUBCASE("not driven to failure") {
    const BarProblem p = elastic_bar(4, 0.5, {1.0}, 10);
    const RunResult r = run_scenario(p);
    CHECK_THROWS_AS(dissipated_energy(r.records, 1.0), PreconditionError);
    CHECK(external_work(r.records, 1.0) == Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("single element against dense substepping") {
    // Monotone loading with mu = 0 makes sigma d(eps) an exact differential, so
    // the work equals the final potential density.
    const BarProblem p = elastic_bar(1, 0.0, {40.0}, 4000);
    const RunResult r = run_scenario(p);
    const double w = dissipated_energy(r.records, 1.0);
    const std::vector<StrainTarget> targets = {40.0};
    const auto dense = run_material_point(p.model, targets, 10000);
    double oracle = 0.0;
    for (std::size_t i = 1; i < dense.size(); ++i) {
      oracle += 0.5 * (dense[i].stress + dense[i - 1].stress) * (dense[i].strain - dense[i - 1].strain);
    }
    const double d = dense.back().damage;
    const double exact = potential_density(p.model, {40.0, 0, 0, d});
    CHECK(oracle == Approx(exact).epsilon(1e-4));
    CHECK(w == Approx(oracle).epsilon(1e-3));
  }
}
