#include <doctest.h>

#include <random>

#include "planar_ot/duals.hpp"
#include "planar_ot/solver.hpp"
#include "support.hpp"

using namespace planar_ot;
using planar_ot::testing::instance;

TEST_CASE("init duals by the min rules") {
  const auto same = instance(Metric::euclid, {{{0, 0}, 1}}, {{{0, 0}, 1}});
  const auto d0 = init_duals(same);
  CHECK(d0.alpha == std::vector<double>{0});
  CHECK(d0.beta == std::vector<double>{0});

  const auto sq = instance(Metric::sq_euclid, {{{0, 0}, 1}, {{2, 0}, 1}}, {{{1, 0}, 2}});
  const auto d1 = init_duals(sq);
  CHECK(d1.alpha == std::vector<double>{1, 1});
  CHECK(d1.beta == std::vector<double>{0});
  CHECK(slack(d1, sq.metric, sq, 0, 0) == 0);
  CHECK(slack(d1, sq.metric, sq, 1, 0) == 0);

  const auto l1 = instance(Metric::l1, {{{0, 0}, 2}}, {{{1, 0}, 1}, {{5, 0}, 1}});
  const auto d2 = init_duals(l1);
  CHECK(d2.alpha == std::vector<double>{1});
  CHECK(d2.beta == std::vector<double>{0, 4});
  const DualContext ctx(l1, d2, Tolerance::exact_mode());
  CHECK(ctx.is_admissible(0, 0));
  CHECK(ctx.is_admissible(0, 1));
  CHECK_FALSE(ctx.is_low(0, 1));
}

TEST_CASE("slack and tolerance predicates") {
  const auto inst = instance(Metric::sq_euclid, {{{0, 0}, 1}}, {{{3, 4}, 1}});
  DualState zero{{0}, {0}};
  CHECK(slack(zero, inst.metric, inst, 0, 0) == 25);

  const Tolerance exact = Tolerance::exact_mode();
  const Tolerance fl = Tolerance::float_mode(1e-9);
  CHECK(is_admissible_slack(0, exact));
  CHECK_FALSE(is_admissible_slack(3, exact));
  CHECK(is_admissible_slack(1e-12, fl));
  CHECK_FALSE(is_admissible_slack(1e-12, exact));
  CHECK(is_low_slack(3, exact));
  CHECK_FALSE(is_low_slack(0, exact));
  CHECK_FALSE(is_low_slack(1e-12, fl));
  CHECK(fl.margin == doctest::Approx(1e-8));

  DualState broken{{30}, {0}};
  const DualContext ctx(inst, broken, exact);
  CHECK_THROWS_AS((void)ctx.is_admissible(0, 0), FeasibilityError);
}

TEST_CASE("lower sinks") {
  // slacks 2 and 5 with zero duals under L1
  const auto inst = instance(Metric::l1, {{{0, 0}, 2}}, {{{2, 0}, 1}, {{5, 0}, 1}});
  DualState zero{{0}, {0, 0}};
  const DualContext ctx(inst, zero, Tolerance::exact_mode());
  const std::size_t two = *inst.sink.find({2, 0});
  const std::size_t five = *inst.sink.find({5, 0});
  CHECK(ctx.is_lower(0, two, five));
  CHECK_FALSE(ctx.is_lower(0, five, two));
  CHECK(ctx.is_strictly_lower(0, two, five));

  const auto tie = instance(Metric::l1, {{{0, 0}, 2}}, {{{2, 0}, 1}, {{0, 2}, 1}});
  DualState tz{{0}, {0, 0}};
  const DualContext tctx(tie, tz, Tolerance::exact_mode());
  CHECK(tctx.is_lower(0, 0, 1));
  CHECK_FALSE(tctx.is_strictly_lower(0, 0, 1));

  DualState adm{{0}, {2, 0}};
  const DualContext actx(inst, adm, Tolerance::exact_mode());
  CHECK_THROWS_AS((void)actx.is_lower(0, two, five), PreconditionError);
}

TEST_CASE("arithmetic choice") {
  CHECK(choose_arithmetic(instance(Metric::l1, {{{0, 0}, 1}}, {{{1, 1}, 1}})).exact_costs);
  CHECK_FALSE(choose_arithmetic(instance(Metric::euclid, {{{0, 0}, 1}}, {{{1, 1}, 1}})).exact_costs);
  CHECK_FALSE(choose_arithmetic(instance(Metric::l1, {{{0.5, 0}, 1}}, {{{1, 1}, 1}})).exact_costs);
  CHECK_FALSE(choose_arithmetic(instance(Metric::l1, {{{0, 0}, 0.5}}, {{{1, 1}, 0.5}})).exact_masses);
  CHECK_FALSE(choose_arithmetic(instance(Metric::sq_euclid, {{{3e7, 0}, 1}}, {{{1, 1}, 1}})).exact_costs);
}

TEST_CASE("transport plan bookkeeping") {
  TransportPlan plan(2, 3);
  plan.add(0, 2, 1.5);
  plan.add(1, 2, 2);
  plan.add(0, 1, 1);
  CHECK(plan.flow(0, 2) == 1.5);
  CHECK(plan.shipped(0) == 2.5);
  CHECK(plan.received(2) == 3.5);
  CHECK(plan.total_shipped() == 4.5);
  plan.add(0, 2, -1.5);
  CHECK(plan.flow(0, 2) == 0);
  CHECK(plan.out_flows(0).size() == 1);
  CHECK(plan.in_flows(2).size() == 1);
  plan.add(0, 1, -1 + 1e-15, 1e-12);
  CHECK(plan.out_flows(0).empty());
  const auto arcs = plan.arcs();
  REQUIRE(arcs.size() == 1);
  CHECK(arcs[0] == TransportPlan::Arc{1, 2, 2});
}

TEST_CASE("decimal text of wide integers") {
  CHECK(to_decimal(0) == "0");
  CHECK(to_decimal(-42) == "-42");
  CHECK(to_decimal(static_cast<__int128>(1) << 100) == "1267650600228229401496703205376");
}

TEST_CASE("certificate") {
  const auto inst = instance(Metric::sq_euclid, {{{0, 0}, 2}, {{1, 0}, 1}}, {{{0, 1}, 1}, {{2, 0}, 2}});
  const auto r = solve(inst);
  const auto good = verify_optimality(inst, r.plan, r.duals, r.tolerance);
  CHECK(good.ok());
  CHECK(good.primal_value == r.value_text);
  CHECK(good.dual_value == r.value_text);

  DualState bumped = r.duals;
  bumped.alpha[0] += 1;
  const auto bad = verify_optimality(inst, r.plan, bumped, r.tolerance);
  CHECK_FALSE(bad.ok());
  CHECK_FALSE(bad.messages.empty());

  // a positive flow on a slack-positive arc
  TransportPlan plan(1, 2);
  const auto two = instance(Metric::l1, {{{0, 0}, 2}}, {{{1, 0}, 1}, {{3, 0}, 1}});
  plan.add(0, 0, 1);
  plan.add(0, 1, 1);
  DualState d{{1}, {0, 0}};
  const auto cs = verify_optimality(two, plan, d, Tolerance::exact_mode());
  CHECK(cs.primal_feasible);
  CHECK(cs.dual_feasible);
  CHECK_FALSE(cs.complementary_slackness);

  TransportPlan partial(1, 2);
  partial.add(0, 0, 1);
  CHECK_FALSE(verify_optimality(two, partial, d, Tolerance::exact_mode()).primal_feasible);
}

TEST_CASE("init duals are feasible and every node has an admissible arc") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 150; ++k) {
    const Metric metric = planar_ot::testing::kMetrics[k % 3];
    const auto layout = metric == Metric::euclid && k % 2 ? InstanceGenSpec::Layout::continuous
                                                          : InstanceGenSpec::Layout::scattered;
    const auto inst = planar_ot::testing::random_small(rng, metric, 25, layout);
    const auto d = init_duals(inst);
    const Tolerance tol = has_integer_costs(metric) ? Tolerance::exact_mode() : Tolerance::float_mode(1e-9);
    const DualContext ctx(inst, d, tol);
    std::vector<char> sink_ok(inst.sink.size(), 0);
    for (std::size_t i = 0; i < inst.source.size(); ++i) {
      bool any = false;
      for (std::size_t x = 0; x < inst.sink.size(); ++x) {
        CHECK(ctx.slack(i, x) >= -tol.eps);
        if (ctx.is_admissible(i, x)) {
          any = true;
          sink_ok[x] = 1;
        }
      }
      CHECK(any);
    }
    CHECK(std::all_of(sink_ok.begin(), sink_ok.end(), [](char c) { return c != 0; }));
  }
}
