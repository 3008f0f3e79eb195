#include <cmath>
#include <doctest.h>

#include "ranking.hpp"
#include "test_helpers.hpp"

using namespace edgealloc;
using namespace edgealloc::test;

namespace {

RankedGroup make_group(std::vector<std::pair<double, double>> uv) {
  RankedGroup g;
  g.task = 0;
  int id = 0;
  for (const auto& [u, v] : uv) g.entries.push_back({id++, u, v});
  return g;
}

RankedGroup random_group(Rng& rng, int max_users = 10) {
  const int n = 2 + static_cast<int>(rng.uniform() * (max_users - 1));
  std::vector<std::pair<double, double>> uv;
  for (int i = 0; i < n; ++i) {
    uv.push_back({rng.uniform(0.1, 100.0), rng.uniform(1.0, 1e4)});
  }
  std::sort(uv.begin(), uv.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });
  return make_group(std::move(uv));
}

double group_capacity(const RankedGroup& g) {
  double c = 0;
  for (const RankedEntry& e : g.entries) c += e.capacity_samples;
  return c;
}

}  // namespace

TEST_CASE("max_power_rate values and eligibility") {
  Budgets budgets{50.0, 10.0, 1.0};  // e_max >= t_max * p_max fails: 10 < 50
  Budgets eligible{50.0, 50.0, 1.0};
  const RadioParams radio = unit_radio();

  UserLink u = unit_link(1.0);  // P_max |h|^2 / sigma^2 = 1
  CHECK(max_power_rate(u, radio, eligible) == doctest::Approx(180000.0));
  CHECK_THROWS_AS(max_power_rate(u, radio, budgets), Error);
  try {
    max_power_rate(u, radio, budgets);
  } catch (const Error& e) {
    CHECK(e.status() == Status::method_ineligible);
  }

  UserLink fixed = unit_link();
  fixed.bits_per_sample = 777.0;
  fixed.fixed_rate = 10.0 * fixed.bits_per_sample;
  CHECK(max_power_rate(fixed, radio, eligible) / fixed.bits_per_sample ==
        doctest::Approx(10.0));

  UserLink dead = unit_link(0.0);
  CHECK(max_power_rate(dead, radio, eligible) == 0.0);
}

TEST_CASE("ranked groups order by rate with id tie-break and drop dead users") {
  Scenario s;
  s.radio = unit_radio();
  s.budgets = {10.0, 10.0, 1.0};
  auto add_user = [&s](const std::string& id, double gain, double d) {
    UserLink u = unit_link(gain);
    u.user_id = id;
    u.bits_per_sample = d;
    s.users.push_back(u);
  };
  add_user("b", 1.0, 100.0);
  add_user("a", 1.0, 100.0);   // ties with b, id wins
  add_user("c", 3.0, 100.0);   // highest rate
  add_user("dead", 0.0, 100.0);
  s.tasks.push_back({"t", 1.0, 0.5, 0.0, {"b", "a", "c", "dead"}});
  const ScenarioIndex index = validate_scenario(s);

  const RankedGroup g = build_ranked_group(s, index, 0);
  REQUIRE(g.entries.size() == 3);  // dead channel excluded
  CHECK(s.users[g.entries[0].user].user_id == "c");
  CHECK(s.users[g.entries[1].user].user_id == "a");
  CHECK(s.users[g.entries[2].user].user_id == "b");
  CHECK(g.entries[0].rate_samples_per_s > g.entries[1].rate_samples_per_s);
  CHECK(g.entries[1].rate_samples_per_s ==
        doctest::Approx(g.entries[2].rate_samples_per_s));
}

TEST_CASE("solve_task_times follows the greedy closed form") {
  SUBCASE("nonpositive demand allocates nothing") {
    const TaskTimeSolution sol = solve_task_times(make_group({{10, 30}, {5, 100}}), -3.0);
    CHECK(sol.feasible);
    CHECK(sol.total == 0.0);
    CHECK(sol.times == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("hand-walked two-user instance") {
    const TaskTimeSolution sol = solve_task_times(make_group({{10, 30}, {5, 100}}), 50.0);
    CHECK(sol.feasible);
    CHECK(sol.times[0] == doctest::Approx(3.0));
    CHECK(sol.times[1] == doctest::Approx(4.0));
    CHECK(sol.total == doctest::Approx(7.0));
  }
  SUBCASE("single user with ample data") {
    const TaskTimeSolution sol = solve_task_times(make_group({{10, 1000}}), 137.0);
    CHECK(sol.feasible);
    CHECK(sol.total == doctest::Approx(13.7));
  }
  SUBCASE("demand above total capacity reports infeasible") {
    const TaskTimeSolution sol = solve_task_times(make_group({{10, 30}, {5, 100}}), 131.0);
    CHECK_FALSE(sol.feasible);
  }
}

TEST_CASE("lp oracle agrees with the closed form") {
  CHECK(lp_oracle_task_times(make_group({{10, 30}, {5, 100}}), 50.0) ==
        doctest::Approx(7.0).epsilon(1e-12));
  CHECK(lp_oracle_task_times(make_group({{10, 30}}), 0.0) == 0.0);
  CHECK_THROWS_AS(lp_oracle_task_times(make_group({{10, 30}}), 31.0), Error);

  Rng rng(2025);
  for (int i = 0; i < 60; ++i) {
    const RankedGroup g = random_group(rng);
    const double demand = rng.uniform(0.05, 0.99) * group_capacity(g);
    const TaskTimeSolution greedy = solve_task_times(g, demand);
    REQUIRE(greedy.feasible);
    const double lp = lp_oracle_task_times(g, demand);
    CHECK(std::abs(greedy.total - lp) <= 1e-9 * std::max(1.0, std::abs(lp)));
  }
}

TEST_CASE("optimal times activate only below saturated higher ranks") {
  Rng rng(999);
  for (int i = 0; i < 50; ++i) {
    const RankedGroup g = random_group(rng);
    const double demand = rng.uniform(0.05, 0.99) * group_capacity(g);
    const TaskTimeSolution sol = solve_task_times(g, demand);
    REQUIRE(sol.feasible);
    for (size_t j = 1; j < g.entries.size(); ++j) {
      if (sol.times[j] > 0) {
        for (size_t h = 0; h < j; ++h) {
          const double delivered = sol.times[h] * g.entries[h].rate_samples_per_s;
          CHECK(delivered ==
                doctest::Approx(g.entries[h].capacity_samples).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("single-user time follows the inverse power relationship") {
  // t*(u) = (D/R) ((u/a)^(-1/b) - c) while the dataset cap is slack
  Scenario s;
  s.radio = unit_radio();
  s.budgets = {1e6, 1e6, 1.0};
  UserLink u = unit_link(1.0);
  u.user_id = "solo";
  u.bits_per_sample = 6276.0;
  u.dataset_size = 1e7;
  s.users = {u};
  s.tasks.push_back({"t", 7.3, 0.69, 300.0, {"solo"}});
  const ScenarioIndex index = validate_scenario(s);
  const double rate = max_power_rate(u, s.radio, s.budgets);

  for (double level = 0.02; level < 0.14; level += 0.01) {
    const TimeMinResult r = min_total_time(s, index, level);
    REQUIRE(r.feasible);
    const double expected =
        (std::pow(level / 7.3, -1.0 / 0.69) - 300.0) / (rate / 6276.0);
    CHECK(r.total == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("min_total_time composes the vehicular split") {
  const Scenario s = vehicular_scenario();
  const ScenarioIndex index = validate_scenario(s);

  SUBCASE("frozen total at the hand-picked level") {
    const TimeMinResult r = min_total_time(s, index, 0.3375);
    REQUIRE(r.feasible);
    CHECK(r.total == doctest::Approx(15.980278732888701).epsilon(1e-12));
  }
  SUBCASE("level above every historical error needs no time") {
    Scenario easy = s;
    easy.tasks[0].c = 100.0;
    easy.tasks[1].c = 100.0;
    const ScenarioIndex idx = validate_scenario(easy);
    const TimeMinResult r = min_total_time(easy, idx, 3.95);
    CHECK(r.feasible);
    CHECK(r.total == 0.0);
  }
  SUBCASE("vanishing level exhausts finite datasets") {
    const TimeMinResult r = min_total_time(s, index, 1e-6);
    CHECK_FALSE(r.feasible);
    CHECK(r.binding_task >= 0);
  }
  SUBCASE("overlapping groups are rejected") {
    Scenario overlap = s;
    overlap.allow_overlapping_groups = true;
    overlap.tasks[0].users = {"vehicle1", "vehicle2"};
    const ScenarioIndex idx = validate_scenario(overlap);
    CHECK_THROWS_AS(min_total_time(overlap, idx, 0.5), Error);
  }
}

TEST_CASE("solve_ranking reproduces the vehicular counts") {
  const Scenario s = vehicular_scenario();
  const RankingResult r = solve_ranking(s, 1e-9);
  const std::vector<double> floors = integer_samples(s, r.allocation);
  CHECK(floors[0] == 137.0);
  CHECK(floors[1] == 22.0);
  CHECK(r.allocation.time[0] == doctest::Approx(13.71531837).epsilon(1e-6));
  CHECK(r.allocation.time[1] == doctest::Approx(2.28468163).epsilon(1e-6));
  CHECK(r.trace.final_u == doctest::Approx(0.337282764648).epsilon(1e-6));
  // peak-power energies
  for (size_t k = 0; k < s.users.size(); ++k) {
    CHECK(r.allocation.energy[k] ==
          doctest::Approx(s.budgets.p_max * r.allocation.time[k]));
  }
}

TEST_CASE("solve_ranking gives the whole budget to a lone consumer") {
  Scenario s;
  s.radio = unit_radio();
  s.budgets = {50.0, 50.0, 1.0};
  UserLink u = unit_link(1.0);
  u.user_id = "solo";
  u.bits_per_sample = 1000.0;
  u.dataset_size = 1e9;
  s.users = {u};
  s.tasks.push_back({"t", 7.3, 0.69, 300.0, {"solo"}});

  const RankingResult r = solve_ranking(s, 1e-12);
  CHECK(r.allocation.time[0] == doctest::Approx(50.0).epsilon(1e-9));
  const double rate = max_power_rate(u, s.radio, s.budgets);
  const double expected_u =
      7.3 * std::pow(50.0 * rate / 1000.0 + 300.0, -0.69);
  CHECK(r.allocation.objective == doctest::Approx(expected_u).epsilon(1e-9));
}

TEST_CASE("zero time budget falls back to historical errors") {
  Scenario s;
  s.radio = unit_radio();
  s.budgets = {0.0, 1.0, 1.0};
  UserLink u = unit_link(1.0);
  u.user_id = "solo";
  s.users = {u};
  s.tasks.push_back({"t", 2.0, 0.5, 16.0, {"solo"}});

  const RankingResult r = solve_ranking(s, 1e-12);
  CHECK(r.allocation.time[0] == 0.0);
  CHECK(r.allocation.objective == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("bisection trace halves and certifies the final level") {
  const Scenario s = vehicular_scenario();
  const ScenarioIndex index = validate_scenario(s);
  const double epsilon = 1e-9;
  const RankingResult r = solve_ranking(s, epsilon);

  const BisectionTrace& trace = r.trace;
  REQUIRE(trace.history.size() > 10);
  for (size_t i = 0; i < trace.history.size(); ++i) {
    const BisectionStep& step = trace.history[i];
    CHECK(step.u_trial == doctest::Approx(0.5 * (step.u_lo + step.u_hi)));
    if (i > 0) {
      const BisectionStep& prev = trace.history[i - 1];
      CHECK(step.u_hi - step.u_lo ==
            doctest::Approx(0.5 * (prev.u_hi - prev.u_lo)).epsilon(1e-9));
    }
  }
  const BisectionStep& last = trace.history.back();
  const double width =
      last.feasible ? last.u_trial - last.u_lo : last.u_hi - last.u_trial;
  CHECK(width <= epsilon);

  // soundness: the final level is feasible, epsilon below it is not
  auto total_at = [&](double u) { return min_total_time(s, index, u); };
  const TimeMinResult at_final = total_at(trace.final_u);
  CHECK(at_final.feasible);
  CHECK(at_final.total <= s.budgets.t_max * (1 + 1e-12));
  const TimeMinResult below = total_at(trace.final_u - epsilon);
  CHECK((!below.feasible || below.total > s.budgets.t_max));
}

TEST_CASE("per-task times ignore other tasks' parameters") {
  Rng rng(512);
  const Scenario s = make_random_scenario(rng, {.eligible = true});
  if (s.tasks.size() < 2) return;
  const ScenarioIndex index = validate_scenario(s);
  const double u_trial = 0.5;

  const TimeMinResult before = min_total_time(s, index, u_trial);
  Scenario tweaked = s;
  tweaked.tasks[1].a *= 1.7;
  tweaked.tasks[1].b *= 0.8;
  const TimeMinResult after = min_total_time(tweaked, validate_scenario(tweaked), u_trial);

  for (int k : index.task_users[0]) {
    CHECK(before.user_times[k] == after.user_times[k]);
  }
}

TEST_CASE("adding a user never hurts the optimum") {
  Rng rng(606);
  for (int trial = 0; trial < 10; ++trial) {
    Scenario s = make_random_scenario(rng, {.eligible = true});
    RankingResult base;
    try {
      base = solve_ranking(s, 1e-9);
    } catch (const Error&) {
      continue;  // infeasible draw
    }
    Scenario bigger = s;
    UserLink extra = unit_link(2e-9);
    extra.user_id = "extra";
    extra.bits_per_sample = 1000.0;
    extra.dataset_size = 2000.0;
    bigger.users.push_back(extra);
    bigger.tasks[0].users.push_back("extra");
    const RankingResult more = solve_ranking(bigger, 1e-9);
    CHECK(more.allocation.objective <= base.allocation.objective + 1e-9);
  }
}

TEST_CASE("ineligible scenarios are diverted to the joint solver") {
  Rng rng(13);
  Scenario s = make_random_scenario(rng, {.eligible = true});
  s.budgets.e_max = 0.5 * s.budgets.t_max * s.budgets.p_max;
  CHECK_THROWS_AS(solve_ranking(s, 1e-9), Error);
  try {
    solve_ranking(s, 1e-9);
  } catch (const Error& e) {
    CHECK(e.status() == Status::method_ineligible);
  }
}

TEST_CASE("dead task is reported when its dataset cannot meet any level") {
  Scenario s;
  s.radio = unit_radio();
  s.budgets = {10.0, 10.0, 1.0};
  UserLink u = unit_link(1.0);
  u.user_id = "tiny";
  u.dataset_size = 0.5;  // below one sample
  s.users = {u};
  s.tasks.push_back({"starved", 3.0, 0.5, 0.0, {"tiny"}});
  try {
    solve_ranking(s, 1e-9);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.status() == Status::infeasible);
    CHECK(std::string(e.what()).find("starved") != std::string::npos);
  }
}
