#include <cmath>

#include "doctest.h"
#include "qif/games.hpp"
#include "support/instances.hpp"

using namespace qif;

namespace {

constexpr double kTol = 1e-7;

ActionDistribution random_action_distribution(const Labels& acts, std::mt19937_64& rng) {
  return test::random_prior(acts, rng);
}

ActionDistribution point_on(const Label& l) { return ActionDistribution::point(l); }

double expected_pure(const LeakageGame& g, const ActionDistribution& delta, const ActionDistribution& alpha) {
  double v = 0;
  for (const auto& [d, wd] : delta) {
    for (const auto& [a, wa] : alpha) v += wd * wa * pure_payoff(g, d, a);
  }
  return v;
}

double expected_hidden(const LeakageGame& g, const ActionDistribution& delta, const ActionDistribution& alpha) {
  double v = 0;
  for (const auto& [a, wa] : alpha) {
    if (wa > 0) v += wa * hidden_payoff(g, delta, a);
  }
  return v;
}

const ActionDistribution& behavioral_at(const BehavioralMap& m, const Label& a) {
  for (const auto& [k, d] : m) {
    if (k == a) return d;
  }
  FAIL("no behavioral entry");
  return m.front().second;
}

Label function_at(const std::vector<std::pair<Label, Label>>& f, const Label& x) {
  for (const auto& [k, v] : f) {
    if (k == x) return v;
  }
  FAIL("no function entry");
  return {};
}

// Checks the equilibrium property and the value-from-strategies identity for one kind.
void check_solution(const LeakageGame& g, const GameSolution& s, std::mt19937_64& rng) {
  switch (s.kind) {
    case GameKind::I: {
      REQUIRE(s.defender_mixed);
      REQUIRE(s.attacker_mixed);
      CHECK(std::abs(expected_pure(g, *s.defender_mixed, *s.attacker_mixed) - s.value) <= 1e-8);
      for (const auto& a : g.attacker()) CHECK(expected_pure(g, *s.defender_mixed, point_on(a)) <= s.value + kTol);
      for (const auto& d : g.defender()) CHECK(expected_pure(g, point_on(d), *s.attacker_mixed) >= s.value - kTol);
      break;
    }
    case GameKind::II: {
      REQUIRE(s.defender_pure);
      REQUIRE(s.attacker_function);
      REQUIRE(s.attacker_behavioral);
      CHECK(std::abs(pure_payoff(g, *s.defender_pure, function_at(*s.attacker_function, *s.defender_pure)) - s.value) <= 1e-8);
      for (const auto& d : g.defender()) {
        // follower best-responds; the leader's alternatives are no better
        const Label reply = function_at(*s.attacker_function, d);
        double best = -1;
        for (const auto& a : g.attacker()) best = std::max(best, pure_payoff(g, d, a));
        CHECK(pure_payoff(g, d, reply) >= best - kTol);
        CHECK(best >= s.value - kTol);
        CHECK(expected_pure(g, point_on(d), behavioral_at(*s.attacker_behavioral, d)) == doctest::Approx(pure_payoff(g, d, reply)));
      }
      break;
    }
    case GameKind::III: {
      REQUIRE(s.attacker_pure);
      REQUIRE(s.defender_function);
      CHECK(std::abs(pure_payoff(g, function_at(*s.defender_function, *s.attacker_pure), *s.attacker_pure) - s.value) <= 1e-8);
      for (const auto& a : g.attacker()) {
        const Label reply = function_at(*s.defender_function, a);
        double best = 2e9;
        for (const auto& d : g.defender()) best = std::min(best, pure_payoff(g, d, a));
        CHECK(pure_payoff(g, reply, a) <= best + kTol);
        CHECK(best <= s.value + kTol);
      }
      break;
    }
    case GameKind::IV:
    case GameKind::V: {
      REQUIRE(s.defender_mixed);
      REQUIRE(s.attacker_mixed);
      CHECK(std::abs(expected_hidden(g, *s.defender_mixed, *s.attacker_mixed) - s.value) <= 1e-8);
      for (const auto& a : g.attacker()) CHECK(hidden_payoff(g, *s.defender_mixed, a) <= s.value + kTol);
      for (const auto& d : g.defender()) CHECK(expected_hidden(g, point_on(d), *s.attacker_mixed) >= s.value - kTol);
      for (int k = 0; k < 5; ++k) {
        CHECK(expected_hidden(g, random_action_distribution(g.defender(), rng), *s.attacker_mixed) >= s.value - kTol);
      }
      break;
    }
    case GameKind::VIMixed: {
      REQUIRE(s.defender_function_mixture);
      REQUIRE(s.defender_behavioral);
      REQUIRE(s.attacker_pure);
      double worst = -1;
      for (const auto& a : g.attacker()) {
        const double f = function_mixture_payoff(g, *s.defender_function_mixture, a);
        worst = std::max(worst, f);
        CHECK(std::abs(f - hidden_payoff(g, behavioral_at(*s.defender_behavioral, a), a)) <= 1e-9);
      }
      CHECK(std::abs(worst - s.value) <= 1e-8);
      CHECK(std::abs(function_mixture_payoff(g, *s.defender_function_mixture, *s.attacker_pure) - s.value) <= 1e-8);
      break;
    }
    case GameKind::VIBehavioral: {
      REQUIRE(s.defender_behavioral);
      REQUIRE(s.attacker_pure);
      REQUIRE(s.per_attacker_values);
      double best = -1;
      for (const auto& [a, v] : *s.per_attacker_values) {
        best = std::max(best, v);
        const auto& delta = behavioral_at(*s.defender_behavioral, a);
        CHECK(std::abs(hidden_payoff(g, delta, a) - v) <= 1e-8);
        for (const auto& d : g.defender()) CHECK(hidden_payoff(g, point_on(d), a) >= v - kTol);
        for (int k = 0; k < 3; ++k) CHECK(hidden_payoff(g, random_action_distribution(g.defender(), rng), a) >= v - kTol);
      }
      CHECK(std::abs(best - s.value) <= 1e-8);
      break;
    }
  }
}

LeakageGame identical_channel_game(const Channeld& c, const Priord& pi, int nd, int na) {
  ChannelMap cs;
  const Labels ds = test::numbered("d", nd);
  const Labels as = test::numbered("a", na);
  for (const auto& d : ds) {
    for (const auto& a : as) cs.emplace(std::make_pair(d, a), c);
  }
  return LeakageGame(ds, as, pi, VulnMeasured::bayes(), std::move(cs));
}

}  // namespace

TEST_CASE("game construction checks") {
  const auto g = test::running_example();
  ChannelMap partial;
  partial.emplace(std::make_pair(Label("0"), Label("0")), test::running_channel(0, 0));
  CHECK_THROWS_AS(LeakageGame(g.defender(), g.attacker(), g.prior(), g.measure(), partial), Error);
  CHECK_THROWS_AS(pure_payoff(g, "7", "0"), Error);
  try {
    g.channel("0", "9");
    FAIL("expected UnknownAction");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownAction);
  }
  CHECK(parse_game_kind("VI-mixed") == GameKind::VIMixed);
  for (auto k : kAllGameKinds) CHECK(parse_game_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_game_kind("VII"), Error);
}

TEST_CASE("running example: pure payoffs") {
  const auto g = test::running_example();
  CHECK(pure_payoff(g, "0", "0") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pure_payoff(g, "0", "1") == doctest::Approx(1).epsilon(1e-12));
  CHECK(pure_payoff(g, "1", "0") == doctest::Approx(1).epsilon(1e-12));
  CHECK(pure_payoff(g, "1", "1") == doctest::Approx(2.0 / 3).epsilon(1e-12));
  const auto t = payoff_table(g);
  CHECK(t.at("1", "1") == doctest::Approx(2.0 / 3));
}

TEST_CASE("running example: every kind") {
  const auto g = test::running_example();
  std::mt19937_64 rng(1);

  const auto i = solve(g, GameKind::I);
  CHECK(i.value == doctest::Approx(0.8).epsilon(1e-10));
  CHECK((*i.defender_mixed)("0") == doctest::Approx(0.4).epsilon(1e-10));
  CHECK((*i.attacker_mixed)("0") == doctest::Approx(0.4).epsilon(1e-10));

  const auto ii = solve(g, GameKind::II);
  CHECK(ii.value == doctest::Approx(1).epsilon(1e-12));

  const auto iii = solve(g, GameKind::III);
  CHECK(iii.value == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(*iii.attacker_pure == Label("1"));
  CHECK(function_at(*iii.defender_function, "1") == Label("1"));

  const auto iv = solve(g, GameKind::IV);
  CHECK(iv.value == doctest::Approx(5.0 / 7).epsilon(1e-10));
  CHECK((*iv.defender_mixed)("0") == doctest::Approx(4.0 / 7).epsilon(1e-9));
  CHECK((*iv.attacker_mixed)("0") == doctest::Approx(4.0 / 7).epsilon(1e-9));

  const auto v = solve(g, GameKind::V);
  CHECK(v.value == iv.value);
  CHECK_FALSE(v.notes.empty());

  // Minimum over D(A -> D) of the max over a; each a's marginal is free, so
  // this matches the behavioral value.
  const auto vim = solve(g, GameKind::VIMixed);
  CHECK(vim.value == doctest::Approx(0.5).epsilon(1e-10));

  const auto vib = solve(g, GameKind::VIBehavioral);
  CHECK(vib.value == doctest::Approx(0.5).epsilon(1e-10));
  REQUIRE(vib.per_attacker_values);
  for (const auto& [a, val] : *vib.per_attacker_values) CHECK(val == doctest::Approx(0.5).epsilon(1e-10));
  // a = 0 gives 1 - p/2, minimized at p = 1; a = 1 has its kink at p = 1/4.
  CHECK(behavioral_at(*vib.defender_behavioral, "0")("0") == doctest::Approx(1).epsilon(1e-9));
  CHECK(behavioral_at(*vib.defender_behavioral, "1")("0") == doctest::Approx(0.25).epsilon(1e-9));

  for (auto k : kAllGameKinds) check_solution(g, solve(g, k), rng);
}

TEST_CASE("running example: Game IV strategies are unique") {
  // Perturbing the payoffs slightly moves the equilibrium only slightly.
  const auto g = test::running_example();
  const auto base = solve(g, GameKind::IV);
  Eigen::MatrixXd m(2, 2);
  m << 1.0 / 3 + 1e-4, 2.0 / 3 - 1e-4, 2.0 / 3, 1.0 / 3;
  const auto perturbed = solve(g.with_channel("1", "1", Channeld(make_labels({"0", "1"}), make_labels({"0", "1"}), m)), GameKind::IV);
  CHECK(std::abs((*perturbed.defender_mixed)("0") - (*base.defender_mixed)("0")) < 1e-2);
  CHECK(std::abs((*perturbed.attacker_mixed)("0") - (*base.attacker_mixed)("0")) < 1e-2);
}

TEST_CASE("running example: behavioral marginals of a function mixture") {
  const auto g = test::running_example();
  // sigma with marginal 6/7 on d = 0 at a = 0 and 1/7 at a = 1
  const FunctionMixture sigma{{make_labels({"0", "0"}), 1.0 / 7}, {make_labels({"0", "1"}), 5.0 / 7}, {make_labels({"1", "1"}), 1.0 / 7}};
  const auto phi = mixed_to_behavioral(sigma, g.attacker(), g.defender());
  CHECK(behavioral_at(phi, "0")("0") == doctest::Approx(6.0 / 7));
  CHECK(behavioral_at(phi, "1")("0") == doctest::Approx(1.0 / 7));
  for (const auto& a : g.attacker()) {
    CHECK(function_mixture_payoff(g, sigma, a) == doctest::Approx(hidden_payoff(g, behavioral_at(phi, a), a)).epsilon(1e-12));
  }
  // a point mass on a constant function
  const auto constant = mixed_to_behavioral({{make_labels({"1", "1"}), 1.0}}, g.attacker(), g.defender());
  for (const auto& a : g.attacker()) CHECK(behavioral_at(constant, a)("1") == 1);
  CHECK_THROWS_AS(mixed_to_behavioral({{make_labels({"1"}), 1.0}}, g.attacker(), g.defender()), Error);
}

TEST_CASE("property: function mixtures and their marginals agree") {
  std::mt19937_64 rng(401);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = test::random_game(rng, 2, 2, 2 + static_cast<int>(rng() % 2), trial % 2 == 1);
    FunctionMixture sigma;
    std::vector<double> w = {0, 0, 0, 0};
    std::gamma_distribution<double> gamma(1, 1);
    double total = 0;
    for (auto& x : w) total += (x = gamma(rng));
    const Labels& ds = g.defender();
    sigma = {{{ds[0], ds[0]}, w[0] / total}, {{ds[0], ds[1]}, w[1] / total}, {{ds[1], ds[0]}, w[2] / total}, {{ds[1], ds[1]}, w[3] / total}};
    const auto phi = mixed_to_behavioral(sigma, g.attacker(), g.defender());
    for (const auto& a : g.attacker()) {
      CHECK(std::abs(function_mixture_payoff(g, sigma, a) - hidden_payoff(g, behavioral_at(phi, a), a)) <= 1e-12);
    }
  }
}

TEST_CASE("hierarchy: running example") {
  const auto r = audit_hierarchy(test::running_example());
  CHECK(r.ok);
  CHECK(r.checks.size() == 7);
  CHECK(r.value(GameKind::II) == doctest::Approx(1));
  CHECK(r.value(GameKind::I) == doctest::Approx(0.8));
  CHECK(r.value(GameKind::III) == doctest::Approx(2.0 / 3));
  CHECK(r.value(GameKind::IV) == doctest::Approx(5.0 / 7));
  CHECK(r.value(GameKind::V) == doctest::Approx(5.0 / 7));
  CHECK(r.value(GameKind::VIBehavioral) == doctest::Approx(0.5));
}

TEST_CASE("hierarchy: identical channels give one value") {
  std::mt19937_64 rng(402);
  const Labels xs = test::numbered("x", 3);
  const auto pi = test::random_prior(xs, rng);
  const auto c = test::random_channel(xs, test::numbered("y", 3), rng);
  const auto r = audit_hierarchy(identical_channel_game(c, pi, 2, 3));
  CHECK(r.ok);
  const double expect = posterior_vuln(VulnMeasured::bayes(), pi, c);
  for (auto k : kAllGameKinds) CHECK(r.value(k) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("III and IV are not ordered") {
  const auto g = test::running_example();
  const auto r = audit_hierarchy(g);
  CHECK(r.value(GameKind::III) < r.value(GameKind::IV) - 1e-3);

  // C11 replaced by C10: attacker-first now beats the hidden simultaneous game.
  const auto w = g.with_channel("1", "1", test::running_channel(1, 0));
  const auto rw = audit_hierarchy(w);
  CHECK(rw.ok);
  CHECK(rw.value(GameKind::III) == doctest::Approx(1));
  CHECK(rw.value(GameKind::IV) == doctest::Approx(2.0 / 3).epsilon(1e-9));
  const auto iv = solve(w, GameKind::IV);
  CHECK((*iv.defender_mixed)("0") == doctest::Approx(2.0 / 3).epsilon(1e-9));
  CHECK((*iv.attacker_mixed)("0") == doctest::Approx(2.0 / 3).epsilon(1e-9));

  // The literal C11 := C01 substitution ties III and IV at 1.
  const auto lit = audit_hierarchy(g.with_channel("1", "1", test::running_channel(0, 1)));
  CHECK(lit.value(GameKind::III) == doctest::Approx(1));
  CHECK(lit.value(GameKind::IV) == doctest::Approx(1));
}

TEST_CASE("hidden-choice typing is enforced") {
  const auto g = test::running_example();
  const Channeld odd(make_labels({"0", "1"}), make_labels({"p", "q"}), Eigen::MatrixXd::Identity(2, 2));
  const auto bad = g.with_channel("1", "0", odd);
  CHECK_NOTHROW(solve(bad, GameKind::I));
  CHECK_NOTHROW(solve(bad, GameKind::III));
  for (auto k : {GameKind::IV, GameKind::V, GameKind::VIMixed, GameKind::VIBehavioral}) {
    try {
      solve(bad, k);
      FAIL("expected TypeMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::TypeMismatch);
    }
  }
}

TEST_CASE("VI-mixed refuses oversized function spaces") {
  std::mt19937_64 rng(403);
  const auto g = test::random_game(rng, 3, 3, 2, false);
  SolveOptions opt;
  opt.vi_cap = 26;
  try {
    solve(g, GameKind::VIMixed, opt);
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooLarge);
  }
  opt.vi_cap = 27;
  CHECK_NOTHROW(solve(g, GameKind::VIMixed, opt));
}

TEST_CASE("property: random games satisfy every equilibrium check and the hierarchy") {
  std::mt19937_64 rng(404);
  int failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int nd = 2 + static_cast<int>(rng() % 2);
    const int na = 2 + static_cast<int>(rng() % 2);
    const int nx = 2 + static_cast<int>(rng() % 3);
    const auto g = test::random_game(rng, nd, na, nx, trial % 2 == 1);
    const auto r = audit_hierarchy(g);
    if (!r.ok) ++failures;
    for (const auto& c : r.checks) {
      CAPTURE(trial);
      CAPTURE(std::string(to_string(c.lhs)));
      CAPTURE(std::string(to_string(c.rhs)));
      CHECK(c.ok);
    }
    for (const auto& s : r.solutions) check_solution(g, s, rng);
    CHECK(r.value(GameKind::I) >= r.value(GameKind::IV) - kTol);
    CHECK(r.value(GameKind::VIMixed) >= r.value(GameKind::VIBehavioral) - kTol);

    // visible choice is never worse for the attacker than hidden choice
    for (int k = 0; k < 3; ++k) {
      const auto delta = random_action_distribution(g.defender(), rng);
      for (const auto& a : g.attacker()) CHECK(visible_payoff(g, delta, a) >= hidden_payoff(g, delta, a) - 1e-9);
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("property: 200 random 2x2 Bayes games keep the order") {
  std::mt19937_64 rng(405);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = test::random_game(rng, 2, 2, 2 + static_cast<int>(rng() % 3), false);
    CHECK(audit_hierarchy(g).ok);
  }
}
