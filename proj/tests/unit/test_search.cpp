#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "seqlab/construct.hpp"
#include "seqlab/errors.hpp"
#include "seqlab/rng.hpp"
#include "seqlab/search.hpp"

using namespace seqlab;

namespace {

// Every permutation, checked directly from partial sums.
bool brute_force_exists(const Group& g, std::vector<Element> set, std::size_t t, bool alternating) {
  std::sort(set.begin(), set.end());
  do {
    bool ok = true;
    if (alternating)
      for (std::size_t i = 1; i < set.size() && ok; ++i) ok = set[i].parity != set[i - 1].parity;
    std::vector<Element> s{g.identity()};
    for (const auto& y : set) s.push_back(g.op(s.back(), y));
    for (std::size_t i = 0; i < s.size() && ok; ++i)
      for (std::size_t j = i + 1; j < s.size() && j - i <= t && ok; ++j) ok = !(s[i] == s[j]);
    if (ok) return true;
  } while (std::next_permutation(set.begin(), set.end()));
  return false;
}

mpz_class choose(unsigned long n, unsigned long k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

mpq_class canonical(mpq_class q) {
  q.canonicalize();
  return q;
}

}  // namespace

TEST_CASE("backtracking finds a verified ordering") {
  const auto g = parse_group_spec("zpxz2:5");
  const std::vector<Element> s{{2, 1}, {3, 1}, {1, 0}, {4, 0}};
  const auto found = find_sequencing_backtrack(g, s, 3, OrderingClass::alternating);
  REQUIRE(found.has_value());
  CHECK(check_t_weak(*found, 3).empty());
  CHECK(is_alternating(*found).alternating);

  CHECK_THROWS_AS(find_sequencing_backtrack(g, std::vector<Element>{{0, 0}, {1, 1}}, 1, OrderingClass::any),
                  PreconditionError);
  CHECK_THROWS_AS(find_sequencing_backtrack(g, std::vector<Element>{{1, 0}, {2, 0}}, 1, OrderingClass::alternating),
                  PreconditionError);
}

TEST_CASE("no sequencing is certified by exhaustion") {
  const auto g = parse_group_spec("cyclic:4");
  const std::vector<Element> s{{1, 0}, {3, 0}};
  CHECK_FALSE(find_sequencing_backtrack(g, s, 2, OrderingClass::any).has_value());
  CHECK_FALSE(brute_force_exists(g, s, 2, false));
  CHECK(find_sequencing_backtrack(g, s, 1, OrderingClass::any).has_value());
}

TEST_CASE("backtracking agrees with brute force") {
  Rng rng(42);
  for (const char* spec : {"cyclic:8", "cyclic:9", "dihedral:10", "zpxz2:5", "semidirect:cyclic:8:u=3"}) {
    const auto g = parse_group_spec(spec);
    std::vector<Element> pool;
    for (const auto& e : g.elements())
      if (!(e == g.identity())) pool.push_back(e);
    for (int trial = 0; trial < 60; ++trial) {
      rng.shuffle(std::span(pool));
      const auto k = static_cast<std::size_t>(2 + rng.below(5));
      std::vector<Element> s(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
      const auto t = static_cast<std::size_t>(1 + rng.below(k));
      const auto found = find_sequencing_backtrack(g, s, t, OrderingClass::any);
      REQUIRE(found.has_value() == brute_force_exists(g, s, t, false));
      if (found) REQUIRE(check_t_weak(*found, t).empty());
      if (g.has_parity() && set_type(g, s).balanced()) {
        const auto alt = find_sequencing_backtrack(g, s, t, OrderingClass::alternating);
        REQUIRE(alt.has_value() == brute_force_exists(g, s, t, true));
      }
    }
  }
}

TEST_CASE("balanced subset enumeration") {
  CHECK(BalancedSubsets(parse_group_spec("zpxz2:5"), 8).count() == 5);
  CHECK(BalancedSubsets(parse_group_spec("dihedral:14"), 6).count() == 700);
  CHECK_THROWS_AS(BalancedSubsets(parse_group_spec("dihedral:14"), 5), PreconditionError);
  CHECK_THROWS_AS(BalancedSubsets(parse_group_spec("dihedral:10"), 10), PreconditionError);
  CHECK_THROWS_AS(BalancedSubsets(parse_group_spec("cyclic:10"), 4), PreconditionError);

  for (const char* spec : {"dihedral:10", "zpxz2:7"}) {
    const auto g = parse_group_spec(spec);
    for (std::size_t k : {2, 4, 6}) {
      const BalancedSubsets subsets(g, k);
      const auto n = g.inner_order();
      CHECK(subsets.count() == choose(n - 1, k / 2) * choose(n, k / 2));
      std::vector<std::vector<Element>> seen;
      subsets.for_each(0, subsets.count().get_ui(), [&](std::span<const Element> s) {
        seen.emplace_back(s.begin(), s.end());
        return true;
      });
      REQUIRE(seen.size() == subsets.count().get_ui());
      CHECK(std::is_sorted(seen.begin(), seen.end()));
      CHECK(std::set<std::vector<Element>>(seen.begin(), seen.end()).size() == seen.size());
      for (std::size_t r = 0; r < seen.size(); r += 7) {
        CHECK(subsets.unrank(r) == seen[r]);
        CHECK(set_type(g, seen[r]) == TypeVector{k / 2, k / 2});
      }
    }
  }
}

TEST_CASE("verify-all examples") {
  VerifyAllOptions o;
  o.t = 4;
  auto r = verify_all(parse_group_spec("dihedral:10"), 8, o);
  CHECK(r.subsets_checked == 5);
  CHECK(r.failures.empty());

  o.t = 3;
  r = verify_all(parse_group_spec("zpxz2:5"), 4, o);
  CHECK(r.subsets_checked == 60);
  CHECK(r.failures.empty());

  o.t = 1;
  r = verify_all(parse_group_spec("dihedral:10"), 2, o);
  CHECK(r.subsets_checked == 20);
  CHECK(r.failures.empty());
}

TEST_CASE("verify-all reports exactly the failing subsets") {
  const auto g = parse_group_spec("dihedral:14");
  VerifyAllOptions o;
  o.t = 3;
  // fail every subset containing (1,0)
  auto check = [](const Group&, std::span<const Element> s) {
    return std::find(s.begin(), s.end(), Element{1, 0}) == s.end();
  };
  const auto r = verify_all(g, 4, o, check, "custom");
  CHECK(r.method == "custom");
  CHECK(r.subsets_checked == 315);
  CHECK(r.failures.size() == 5 * 21);  // C(5,1) other evens times C(7,2) odd pairs
  CHECK(std::is_sorted(r.failures.begin(), r.failures.end()));
}

TEST_CASE("jobs do not change reports") {
  const auto g = parse_group_spec("dihedral:14");
  auto check = [](const Group& grp, std::span<const Element> s) {
    return find_sequencing_backtrack(grp, s, 5, OrderingClass::alternating).has_value();
  };
  VerifyAllOptions a;
  a.t = 5;
  a.jobs = 1;
  VerifyAllOptions b = a;
  b.jobs = 4;
  const auto r1 = verify_all(g, 6, a, check);
  const auto r4 = verify_all(g, 6, b, check);
  CHECK(r1.subsets_checked == r4.subsets_checked);
  CHECK(r1.failures == r4.failures);

  a.sample = 50;
  a.seed = 9;
  b.sample = 50;
  b.seed = 9;
  const auto s1 = verify_all(parse_group_spec("dihedral:46"), 8, a);
  const auto s4 = verify_all(parse_group_spec("dihedral:46"), 8, b);
  CHECK(s1.sampled);
  CHECK(s1.subsets_checked == 50);
  CHECK(s1.failures == s4.failures);
}

TEST_CASE("enumeration cap") {
  VerifyAllOptions o;
  o.t = 2;
  o.cap = 100;
  CHECK_THROWS_AS(verify_all(parse_group_spec("dihedral:14"), 6, o), PreconditionError);
  o.sample = 10;
  CHECK(verify_all(parse_group_spec("dihedral:14"), 6, o).subsets_checked == 10);
}

TEST_CASE("passing at t implies passing at t - 1") {
  const auto g = parse_group_spec("zpxz2:5");
  for (std::size_t t = 5; t >= 2; --t) {
    VerifyAllOptions o;
    o.t = t;
    if (verify_all(g, 6, o).failures.empty()) {
      o.t = t - 1;
      CHECK(verify_all(g, 6, o).failures.empty());
    }
  }
}

TEST_CASE("closed-form bounds") {
  // t^2/l + t(l+t)/l * (1 - (l-t+1)^t/(l+t)^t) at t = 2, l = 100
  const mpq_class expect = mpq_class(4, 100) + mpq_class(204, 100) * (1 - mpq_class(99 * 99, 102 * 102));
  const auto plain = bound_E({2, 100, BoundVariant::plain});
  CHECK(plain == canonical(expect));
  CHECK(std::abs(plain.get_d() - 0.1582) < 1e-4);

  CHECK(bound_E({0, 10, BoundVariant::balanced}) == 0);
  // 2t^2/(l+2) + 2t(l+t+2)/(l+2) * (1 - (l-t)^t/(l+t+2)^t) at t = 2, l = 20
  const mpq_class bal = mpq_class(8, 22) + mpq_class(96, 22) * (1 - mpq_class(18 * 18, 24 * 24));
  CHECK(bound_E({2, 20, BoundVariant::balanced}) == canonical(bal));

  for (int t = 1; t <= 8; ++t) CHECK(bound_E({t, 1'000'000, BoundVariant::plain}) < 1);
  // decreasing in l
  CHECK(bound_E({3, 1000, BoundVariant::plain}) < bound_E({3, 100, BoundVariant::plain}));

  CHECK_THROWS_AS(bound_E({3, 3, BoundVariant::plain}), PreconditionError);
  CHECK_THROWS_AS(bound_E({2, 21, BoundVariant::balanced}), PreconditionError);
}

TEST_CASE("estimator: zero-sum-free instance has no collisions") {
  const auto g = parse_group_spec("cyclic:11");
  const std::vector<Element> s{{1, 0}, {2, 0}, {3, 0}};
  const auto r = estimate_collision_expectation(g, s, s, {}, 3, 500, 1, BoundVariant::plain, 1);
  CHECK(r.mean == 0);
  CHECK(r.zero_collision_samples == 500);
}

TEST_CASE("estimator: exact expectation on a small instance") {
  // cyclic:5, S = {1, 4, 2}, t = 2: the only collision is a window summing
  // to zero, i.e. 1 and 4 adjacent, in 4 of the 6 orderings.
  const auto g = parse_group_spec("cyclic:5");
  const std::vector<Element> s{{1, 0}, {4, 0}, {2, 0}};
  const auto r = estimate_collision_expectation(g, s, {}, {}, 2, 60000, 3, BoundVariant::plain, 1);
  CHECK(std::abs(r.mean - 4.0 / 6.0) < 5 * r.std_error);
  CHECK(r.max_collisions == 1);
}

TEST_CASE("estimator determinism and preconditions") {
  const auto g = parse_group_spec("dihedral:22");
  const auto attempt = make_estimate_instance(g, 2, 10, BoundVariant::plain, 4);
  REQUIRE(attempt.instance.has_value());
  const auto& in = *attempt.instance;
  const auto a = estimate_collision_expectation(g, in.set, in.reserved, in.prefix, 2, 10000, 17, BoundVariant::plain, 1);
  const auto b = estimate_collision_expectation(g, in.set, in.reserved, in.prefix, 2, 10000, 17, BoundVariant::plain, 3);
  CHECK(a.mean == b.mean);
  CHECK(a.stddev == b.stddev);
  CHECK(a.max_collisions == b.max_collisions);
  const auto bound = bound_E({2, 10, BoundVariant::plain}).get_d();
  CHECK(a.mean <= bound + 3 * a.std_error);

  // a reserved set with a zero sum is rejected
  const std::vector<Element> bad{{1, 0}, {10, 0}};
  std::vector<Element> set = in.set;
  for (const auto& e : bad)
    if (std::find(set.begin(), set.end(), e) == set.end()) set.push_back(e);
  CHECK_THROWS_AS(estimate_collision_expectation(g, set, bad, {}, 2, 10, 1, BoundVariant::plain, 1), PreconditionError);
  // a prefix with a conflict is rejected
  CHECK_THROWS_AS(estimate_collision_expectation(g, set, {}, bad, 2, 10, 1, BoundVariant::plain, 1), PreconditionError);
  CHECK_THROWS_AS(estimate_collision_expectation(g, in.set, in.reserved, in.prefix, 2, 0, 1, BoundVariant::plain, 1),
                  PreconditionError);
}

TEST_CASE("estimator: balanced instance in dihedral:22 stays under the bound") {
  const auto g = parse_group_spec("dihedral:22");
  for (std::size_t t : {2, 3}) {
    const auto attempt = make_estimate_instance(g, t, 6, BoundVariant::balanced, 2);
    REQUIRE(attempt.instance.has_value());
    const auto& in = *attempt.instance;
    const auto r = estimate_collision_expectation(g, in.set, in.reserved, in.prefix, t, 10000, 5,
                                                  BoundVariant::balanced, 1);
    const auto bound = bound_E({static_cast<int>(t), 6, BoundVariant::balanced}).get_d();
    CHECK(r.mean <= bound + 3 * r.std_error);
  }
}
