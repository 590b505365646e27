/*
 * Copyright (c) 2026, The strandkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "strandkit/algebra.h"
#include "support.h"

using namespace strandkit;
using namespace strandkit::testing;

namespace {

Term var(const std::string& n, Sort sort, bool inv = false) {
  return Term::var(n, sort, inv);
}

}  // namespace

TEST_CASE("sorts of constructors") {
  CHECK(sort_of(a(0)) == Sort::kAKey);
  CHECK(sort_of(ai(0)) == Sort::kAKey);
  CHECK(sort_of(s(0)) == Sort::kSKey);
  CHECK(sort_of(d(0)) == Sort::kData);
  CHECK(sort_of(g(0)) == Sort::kTop);
  CHECK(sort_of(pair(s(0), d(0))) == Sort::kTop);
  CHECK(sort_of(enc(d(0), s(0))) == Sort::kTop);
  CHECK(sort_of(var("x", Sort::kData)) == Sort::kData);
}

TEST_CASE("tags are not atoms") {
  CHECK_FALSE(is_atom(g(1)));
  CHECK(is_atom(d(1)));
  CHECK(is_atom(ai(2)));
  CHECK_FALSE(is_atom(pair(d(0), d(1))));
}

TEST_CASE("encryption needs a key") {
  CHECK_THROWS_AS(enc(d(0), d(1)), SortError);
  CHECK_THROWS_AS(enc(d(0), g(0)), SortError);
  CHECK_THROWS_AS(enc(d(0), pair(s(0), s(1))), SortError);
  CHECK_NOTHROW(enc(d(0), var("k", Sort::kSKey)));
  CHECK_THROWS_AS(enc(d(0), var("x", Sort::kTop)), SortError);
}

TEST_CASE("only akey variables invert") {
  CHECK_THROWS_AS(var("s", Sort::kSKey, true), SortError);
  CHECK_NOTHROW(var("a", Sort::kAKey, true));
}

TEST_CASE("invert_key") {
  CHECK(invert_key(a(0)) == ai(0));
  CHECK(invert_key(ai(0)) == a(0));
  CHECK(invert_key(s(3)) == s(3));
  const Term x = var("a", Sort::kAKey);
  CHECK(invert_key(invert_key(x)) == x);
  CHECK(invert_key(x) == var("a", Sort::kAKey, true));
  CHECK(invert_key(var("k", Sort::kSKey)) == var("k", Sort::kSKey));
  CHECK_THROWS_AS(invert_key(d(0)), SortError);
  CHECK_THROWS_AS(invert_key(pair(a(0), a(1))), SortError);
}

TEST_CASE("carried_by") {
  CHECK(carried_by(s(0), enc(enc(s(0), ai(0)), a(1))));
  CHECK_FALSE(carried_by(s(0), enc(d(0), s(0))));
  CHECK(carried_by(d(0), pair(s(0), pair(g(0), d(0)))));
  CHECK(carried_by(pair(g(0), d(0)), pair(s(0), pair(g(0), d(0)))));
  CHECK_FALSE(carried_by(ai(0), enc(s(0), ai(0))));
  CHECK_THROWS_AS(carried_by(var("x", Sort::kData), d(0)), ValidationError);
}

TEST_CASE("carried_by agrees with subterm enumeration") {
  std::mt19937 rng(7);
  for (int n = 0; n < 300; ++n) {
    const Term t = random_ground(rng, 3);
    std::vector<Term> sub;
    carried_subterms(t, sub);
    for (const Term& u : sub) CHECK(carried_by(u, t));
    const Term probe = random_ground(rng, 1);
    const bool listed = std::find(sub.begin(), sub.end(), probe) != sub.end();
    CHECK(carried_by(probe, t) == listed);
  }
}

TEST_CASE("apply") {
  Substitution sub;
  sub.bind({"a", Sort::kAKey}, a(0));
  CHECK(apply(sub, var("a", Sort::kAKey, true)) == ai(0));
  Substitution sd;
  sd.bind({"s", Sort::kSKey}, s(0));
  sd.bind({"d", Sort::kData}, d(0));
  CHECK(apply(sd, enc(var("d", Sort::kData), var("s", Sort::kSKey))) ==
        enc(d(0), s(0)));
  CHECK(apply(Substitution{}, enc(var("d", Sort::kData), a(1))) ==
        enc(var("d", Sort::kData), a(1)));
}

TEST_CASE("bind is sort checked") {
  Substitution sub;
  CHECK_THROWS_AS(sub.bind({"k", Sort::kAKey}, s(0)), SortError);
  CHECK_THROWS_AS(sub.bind({"d", Sort::kData}, g(0)), SortError);
  CHECK_NOTHROW(sub.bind({"x", Sort::kTop}, d(0)));
}

TEST_CASE("then composes") {
  Substitution inner, outer;
  inner.bind({"x", Sort::kTop}, pair(var("y", Sort::kData), d(1)));
  outer.bind({"y", Sort::kData}, d(0));
  outer.bind({"z", Sort::kData}, d(2));
  const Substitution both = inner.then(outer);
  const Term t = pair(var("x", Sort::kTop), var("z", Sort::kData));
  CHECK(apply(both, t) == apply(outer, apply(inner, t)));
}

TEST_CASE("match") {
  const Term pattern = enc(var("x", Sort::kTop), var("k", Sort::kAKey));
  const Term target = enc(pair(g(0), s(0)), a(1));
  auto theta = match(pattern, target);
  REQUIRE(theta);
  CHECK(apply(*theta, pattern) == target);
  CHECK(*theta->find({"x", Sort::kTop}) == pair(g(0), s(0)));
  CHECK(*theta->find({"k", Sort::kAKey}) == a(1));

  CHECK_FALSE(match(var("k", Sort::kAKey), s(0)));
  CHECK_FALSE(match(pair(var("x", Sort::kTop), var("x", Sort::kTop)),
                    pair(a(0), a(1))));
}

TEST_CASE("match through an inverted variable") {
  auto theta = match(enc(d(0), var("a", Sort::kAKey, true)), enc(d(0), ai(4)));
  REQUIRE(theta);
  CHECK(*theta->find({"a", Sort::kAKey}) == a(4));
  CHECK_FALSE(match(var("a", Sort::kAKey, true), s(0)));
}

TEST_CASE("match treats target variables as rigid") {
  const Term x = var("x", Sort::kData);
  CHECK_FALSE(match(d(0), x));
  auto theta = match(var("y", Sort::kData), x);
  REQUIRE(theta);
  CHECK(*theta->find({"y", Sort::kData}) == x);
}

TEST_CASE("match respects a seed") {
  Substitution seed;
  seed.bind({"x", Sort::kData}, d(1));
  CHECK_FALSE(match(var("x", Sort::kData), d(0), seed));
  CHECK(match(var("x", Sort::kData), d(1), seed));
}

TEST_CASE("ordering is total and consistent with equality") {
  std::mt19937 rng(11);
  for (int n = 0; n < 200; ++n) {
    const Term x = random_ground(rng, 2), y = random_ground(rng, 2);
    CHECK(((x <=> y) == 0) == (x == y));
    CHECK(((x <=> y) < 0) == ((y <=> x) > 0));
  }
}

TEST_CASE("printing") {
  CHECK(to_string(enc(enc(s(0), ai(0)), a(2))) == "{{s0}a0^-1}a2");
  CHECK(to_string(pair(g(1), d(0))) == "(g1, d0)");
}
