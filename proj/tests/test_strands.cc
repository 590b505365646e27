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

#include "strandkit/strands.h"
#include "support.h"

using namespace strandkit;
using namespace strandkit::testing;

namespace {

const StrandSpace& mitm() { return bundle("blanchet-mitm").bundle.space(); }

}  // namespace

TEST_CASE("traces are non-empty") {
  CHECK_THROWS_AS(Trace({}), ValidationError);
  CHECK_THROWS_AS(StrandSpace({}), ValidationError);
}

TEST_CASE("evt") {
  CHECK(evt(mitm(), {5, 1}) == Event::send(enc(d(0), s(0))));
  const StrandSpace one({Trace({Event::send(d(3))})});
  CHECK(evt(one, {0, 0}) == Event::send(d(3)));
  const StrandSpace two({Trace({Event::send(d(3)), Event::recv(d(4))})});
  CHECK_THROWS(evt(two, {0, 5}));
}

TEST_CASE("originates_at") {
  const Trace sender({Event::send(enc(enc(s(0), ai(0)), a(1))),
                      Event::recv(enc(d(0), s(0)))});
  const Trace receiver({Event::recv(enc(enc(s(0), ai(0)), a(1))),
                        Event::send(enc(d(0), s(0)))});
  CHECK(originates_at(sender, s(0)) == 0u);
  CHECK_FALSE(originates_at(receiver, s(0)));
  CHECK(originates_at(receiver, d(0)) == 1u);
  CHECK_FALSE(originates_at(sender, ai(0)));
}

TEST_CASE("non_originating") {
  CHECK(non_originating(mitm(), ai(0)));
  CHECK(non_originating(mitm(), ai(1)));
  CHECK_FALSE(non_originating(mitm(), ai(2)));
  const StrandSpace one({Trace({Event::send(s(0))})});
  CHECK_FALSE(non_originating(one, s(0)));
}

TEST_CASE("uniquely_originates") {
  CHECK(uniquely_originates(mitm(), s(0), {0, 0}));
  CHECK_FALSE(uniquely_originates(mitm(), s(0), {5, 0}));
  const StrandSpace twice({Trace({Event::send(s(0))}), Trace({Event::send(s(0))})});
  CHECK_FALSE(uniquely_originates(twice, s(0), {0, 0}));
  CHECK(origination_nodes(twice, s(0)).size() == 2);
}

TEST_CASE("origination invariants on the corpus") {
  for (const std::string& name : all_bundles()) {
    const StrandSpace& space = bundle(name).bundle.space();
    std::set<Term> atoms;
    for (const Node& n : space.nodes()) {
      std::vector<Term> sub;
      carried_subterms(evt(space, n).message, sub);
      for (const Term& t : sub) {
        if (is_atom(t)) atoms.insert(t);
      }
    }
    for (const Term& t : atoms) {
      std::size_t unique = 0;
      for (const Node& n : space.nodes()) {
        if (uniquely_originates(space, t, n)) {
          ++unique;
          CHECK_FALSE(non_originating(space, t));
        }
      }
      CHECK(unique <= 1);
      for (std::size_t st = 0; st < space.size(); ++st) {
        if (auto i = originates_at(space.trace(st), t)) {
          CHECK(evt(space, {st, *i}).outbound());
          CHECK(carried_by(t, evt(space, {st, *i}).message));
        }
      }
    }
  }
}

TEST_CASE("origination matches a direct scan") {
  for (const std::string& name : all_bundles()) {
    const StrandSpace& space = bundle(name).bundle.space();
    for (std::size_t st = 0; st < space.size(); ++st) {
      const Trace& tr = space.trace(st);
      for (const Term& t : {s(0), d(0), d(1), a(1), ai(2), ai(3)}) {
        std::optional<std::size_t> expected;
        for (std::size_t i = 0; i < tr.size(); ++i) {
          if (carried_by(t, tr[i].message)) {
            if (tr[i].outbound()) expected = i;
            break;
          }
        }
        CHECK(originates_at(tr, t) == expected);
      }
    }
  }
}

TEST_CASE("prefix") {
  const Trace tr({Event::send(d(0)), Event::recv(d(1))});
  CHECK(tr.prefix(1).size() == 1);
  CHECK_THROWS(tr.prefix(0));
  CHECK_THROWS(tr.prefix(3));
}
