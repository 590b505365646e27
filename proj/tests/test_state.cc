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

#include "strandkit/state.h"
#include "support.h"

using namespace strandkit;
using namespace strandkit::testing;

namespace {

struct Loaded {
  const BundleFile& file;
  RoleAssignment rl;
  StateModel model;
};

Loaded load(const std::string& name) {
  const BundleFile& bf = bundle(name);
  return {bf, run_of(bf), acp_state_model(bf.protocol->boxes().value_or(1))};
}

CompatibilityResult compat(const Loaded& l) {
  return check_compatibility(l.file.bundle, *l.file.protocol, l.rl, l.model);
}

const TransitionSet& transitions(const Loaded& l, const Node& n) {
  static thread_local Lifted<Annotation> held;
  held = annotations_of(l.file.bundle, *l.file.protocol, l.rl, n);
  return std::get<TransitionSet>(held.down());
}

}  // namespace

TEST_CASE("transition sets") {
  CHECK(TransitionSet::check_box().contains(2, 1, 3));
  CHECK_FALSE(TransitionSet::check_box().contains(1, 1, 3));
  CHECK(TransitionSet::new_card().contains(0, 3, 3));
  CHECK_FALSE(TransitionSet::new_card().contains(0, 2, 3));
  CHECK(enumerate(TransitionSet::check_box(), 2) == std::set<StatePair>{{1, 0}, {2, 1}});
  CHECK(subset_of(TransitionSet::ends_at(1), TransitionSet::new_card(), 1));
  CHECK(same_transitions(TransitionSet::ends_at(1), TransitionSet::new_card(), 1));
  CHECK_FALSE(same_transitions(TransitionSet::ends_at(1), TransitionSet::new_card(), 2));
  CHECK(same_transitions(TransitionSet::explicit_pairs({{1, 0}}),
                         TransitionSet::check_box(), 1));
}

TEST_CASE("the acp state model") {
  for (std::size_t bx : {1u, 2u, 3u}) {
    const StateModel m = acp_state_model(bx);
    for (std::size_t s0 = 0; s0 <= bx; ++s0) {
      for (std::size_t s1 = 0; s1 <= bx; ++s1) {
        CHECK(in_tau(m, s0, s1) == (s0 == s1 + 1 || s1 == bx));
      }
    }
    CHECK(infinite_states(m).size() == bx + 1);
  }
  const StateModel decreasing{2, {TransitionSet::check_box()}};
  CHECK(infinite_states(decreasing).empty());
}

TEST_CASE("annotations of acp strands") {
  const Loaded l = load("acp-two-cashiers");
  CHECK(same_transitions(transitions(l, {8, 3}), TransitionSet::explicit_pairs({{1, 0}}), 1));
  CHECK(same_transitions(transitions(l, {12, 1}), TransitionSet::new_card(), 1));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(annotations_of(l.file.bundle, *l.file.protocol, l.rl, {7, i}).is_bottom());
  }
  CHECK(annotations_of(l.file.bundle, *l.file.protocol, l.rl, {8, 2}).is_bottom());
  CHECK(annotations_of(l.file.bundle, *l.file.protocol, l.rl, {6, 2}).is_bottom());
}

TEST_CASE("annotated nodes") {
  const Loaded l = load("acp-two-cashiers");
  const auto nodes = annotated_nodes(l.file.bundle, *l.file.protocol, l.rl);
  REQUIRE(nodes.size() == 3);
  CHECK(nodes[0].node == Node{8, 3});
  CHECK(nodes[1].node == Node{12, 1});
  CHECK(nodes[2].node == Node{14, 3});
  const BundleFile& mitm = bundle("blanchet-mitm");
  CHECK(annotated_nodes(mitm.bundle, *mitm.protocol, run_of(mitm)).empty());
  const Loaded one = load("acp-new-card");
  CHECK(annotated_nodes(one.file.bundle, *one.file.protocol, one.rl).size() == 1);
}

TEST_CASE("the two-cashier bundle is compatible") {
  const Loaded l = load("acp-two-cashiers");
  const CompatibilityResult r = compat(l);
  REQUIRE(r.compatible);
  const CompatibilityWitness& w = *r.witness;
  CHECK(w.ell == 3);
  CHECK(w.order == std::vector<Node>{{8, 3}, {12, 1}, {14, 3}});
  CHECK(w.path == std::vector<std::size_t>{1, 0, 1, 0});
  CHECK_FALSE(validate_compatibility(l.file.bundle, *l.file.protocol, l.rl, l.model, w));
}

TEST_CASE("a tampered witness is rejected") {
  const Loaded l = load("acp-two-cashiers");
  CompatibilityWitness w = *compat(l).witness;
  CompatibilityWitness bad_path = w;
  bad_path.path = {1, 0, 0, 0};
  CHECK(validate_compatibility(l.file.bundle, *l.file.protocol, l.rl, l.model, bad_path));
  CompatibilityWitness bad_order = w;
  std::swap(bad_order.order[0], bad_order.order[1]);
  CHECK(validate_compatibility(l.file.bundle, *l.file.protocol, l.rl, l.model, bad_order));
  CompatibilityWitness short_order = w;
  short_order.order.pop_back();
  CHECK(validate_compatibility(l.file.bundle, *l.file.protocol, l.rl, l.model, short_order));
}

TEST_CASE("incomparable cashiers are incompatible") {
  const CompatibilityResult r = compat(load("acp-no-new-card"));
  CHECK_FALSE(r.compatible);
  CHECK(r.condition == 2);
}

TEST_CASE("a card spent twice is incompatible") {
  const CompatibilityResult r = compat(load("acp-double-spend"));
  CHECK_FALSE(r.compatible);
  CHECK(r.condition == 3);
}

TEST_CASE("bundles without annotations are compatible") {
  const Loaded l = load("acp-new-card");
  const CompatibilityResult r = compat(l);
  REQUIRE(r.compatible);
  CHECK(r.witness->ell == 1);
}

TEST_CASE("check or issue") {
  for (std::size_t bx : {1u, 2u, 3u}) {
    for (std::size_t len = 2; len <= 8; ++len) {
      const CheckOrIssueResult r = check_or_issue(acp_state_model(bx), len);
      CHECK(r.holds);
      CHECK(r.prefixes > 0);
    }
  }
  CHECK_THROWS(check_or_issue(acp_state_model(1), 1));
}

TEST_CASE("a raise that is not a new card breaks check or issue") {
  const StateModel m{2, {TransitionSet::check_box(), TransitionSet::explicit_pairs({{0, 1}})}};
  const CheckOrIssueResult r = check_or_issue(m, 4);
  REQUIRE_FALSE(r.holds);
  CHECK(r.path[r.i] < r.path[r.k]);
}

TEST_CASE("bridge between the two cashiers") {
  const Loaded l = load("acp-two-cashiers");
  const CompatibilityWitness w = *compat(l).witness;
  const BridgeResult r =
      find_bridge_witness(l.file.bundle, *l.file.protocol, l.rl, l.model, w, {8, 3}, {14, 3});
  CHECK(r.kind == BridgeResult::Kind::kNewCardNode);
  CHECK(r.node == Node{12, 1});
  CHECK(r.s0 == 0);
  CHECK(r.s1 == 1);
  const BridgeResult geq =
      find_bridge_witness(l.file.bundle, *l.file.protocol, l.rl, l.model, w, {12, 1}, {14, 3});
  CHECK(geq.kind == BridgeResult::Kind::kGeqState);
  const BridgeResult none =
      find_bridge_witness(l.file.bundle, *l.file.protocol, l.rl, l.model, w, {7, 0}, {14, 3});
  CHECK(none.kind == BridgeResult::Kind::kNotApplicable);
}

TEST_CASE("state annotations need runs of a state protocol") {
  const BundleFile& mitm = bundle("blanchet-mitm");
  CHECK(check_compatibility(mitm.bundle, *mitm.protocol, run_of(mitm), acp_state_model(1))
            .compatible);
}
