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

#include <algorithm>
#include <deque>

#include "support.h"

using namespace strandkit;
using namespace strandkit::testing;

namespace {

bool carried_oracle(const Term& t0, const Term& t1) {
  std::vector<Term> all;
  carried_subterms(t1, all);
  return std::find(all.begin(), all.end(), t0) != all.end();
}

// Atoms occurring anywhere in a term, keys included.
void atoms_of(const Term& t, std::set<Term>& out) {
  if (t.is_pair()) {
    atoms_of(t.left(), out);
    atoms_of(t.right(), out);
  } else if (t.is_enc()) {
    atoms_of(t.plaintext(), out);
    atoms_of(t.key(), out);
  } else if (is_atom(t)) {
    out.insert(t);
  }
}

std::set<Term> bundle_atoms(const StrandSpace& space) {
  std::set<Term> out;
  for (const Trace& tr : space.traces()) {
    for (const Event& e : tr) atoms_of(e.message, out);
  }
  return out;
}

std::vector<Node> all_nodes(const StrandSpace& space) {
  std::vector<Node> out;
  for (std::size_t st = 0; st < space.size(); ++st) {
    for (std::size_t i = 0; i < space.trace(st).size(); ++i) out.push_back({st, i});
  }
  return out;
}

// Nodes reachable from n by one or more edges.
std::set<Node> reachable(const Bundle& b, const Node& n) {
  std::set<Node> seen;
  std::deque<Node> todo{n};
  while (!todo.empty()) {
    const Node x = todo.front();
    todo.pop_front();
    std::vector<Node> next;
    if (x.index + 1 < b.space().trace(x.strand).size()) {
      next.push_back({x.strand, x.index + 1});
    }
    for (const CommEdge& e : b.edges()) {
      if (e.from == x) next.push_back(e.to);
    }
    for (const Node& y : next) {
      if (seen.insert(y).second) todo.push_back(y);
    }
  }
  return seen;
}

struct CompatOracle {
  bool compatible = false;
  std::vector<std::size_t> least_path;
};

// Every bijection onto 0..ell-1 and every state sequence of length ell+1.
CompatOracle compat_oracle(const Bundle& b, const std::vector<AnnotatedNode>& nodes,
                           const StateModel& m) {
  const std::set<std::size_t> live = infinite_states(m);
  const std::size_t ell = nodes.size();
  std::vector<std::size_t> perm(ell);
  for (std::size_t i = 0; i < ell; ++i) perm[i] = i;
  CompatOracle out;
  do {
    bool embeds = true;
    for (std::size_t x = 0; x < ell && embeds; ++x) {
      const std::set<Node> after = reachable(b, nodes[perm[x]].node);
      for (std::size_t y = 0; y < ell; ++y) {
        if ((after.count(nodes[perm[y]].node) > 0) != (x < y)) embeds = false;
      }
    }
    if (!embeds) continue;
    std::vector<std::size_t> path(ell + 1, 0);
    while (true) {
      bool ok = live.count(path.back()) > 0;
      for (std::size_t j = 0; j < ell && ok; ++j) {
        ok = in_tau(m, path[j], path[j + 1]) &&
             nodes[perm[j]].transitions.contains(path[j], path[j + 1], m.bx);
      }
      if (ok && (!out.compatible || path < out.least_path)) {
        out.compatible = true;
        out.least_path = path;
      }
      std::size_t pos = ell + 1;
      while (pos > 0 && path[pos - 1] == m.bx) path[--pos] = 0;
      if (pos == 0) break;
      ++path[pos - 1];
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Every tau sequence of the given length, live or not.
bool check_or_issue_oracle(const StateModel& m, std::size_t len) {
  std::vector<std::size_t> path(len, 0);
  while (true) {
    bool valid = true;
    for (std::size_t j = 0; j + 1 < len && valid; ++j) valid = in_tau(m, path[j], path[j + 1]);
    if (valid) {
      for (std::size_t i = 0; i < len; ++i) {
        for (std::size_t k = i; k < len; ++k) {
          if (path[i] >= path[k]) continue;
          bool issued = false;
          for (std::size_t j = i + 1; j <= k; ++j) issued = issued || path[j] == m.bx;
          if (!issued) return false;
        }
      }
    }
    std::size_t pos = len;
    while (pos > 0 && path[pos - 1] == m.bx) path[--pos] = 0;
    if (pos == 0) return true;
    ++path[pos - 1];
  }
}

}  // namespace

TEST_CASE("carried by agrees with subterm enumeration") {
  std::mt19937 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const Term t0 = random_ground(rng, 2);
    const Term t1 = random_ground(rng, 4);
    CHECK(carried_by(t0, t1) == carried_oracle(t0, t1));
    std::vector<Term> sub;
    carried_subterms(t1, sub);
    CHECK(carried_by(sub[rng() % sub.size()], t1));
  }
}

TEST_CASE("origination agrees with a direct scan") {
  for (const std::string& name : all_bundles()) {
    CAPTURE(name);
    const StrandSpace& space = bundle(name).bundle.space();
    for (const Term& t : bundle_atoms(space)) {
      std::vector<Node> expected;
      for (std::size_t st = 0; st < space.size(); ++st) {
        const Trace& tr = space.trace(st);
        for (std::size_t i = 0; i < tr.size(); ++i) {
          if (!carried_oracle(t, tr[i].message)) continue;
          if (tr[i].outbound()) expected.push_back({st, i});
          break;
        }
      }
      CHECK(origination_nodes(space, t) == expected);
      CHECK(uniquely_originates(space, t, expected.size() == 1 ? expected[0] : Node{0, 99}) ==
            (expected.size() == 1));
      bool carried = false;
      for (const Node& n : all_nodes(space)) carried = carried || carried_oracle(t, evt(space, n).message);
      CHECK(non_originating(space, t) == (expected.empty() && !carried));
    }
  }
}

TEST_CASE("precedence agrees with graph search") {
  for (const std::string& name : all_bundles()) {
    CAPTURE(name);
    const Bundle& b = bundle(name).bundle;
    const Precedence prec(b);
    for (const Node& x : all_nodes(b.space())) {
      const std::set<Node> after = reachable(b, x);
      for (const Node& y : all_nodes(b.space())) CHECK(prec(x, y) == (after.count(y) > 0));
    }
  }
}

TEST_CASE("a uniquely originating atom precedes every node carrying it") {
  std::size_t checked = 0;
  for (const std::string& name : all_bundles()) {
    CAPTURE(name);
    const Bundle& b = bundle(name).bundle;
    const StrandSpace& space = b.space();
    const Precedence prec(b);
    for (const Term& t : bundle_atoms(space)) {
      const auto origins = origination_nodes(space, t);
      if (origins.size() != 1) continue;
      for (const Node& n : all_nodes(space)) {
        if (n == origins[0] || !carried_by(t, evt(space, n).message)) continue;
        CHECK(prec(origins[0], n));
        ++checked;
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("check_run assignments are instances") {
  for (const std::string& name : all_bundles()) {
    CAPTURE(name);
    const BundleFile& bf = bundle(name);
    for (const PartialAssignment& hint : {bf.hint, PartialAssignment{}}) {
      const RunResult r = check_run(bf.bundle, *bf.protocol, hint);
      REQUIRE(std::holds_alternative<RoleAssignment>(r));
      const RoleAssignment& rl = std::get<RoleAssignment>(r);
      REQUIRE(rl.size() == bf.bundle.space().size());
      for (std::size_t st = 0; st < rl.size(); ++st) {
        CHECK(inst(bf.bundle.space(), st, role_item(*bf.protocol, rl[st])));
      }
    }
  }
  CHECK(std::holds_alternative<NotARun>(
      check_run(bundle("blanchet-mitm").bundle, protocol("amended"))));
}

TEST_CASE("compatibility agrees with exhaustive search") {
  for (const char* name : {"acp-two-cashiers", "acp-no-new-card", "acp-double-spend",
                           "acp-new-card", "blanchet-mitm", "single"}) {
    CAPTURE(name);
    const BundleFile& bf = bundle(name);
    const RoleAssignment rl = run_of(bf);
    for (std::size_t bx : {1u, 2u}) {
      if (bf.protocol->boxes() && *bf.protocol->boxes() != bx) continue;
      const StateModel m = acp_state_model(bx);
      const auto nodes = annotated_nodes(bf.bundle, *bf.protocol, rl);
      const CompatOracle o = compat_oracle(bf.bundle, nodes, m);
      const CompatibilityResult r = check_compatibility(bf.bundle, *bf.protocol, rl, m);
      CHECK(r.compatible == o.compatible);
      if (r.compatible && o.compatible) {
        CHECK(r.witness->path == o.least_path);
        CHECK_FALSE(validate_compatibility(bf.bundle, *bf.protocol, rl, m, *r.witness));
      }
    }
  }
}

TEST_CASE("check or issue agrees with exhaustive enumeration") {
  for (std::size_t bx : {1u, 2u, 3u}) {
    for (std::size_t len = 2; len <= 6; ++len) {
      CHECK(check_or_issue(acp_state_model(bx), len).holds ==
            check_or_issue_oracle(acp_state_model(bx), len));
    }
  }
  const StateModel raise{2, {TransitionSet::check_box(), TransitionSet::explicit_pairs({{0, 1}})}};
  CHECK_FALSE(check_or_issue_oracle(raise, 4));
  CHECK_FALSE(check_or_issue(raise, 4).holds);
}

TEST_CASE("bridge nodes lie between the pair") {
  const BundleFile& bf = bundle("acp-two-cashiers");
  const RoleAssignment rl = run_of(bf);
  const StateModel m = acp_state_model(1);
  const CompatibilityWitness w = *check_compatibility(bf.bundle, *bf.protocol, rl, m).witness;
  const Precedence prec(bf.bundle);
  const auto nodes = annotated_nodes(bf.bundle, *bf.protocol, rl);
  std::size_t bridged = 0;
  for (const AnnotatedNode& n0 : nodes) {
    for (const AnnotatedNode& n1 : nodes) {
      if (!prec(n0.node, n1.node)) continue;
      const BridgeResult r = find_bridge_witness(bf.bundle, *bf.protocol, rl, m, w, n0.node, n1.node);
      CAPTURE(r);
      if (r.kind == BridgeResult::Kind::kNotApplicable) continue;
      if (r.s0 >= r.s1) {
        CHECK(r.kind == BridgeResult::Kind::kGeqState);
        continue;
      }
      REQUIRE(r.kind == BridgeResult::Kind::kNewCardNode);
      CHECK(prec(n0.node, *r.node));
      CHECK(prec(*r.node, n1.node));
      const auto it = std::find_if(nodes.begin(), nodes.end(),
                                   [&](const AnnotatedNode& x) { return x.node == *r.node; });
      REQUIRE(it != nodes.end());
      CHECK(subset_of(it->transitions, TransitionSet::new_card(), m.bx));
      ++bridged;
    }
  }
  CHECK(bridged >= 1);
}
