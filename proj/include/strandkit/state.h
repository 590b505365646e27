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

// Annotated nodes, state paths and bundle/state compatibility, the
// check-or-issue and bridge checks, and the award card protocol.
#ifndef STRANDKIT_STATE_H_
#define STRANDKIT_STATE_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "strandkit/bundle.h"
#include "strandkit/protocol.h"
#include "strandkit/transitions.h"

namespace strandkit {

// States 0..bx; tau is the union of the listed transition sets.
struct StateModel {
  std::size_t bx = 1;
  std::vector<TransitionSet> tau;
};

// tau = CheckBox u NewCard.
StateModel acp_state_model(std::size_t bx);

bool in_tau(const StateModel& m, std::size_t s0, std::size_t s1);

// States from which an infinite tau path starts.
std::set<std::size_t> infinite_states(const StateModel& m);

// Throws ValidationError unless rl(n.strand) denotes a role item the strand
// is an instance of.
Lifted<Annotation> annotations_of(const Bundle& b, const Protocol& p,
                                  const RoleAssignment& rl, const Node& n);

struct AnnotatedNode {
  Node node;
  TransitionSet transitions;
};

// Nodes carrying a transition-set annotation, in node order. Throws
// ValidationError on an opaque annotation, which has no state reading.
std::vector<AnnotatedNode> annotated_nodes(const Bundle& b, const Protocol& p,
                                           const RoleAssignment& rl);

struct CompatibilityWitness {
  std::size_t ell = 0;
  std::vector<Node> order;        // order[j] is the node f maps to j
  std::vector<std::size_t> path;  // pi(0) .. pi(ell)
};

std::ostream& operator<<(std::ostream& os, const CompatibilityWitness& w);

struct CompatibilityResult {
  bool compatible = false;
  int condition = 0;  // failing condition when incompatible
  std::string reason;
  std::optional<CompatibilityWitness> witness;
};

// Condition 2 forces the annotated nodes into precedence order, which
// fixes f; the path prefix is then chosen state by state, taking the least
// state from which the remaining annotations can still be met and the
// path can continue forever.
CompatibilityResult check_compatibility(const Bundle& b, const Protocol& p,
                                        const RoleAssignment& rl,
                                        const StateModel& m);

// Checks a witness against the three conditions directly. Returns the first
// failure, or nullopt.
std::optional<std::string> validate_compatibility(
    const Bundle& b, const Protocol& p, const RoleAssignment& rl,
    const StateModel& m, const CompatibilityWitness& w);

struct CheckOrIssueResult {
  bool holds = true;
  std::vector<std::size_t> path;  // counterexample prefix
  std::size_t i = 0;
  std::size_t k = 0;
  std::size_t prefixes = 0;  // prefixes examined
};

// Every path prefix of length max_len (each extends to an infinite path)
// and every i <= k within it: pi(i) >= pi(k), or pi(j) = bx for some
// i < j <= k.
CheckOrIssueResult check_or_issue(const StateModel& m, std::size_t max_len);

struct BridgeResult {
  enum class Kind { kGeqState, kNewCardNode, kNotApplicable, kNoWitness };
  Kind kind = Kind::kNotApplicable;
  std::optional<Node> node;
  std::size_t s0 = 0;
  std::size_t s1 = 0;
  std::string reason;
};

std::ostream& operator<<(std::ostream& os, const BridgeResult& r);

// For annotated n0 < n1 with a0 inside EndsAt(s0) and a1 inside
// StartsAt(s1): s0 >= s1, or the node between them whose transition
// reaches bx, read off the compatibility witness's path.
BridgeResult find_bridge_witness(const Bundle& b, const Protocol& p,
                                 const RoleAssignment& rl,
                                 const StateModel& m,
                                 const CompatibilityWitness& w, const Node& n0,
                                 const Node& n1);

struct AcpModel {
  std::shared_ptr<const Protocol> protocol;
  StateModel model;
};

// buyer, cashier and new-card roles. Tags: g_s encodes state s, buy is
// g_{bx+1} and new is g_{bx+2}. With one box there is one cashier role;
// otherwise cashier-s checks the box that leaves s-1 unchecked.
AcpModel acp_protocol(std::size_t bx);

}  // namespace strandkit

#endif  // STRANDKIT_STATE_H_
