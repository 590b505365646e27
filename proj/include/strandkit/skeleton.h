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

// Skeletons over free algebras and homomorphisms between them, or from a
// skeleton into a bundle.

#ifndef STRANDKIT_SKELETON_H_
#define STRANDKIT_SKELETON_H_

#include <cstddef>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "strandkit/algebra.h"
#include "strandkit/bundle.h"
#include "strandkit/protocol.h"
#include "strandkit/strands.h"

namespace strandkit {

// i(r, h, sigma): the first h events of role r, instantiated by sigma.
struct Instance {
  std::string role;
  std::size_t height = 0;
  Substitution mapping;
};

using NodeOrder = std::vector<std::pair<Node, Node>>;

class Skeleton {
 public:
  // Checks well-formedness and throws ValidationError on failure: known
  // roles, 1 <= height <= |role|, mappings total on role parameters and over
  // the declared variables, ordering within the space and acyclic, origination
  // sets made of atoms, and every uniquely originating atom originating at
  // exactly one node.
  Skeleton(std::string name, std::shared_ptr<const Protocol> protocol,
           std::vector<VarKey> vars, std::vector<Instance> instances,
           NodeOrder ordering, std::set<Term> nonorig, std::set<Term> uniqorig);

  const std::string& name() const { return name_; }
  const Protocol& protocol() const { return *protocol_; }
  const std::shared_ptr<const Protocol>& protocol_ptr() const {
    return protocol_;
  }
  const std::vector<VarKey>& vars() const { return vars_; }
  const std::vector<Instance>& instances() const { return instances_; }
  const NodeOrder& ordering() const { return ordering_; }
  const std::set<Term>& nonorig() const { return nonorig_; }
  const std::set<Term>& uniqorig() const { return uniqorig_; }

  const RoleTemplate& role_of(std::size_t strand) const;
  bool is_listener(std::size_t strand) const {
    return role_of(strand).is_listener();
  }
  // Theta_X: strand s carries sigma applied to the first h role events.
  const StrandSpace& space() const { return space_; }
  // Transitive closure of the ordering together with strand succession.
  bool precedes(const Node& before, const Node& after) const;
  // O_k(t) for t in uniqorig; throws ValidationError otherwise.
  Node origination_node(const Term& t) const;

 private:
  std::string name_;
  std::shared_ptr<const Protocol> protocol_;
  std::vector<VarKey> vars_;
  std::vector<Instance> instances_;
  NodeOrder ordering_;
  std::set<Term> nonorig_;
  std::set<Term> uniqorig_;
  StrandSpace space_;
  std::set<std::pair<Node, Node>> closure_;
  std::map<Term, Node> origins_;
};

inline const StrandSpace& derive_space(const Skeleton& k) { return k.space(); }
inline Node origination_node(const Skeleton& k, const Term& t) {
  return k.origination_node(t);
}

// (phi, sigma). When the codomain is a bundle, listener strands map to a
// transmitting node: listener_nodes[s] is its index on strand strand_map[s].
// Variables sigma leaves unbound map to the variable of the same name and
// sort in the codomain.
struct HomWitness {
  std::vector<std::size_t> strand_map;
  std::map<std::size_t, std::size_t> listener_nodes;
  Substitution term_map;

  friend bool operator==(const HomWitness&, const HomWitness&) = default;
};

HomWitness identity_witness(const Skeleton& k);

struct HomViolation {
  // 0 for protocol/run preconditions, 1-6 for the homomorphism properties.
  int property;
  std::string detail;
};

std::ostream& operator<<(std::ostream& os, const HomViolation& v);

// Checks the six homomorphism properties; empty means OK.
std::vector<HomViolation> verify_hom(const Skeleton& k0, const Skeleton& k1,
                                     const HomWitness& w);

// The bundle-range variant. sigma must be ground on every skeleton variable;
// each regular strand's image must be an instance of its role item under the
// composed map; non and uniq are checked in the bundle; listener strands map
// to the named transmitting node and hand their orderings to it. The bundle
// must be a run of the skeleton's protocol (checked with the given hint).
std::vector<HomViolation> verify_hom_to_bundle(
    const Skeleton& k, const Bundle& b, const HomWitness& w,
    const PartialAssignment& hint = {});

// w2 after w1. Throws ValidationError when w1 maps outside w2's domain.
HomWitness compose(const HomWitness& w1, const HomWitness& w2);

// The two witnesses act the same on k's strands and variables.
bool same_hom(const Skeleton& k, const HomWitness& a, const HomWitness& b);

}  // namespace strandkit

#endif  // STRANDKIT_SKELETON_H_
