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

// Bundles: strand spaces plus communication edges forming a DAG in which
// every reception has exactly one transmitter. Validation, the causal order,
// and checking that a bundle is a run of a protocol.

#ifndef STRANDKIT_BUNDLE_H_
#define STRANDKIT_BUNDLE_H_

#include <cstddef>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "strandkit/algebra.h"
#include "strandkit/protocol.h"
#include "strandkit/strands.h"

namespace strandkit {

struct CommEdge {
  Node from;
  Node to;
  friend auto operator<=>(const CommEdge&, const CommEdge&) = default;
  friend bool operator==(const CommEdge&, const CommEdge&) = default;
};

class Bundle {
 public:
  // No validation here; see validate_bundle.
  Bundle(StrandSpace space, std::vector<CommEdge> edges)
      : space_(std::move(space)), edges_(std::move(edges)) {}

  const StrandSpace& space() const { return space_; }
  const std::vector<CommEdge>& edges() const { return edges_; }

 private:
  StrandSpace space_;
  std::vector<CommEdge> edges_;
};

struct Violation {
  enum class Kind {
    kBadNode,
    kNotTransmission,
    kNotReception,
    kMessageMismatch,
    kUnexplainedReception,
    kMultipleTransmitters,
    kCycle,
  };
  Kind kind;
  std::string message;
  std::vector<Node> nodes;
};

std::string_view violation_name(Violation::Kind kind);
std::ostream& operator<<(std::ostream& os, const Violation& v);

// Empty when the bundle is valid.
std::vector<Violation> validate_bundle(const Bundle& b);

// The strict order induced by communication and strand succession.
class Precedence {
 public:
  // Throws ValidationError when the bundle is invalid.
  explicit Precedence(const Bundle& b);

  bool operator()(const Node& before, const Node& after) const;
  // All related pairs, in node order.
  std::vector<std::pair<Node, Node>> pairs() const;
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::size_t id(const Node& n) const;

  std::vector<std::size_t> strand_offset_;
  std::vector<Node> nodes_;
  std::vector<std::vector<bool>> reach_;
};

// The role a strand plays in a run.
struct StrandRole {
  enum class Kind { kRegular, kAdversary };

  static StrandRole regular(std::string role, Substitution binding) {
    return StrandRole{Kind::kRegular, std::move(role), std::move(binding), {}};
  }
  static StrandRole adversary(AdversaryKind kind, std::vector<Term> params) {
    return StrandRole{Kind::kAdversary, std::string(adversary_name(kind)), {},
                      std::move(params)};
  }

  Kind kind = Kind::kRegular;
  std::string role;
  Substitution binding;      // regular roles
  std::vector<Term> params;  // adversary generators

  friend bool operator==(const StrandRole&, const StrandRole&) = default;
};

std::ostream& operator<<(std::ostream& os, const StrandRole& r);

using RoleAssignment = std::vector<StrandRole>;
// A hint: known roles for some strands, nullopt where the search decides.
using PartialAssignment = std::vector<std::optional<StrandRole>>;

// The role item a strand role denotes. Throws on unknown roles or bad
// parameters.
RoleItem role_item(const Protocol& p, const StrandRole& r);

struct NotARun {
  std::size_t strand;
  std::string reason;
};

using RunResult = std::variant<RoleAssignment, NotARun>;

// Looks for a role assignment under which every strand is an instance of a
// role item of p or of an adversary generator. Hinted strands are verified
// as given; the others are searched, regular roles first in declaration
// order, then the adversary generators.
RunResult check_run(const Bundle& b, const Protocol& p,
                    const PartialAssignment& hint = {});

// Ground terms a variable may range over when the bundle leaves it
// undetermined: every term of the sort occurring in the bundle or in extra,
// plus one fresh constant that stands for all other values.
class CandidatePool {
 public:
  CandidatePool(const StrandSpace& space, const std::set<Term>& extra = {});
  const std::vector<Term>& of(Sort sort) const;

 private:
  std::vector<Term> akeys_, skeys_, data_, top_;
};

}  // namespace strandkit

#endif  // STRANDKIT_BUNDLE_H_
