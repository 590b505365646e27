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

// The message algebra: an order-sorted signature with pairing, symmetric and
// asymmetric encryption, key inverse, and four families of constants.
//
// Terms are kept in canonical form. There is no inverse node: inversion is a
// flag carried by asymmetric-key constants and variables, so
//   invk(a_i) = b_i, invk(invk(k)) = k, invk(k) = k for symmetric k
// hold by construction. The same Term type carries ground messages (bundles)
// and messages over variables (roles, skeletons, formulas).

#ifndef STRANDKIT_ALGEBRA_H_
#define STRANDKIT_ALGEBRA_H_

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "strandkit/errors.h"

namespace strandkit {

// Subsorts: AKey < Top, SKey < Top, Data < Top.
enum class Sort { kTop, kAKey, kSKey, kData };

bool sort_leq(Sort lower, Sort upper);
std::string_view sort_name(Sort sort);
std::optional<Sort> parse_sort(std::string_view name);

class Term {
 public:
  enum class Kind { kAConst, kSConst, kDConst, kTag, kVar, kPair, kEnc };

  // a_i when inverted is false, b_i = invk(a_i) otherwise.
  static Term akey(std::size_t index, bool inverted = false);
  static Term skey(std::size_t index);
  static Term data(std::size_t index);
  static Term tag(std::size_t index);
  // Throws SortError if inverted is set on a non-AKey variable.
  static Term var(std::string name, Sort sort, bool inverted = false);
  static Term pair(Term left, Term right);
  // Throws SortError unless the key has sort AKey or SKey.
  static Term enc(Term plaintext, Term key);

  Kind kind() const;
  bool is_var() const { return kind() == Kind::kVar; }
  bool is_pair() const { return kind() == Kind::kPair; }
  bool is_enc() const { return kind() == Kind::kEnc; }

  // Constants only.
  std::size_t index() const;
  // AConst and Var.
  bool inverted() const;
  // Var only.
  const std::string& name() const;
  Sort declared_sort() const;
  // Pair only.
  const Term& left() const;
  const Term& right() const;
  // Enc only.
  const Term& plaintext() const;
  const Term& key() const;

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

  struct Rep;

 private:
  explicit Term(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

// Least sort of a term. Pairs, encryptions and tags are Top.
Sort sort_of(const Term& t);

bool is_ground(const Term& t);

// Atoms are the terms whose sort is AKey, SKey or Data. Tags are not atoms.
bool is_atom(const Term& t);

// Canonical inverse. Throws SortError for terms that are not keys.
Term invert_key(const Term& t);

// Checks the canonical-form invariants: encryption keys are keys and only
// AKey variables carry the inversion flag.
bool is_canonical(const Term& t);

// t0 is carried by t1: the smallest reflexive transitive relation with
// t0 < (t0, t1), t1 < (t0, t1) and t0 < {t0}t1. Both terms must be ground;
// throws ValidationError otherwise.
bool carried_by(const Term& t0, const Term& t1);

// The same relation over the free algebra, with variables as rigid names.
bool carried_by_free(const Term& t0, const Term& t1);

// Identity of a variable: its name together with its declared sort.
struct VarKey {
  std::string name;
  Sort sort = Sort::kTop;

  friend auto operator<=>(const VarKey&, const VarKey&) = default;
  friend bool operator==(const VarKey&, const VarKey&) = default;
};

VarKey key_of(const Term& var);
Term as_term(const VarKey& key);

// Variables of t, inverted occurrences folded onto their base variable.
std::set<VarKey> variables(const Term& t);
void collect_variables(const Term& t, std::set<VarKey>& out);

// A finite, sort-preserving map from variables to terms. Application is
// simultaneous, so the domain and range may share names (a homomorphism
// between two free algebras that happen to use the same variable names).
class Substitution {
 public:
  Substitution() = default;

  // Throws SortError if sort_of(image) is not below key.sort.
  void bind(const VarKey& key, Term image);
  bool contains(const VarKey& key) const {
    return bindings_.count(key) != 0;
  }
  const Term* find(const VarKey& key) const;
  const std::map<VarKey, Term>& bindings() const { return bindings_; }
  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }

  // (outer after *this): x -> apply(outer, this(x)) on this domain, and
  // outer's bindings for variables this does not bind.
  Substitution then(const Substitution& outer) const;

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::map<VarKey, Term> bindings_;
};

// Homomorphic application. Unbound variables are left in place; the image of
// an inverted AKey variable is the inverse of the variable's image.
Term apply(const Substitution& sub, const Term& t);

// One-way order-sorted matching: the least extension theta of seed with
// apply(theta, pattern) == target. Variables occurring in target are treated
// as rigid names. Returns nullopt on structural, sort or consistency failure.
std::optional<Substitution> match(const Term& pattern, const Term& target,
                                  const Substitution& seed = {});

// Compact human-readable rendering: a0, a0^-1, s1, d2, g0, x, x^-1,
// (t0, t1), {t}k.
std::string to_string(const Term& t);
std::ostream& operator<<(std::ostream& os, const Term& t);
std::ostream& operator<<(std::ostream& os, Sort sort);

}  // namespace strandkit

#endif  // STRANDKIT_ALGEBRA_H_
