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

// Skeleton formulas, their satisfaction in bundles, shape analysis
// sentences, security goals and a syntactic entailment check.
#ifndef STRANDKIT_LOGIC_H_
#define STRANDKIT_LOGIC_H_

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "strandkit/algebra.h"
#include "strandkit/bundle.h"
#include "strandkit/protocol.h"
#include "strandkit/skeleton.h"

namespace strandkit {

// (z, i)
struct StrandNode {
  std::string strand;
  std::size_t index = 0;
  friend auto operator<=>(const StrandNode&, const StrandNode&) = default;
  friend bool operator==(const StrandNode&, const StrandNode&) = default;
};

// htin(z, h, role(args)); args follow the role's parameter order.
struct HtIn {
  std::string strand;
  std::size_t height = 0;
  std::string role;
  std::vector<Term> args;
  friend auto operator<=>(const HtIn&, const HtIn&) = default;
  friend bool operator==(const HtIn&, const HtIn&) = default;
};

struct Prec {
  StrandNode before;
  StrandNode after;
  friend auto operator<=>(const Prec&, const Prec&) = default;
  friend bool operator==(const Prec&, const Prec&) = default;
};

struct Non {
  Term term;
  friend auto operator<=>(const Non&, const Non&) = default;
  friend bool operator==(const Non&, const Non&) = default;
};

struct Uniq {
  Term term;
  StrandNode node;
  friend auto operator<=>(const Uniq&, const Uniq&) = default;
  friend bool operator==(const Uniq&, const Uniq&) = default;
};

struct EqStrand {
  std::string lhs;
  std::string rhs;
  friend auto operator<=>(const EqStrand&, const EqStrand&) = default;
  friend bool operator==(const EqStrand&, const EqStrand&) = default;
};

struct EqTerm {
  VarKey lhs;
  Term rhs;
  friend auto operator<=>(const EqTerm&, const EqTerm&) = default;
  friend bool operator==(const EqTerm&, const EqTerm&) = default;
};

using Atom = std::variant<HtIn, Prec, Non, Uniq, EqStrand, EqTerm>;

std::ostream& operator<<(std::ostream& os, const Atom& a);
std::string to_string(const Atom& a);

// A conjunction together with the variables it quantifies.
struct Formula {
  std::vector<VarKey> vars;
  std::vector<std::string> strand_vars;
  std::vector<Atom> atoms;
  friend bool operator==(const Formula&, const Formula&) = default;
};

// Throws ValidationError when an atom names an unknown role, has the wrong
// number of role arguments, uses an origination atom that is not an atom, or
// mentions a variable outside scope. The scope is the formula's own variables
// plus outer.
void validate_formula(const Protocol& p, const Formula& f,
                      const Formula* outer = nullptr);

// Free variables used by an atom.
std::set<VarKey> atom_variables(const Atom& a);
std::set<std::string> atom_strands(const Atom& a);

// Strand variables bound by a listener htin atom.
std::set<std::string> listener_variables(const std::vector<Atom>& atoms);

// A variable assignment into a bundle. A strand variable of a listener
// atom denotes a node, so it also carries an index.
struct Assignment {
  std::map<std::string, std::size_t> strands;
  std::map<std::string, std::size_t> listener_nodes;
  Substitution terms;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

std::ostream& operator<<(std::ostream& os, const Assignment& a);

// Restriction to the given variables.
Assignment restrict(const Assignment& a, const std::vector<VarKey>& vars,
                    const std::vector<std::string>& strand_vars);

// Raised by satisfy for an algebra variable that no htin atom or equality
// can bind.
class UnsupportedFragment : public Error {
 public:
  using Error::Error;
};

// K(k): htin for each instance (strand variables z0, z1, ... in instance
// order), then prec, uniq and non atoms. Algebra variables keep the
// skeleton's names.
Formula skeleton_formula(const Skeleton& k);
std::string strand_variable(std::size_t strand);

// Calls visit with every total extension of seed satisfying all atoms, in a
// deterministic order, until visit returns false. Algebra variables that the
// bundle does not determine range over CandidatePool, whose fresh constant
// stands for every value absent from the bundle and the formula.
void for_each_satisfying(const Protocol& p, const std::vector<Atom>& atoms,
                         const Bundle& b, const Assignment& seed,
                         const std::function<bool(const Assignment&)>& visit);
std::vector<Assignment> satisfy(const Protocol& p,
                                const std::vector<Atom>& atoms,
                                const Bundle& b, const Assignment& seed = {});
std::optional<Assignment> satisfy_one(const Protocol& p,
                                      const std::vector<Atom>& atoms,
                                      const Bundle& b,
                                      const Assignment& seed = {});

// Evaluates every atom under a; an atom with an unbound variable is false.
bool check_assignment(const Protocol& p, const std::vector<Atom>& atoms,
                      const Bundle& b, const Assignment& a);

// From an assignment to a witness and back.
HomWitness induced_witness(const Skeleton& k, const Assignment& a);
Assignment induced_assignment(const Skeleton& k, const HomWitness& w);

struct SigmaResult {
  bool satisfiable = false;
  std::string reason;  // when unsatisfiable
  std::optional<Assignment> assignment;
  std::optional<HomWitness> witness;
  std::vector<HomViolation> witness_violations;
};

// Sigma_k: a run of the protocol satisfying the skeleton formula. On success
// the induced witness is re-verified.
SigmaResult eval_sigma(const Skeleton& k, const Bundle& b);

struct Disjunct {
  std::vector<VarKey> vars;
  std::vector<std::string> strand_vars;
  std::vector<Atom> delta;
  std::vector<Atom> atoms;
  friend bool operator==(const Disjunct&, const Disjunct&) = default;
};

// forall pov.vars. pov.atoms <=> or_i exists vars_i. delta_i and atoms_i
struct ShapeSentence {
  std::string name;
  std::shared_ptr<const Protocol> protocol;
  Formula pov;
  std::vector<Disjunct> disjuncts;
};

void validate_sentence(const ShapeSentence& s);
std::ostream& operator<<(std::ostream& os, const ShapeSentence& s);

struct Shape {
  Skeleton skeleton;
  HomWitness hom;
};

struct ShapeAnalysis {
  std::string name;
  Skeleton pov;
  std::vector<Shape> shapes;
};

// Renames variables apart with one counter per base name (the name without
// trailing digits and primes) and strand variables z0, z1, ... Throws
// ValidationError when a shape homomorphism does not verify.
ShapeSentence build_shape_sentence(const ShapeAnalysis& analysis);

// Same shape up to a consistent renaming of variables.
bool alpha_equivalent(const ShapeSentence& a, const ShapeSentence& b);

struct SentenceResult {
  enum class Side { kForward, kBackward };
  bool holds = true;
  Side side = Side::kForward;
  std::size_t disjunct = 0;  // backward failures
  Assignment assignment;
};

// Throws ValidationError when the bundle is not a run of the protocol.
SentenceResult eval_sentence(const ShapeSentence& s, const Bundle& b);

// forall hypothesis.vars. hypothesis.atoms =>
//   or_i exists conclusions[i].vars. conclusions[i].atoms
struct Goal {
  std::string name;
  std::shared_ptr<const Protocol> protocol;
  Formula hypothesis;
  std::vector<Formula> conclusions;
};

void validate_goal(const Goal& g);
std::ostream& operator<<(std::ostream& os, const Goal& g);

// Hypothesis assignments that extend to no conclusion. An empty result
// certifies this bundle only. Throws ValidationError when the bundle is not
// a run of the protocol.
std::vector<Assignment> eval_goal(const Goal& g, const Bundle& b);

struct DisjunctProof {
  bool inconsistent = false;
  std::size_t conclusion = 0;
  // Most general unifier of the disjunct's equalities, then the match of
  // the conclusion's existential variables.
  Substitution unifier;
  std::map<std::string, std::string> strand_unifier;
  Substitution existentials;
  std::map<std::string, std::string> strand_existentials;
};

struct EntailmentProof {
  // Point-of-view variables to goal terms.
  Substitution pov_terms;
  std::map<std::string, std::string> pov_strands;
  std::vector<DisjunctProof> disjuncts;
};

struct EntailResult {
  bool entailed = false;
  std::optional<EntailmentProof> proof;
  std::string reason;  // when not entailed
};

std::ostream& operator<<(std::ostream& os, const EntailmentProof& p);

// Sound, incomplete: Entailed means the goal follows from the sentence by
// matching, equality normalization and precedence closure. Not entailed
// means only that this method finds no derivation. Throws ValidationError on
// a protocol mismatch.
EntailResult entail(const ShapeSentence& s, const Goal& g);

// Re-checks every step of a proof against the sentence and goal.
bool check_entailment_proof(const ShapeSentence& s, const Goal& g,
                            const EntailmentProof& proof);

// The atoms derivable from a set of atoms by precedence transitivity,
// strand succession below htin heights, and htin height weakening. Height
// weakening is left implicit: covered() accounts for it.
std::set<Atom> prec_closure(const std::vector<Atom>& atoms);
bool covered(const std::set<Atom>& closed, const Atom& a);

}  // namespace strandkit

#endif  // STRANDKIT_LOGIC_H_
