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

// Reading and writing the workbench's file formats. The grammar is in
// docs/grammar.md.
#ifndef STRANDKIT_IO_H_
#define STRANDKIT_IO_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "strandkit/algebra.h"
#include "strandkit/bundle.h"
#include "strandkit/logic.h"
#include "strandkit/protocol.h"
#include "strandkit/sexpr.h"
#include "strandkit/skeleton.h"
#include "strandkit/state.h"

namespace strandkit {

using Scope = std::map<std::string, VarKey>;

// Terms: (akey N) (akey-inv N) (skey N) (data N) (tag N) (var X SORT)
// (invk T) (pair T T ...) (enc T K), or a bare symbol naming a variable in
// scope.
Term parse_term(const SExpr& e, const Scope& scope, const std::string& file);
SExpr term_sexpr(const Term& t);

// Declarations ((x y SORT) ...). Strand variables use the sort strd.
struct Declarations {
  std::vector<VarKey> vars;
  std::vector<std::string> strands;
};
Declarations parse_declarations(const SExpr& e, const std::string& file);
SExpr declarations_sexpr(const std::vector<VarKey>& vars,
                         const std::vector<std::string>& strands = {});

Atom parse_atom(const SExpr& e, const Scope& scope,
                const std::set<std::string>& strands, const std::string& file);
SExpr atom_sexpr(const Atom& a);

struct BundleFile {
  std::string name;
  std::shared_ptr<const Protocol> protocol;
  Bundle bundle;
  // Roles named in the file, one entry per strand.
  PartialAssignment hint;
};

enum class FileKind {
  kProtocol,
  kSkeleton,
  kBundle,
  kHom,
  kAnalysis,
  kSentence,
  kGoal,
};
std::string_view file_kind_name(FileKind kind);

// Loaded objects by name. A form naming a protocol that is not loaded makes
// the workspace look for NAME.prot beside the file being read, then in the
// search directories.
class Workspace {
 public:
  void add_search_dir(std::string dir) { dirs_.push_back(std::move(dir)); }

  // Loads every top-level form; returns what was defined, in file order.
  std::vector<std::pair<FileKind, std::string>> load(const std::string& path);
  std::vector<std::pair<FileKind, std::string>> load_text(
      std::string_view text, const std::string& file,
      const std::string& dir = ".");

  // Loads a file whose first form must be of the given kind; returns its
  // name. Throws ParseError otherwise.
  std::string load_expect(const std::string& path, FileKind kind);

  std::shared_ptr<const Protocol> protocol(const std::string& name) const;
  const Skeleton& skeleton(const std::string& name) const;
  const BundleFile& bundle(const std::string& name) const;
  const SExpr& hom(const std::string& name) const;
  const ShapeAnalysis& analysis(const std::string& name) const;
  const ShapeSentence& sentence(const std::string& name) const;
  const Goal& goal(const std::string& name) const;

  void add_protocol(std::shared_ptr<const Protocol> p);

 private:
  std::shared_ptr<const Protocol> require_protocol(const SExpr& name_form,
                                                   const std::string& file,
                                                   const std::string& dir);
  std::pair<FileKind, std::string> load_form(const SExpr& form,
                                             const std::string& file,
                                             const std::string& dir);
  Skeleton parse_skeleton(const SExpr& form, const std::string& file,
                          const std::string& dir);

  std::vector<std::string> dirs_;
  std::map<std::string, std::shared_ptr<const Protocol>> protocols_;
  std::map<std::string, Skeleton> skeletons_;
  std::map<std::string, BundleFile> bundles_;
  std::map<std::string, SExpr> homs_;
  std::map<std::string, ShapeAnalysis> analyses_;
  std::map<std::string, ShapeSentence> sentences_;
  std::map<std::string, Goal> goals_;
  std::set<std::string> loading_;
};

// Resolves a (defhom ...) form between a skeleton and a codomain whose
// variables are given (none for a bundle).
HomWitness parse_hom(const SExpr& form, const Skeleton& from,
                     const std::vector<VarKey>& to_vars,
                     const std::string& file);

SExpr protocol_sexpr(const Protocol& p);
SExpr skeleton_sexpr(const Skeleton& k);
SExpr bundle_sexpr(const BundleFile& b);
SExpr hom_sexpr(const std::string& name, const HomWitness& w);
SExpr analysis_sexpr(const ShapeAnalysis& a);
SExpr sentence_sexpr(const ShapeSentence& s);
SExpr goal_sexpr(const Goal& g);

SExpr assignment_sexpr(const Assignment& a);
SExpr node_sexpr(const Node& n);
SExpr witness_sexpr(const CompatibilityWitness& w);
SExpr transitions_sexpr(const TransitionSet& t);

std::string read_file(const std::string& path);

// Graphviz digraph: a cluster per strand, a node per event labelled with
// its sign and message, double-line edges for succession and plain edges
// for communication. Throws ValidationError for an invalid bundle.
std::string export_dot(const Bundle& b, const std::string& name = "bundle");

}  // namespace strandkit

#endif  // STRANDKIT_IO_H_
