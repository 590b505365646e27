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

#include "strandkit/cli.h"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "strandkit/io.h"
#include "strandkit/state.h"

namespace strandkit {

namespace {

struct Options {
  bool sexpr = false;
  std::string file;
  std::string protocol;
  bool search = false;
  std::string from, to, witness;
  std::string skeleton, bundle, analysis, sentence, goal;
  std::string from_node, to_node;
  std::size_t boxes = 1;
  std::size_t len = 8;
  std::string output;
};

class Command {
 public:
  Command(const Options& o, std::ostream& out) : o_(o), out_(out) {}

  int check_bundle();
  int check_run();
  int check_hom();
  int formula();
  int sentence_build();
  int sentence_eval();
  int goal_eval();
  int entail_cmd();
  int state_compat();
  int state_check_or_issue();
  int state_bridge();
  int export_dot_cmd();

 private:
  const BundleFile& load_bundle(const std::string& path) {
    return ws_.bundle(ws_.load_expect(path, FileKind::kBundle));
  }
  RoleAssignment require_run(const BundleFile& bf);
  ShapeSentence load_sentence(const std::string& path);
  void emit(const SExpr& e) { out_ << pretty(e) << "\n"; }

  const Options& o_;
  std::ostream& out_;
  Workspace ws_;
};

SExpr sym(std::string s) { return SExpr::symbol(std::move(s)); }

Node parse_node_arg(const std::string& text) {
  const auto sep = text.find_first_of(",:");
  try {
    if (sep == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const std::size_t s = std::stoul(text.substr(0, sep), &used);
    if (used != sep) throw std::invalid_argument(text);
    const std::string rest = text.substr(sep + 1);
    const std::size_t i = std::stoul(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    return {s, i};
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("NODE", "expected STRAND,INDEX, got " + text);
  }
}

class NotRun : public Error {
 public:
  NotRun(std::string what, NotARun detail)
      : Error(std::move(what)), detail(std::move(detail)) {}
  NotARun detail;
};

RoleAssignment Command::require_run(const BundleFile& bf) {
  RunResult r = strandkit::check_run(bf.bundle, *bf.protocol, bf.hint);
  if (const auto* bad = std::get_if<NotARun>(&r)) {
    throw NotRun("not a run of " + bf.protocol->name(), *bad);
  }
  return std::get<RoleAssignment>(r);
}

ShapeSentence Command::load_sentence(const std::string& path) {
  auto loaded = ws_.load(path);
  for (const auto& [kind, name] : loaded) {
    if (kind == FileKind::kSentence) return ws_.sentence(name);
    if (kind == FileKind::kAnalysis) {
      return build_shape_sentence(ws_.analysis(name));
    }
  }
  throw ParseError(path, 1, 1, "expected a sentence or an analysis");
}

int Command::check_bundle() {
  const BundleFile& bf = load_bundle(o_.file);
  const auto violations = validate_bundle(bf.bundle);
  if (o_.sexpr) {
    std::vector<SExpr> items{sym(violations.empty() ? "valid" : "invalid")};
    for (const Violation& v : violations) {
      std::vector<SExpr> nodes{sym(std::string(violation_name(v.kind)))};
      nodes.push_back(SExpr::string(v.message));
      for (const Node& n : v.nodes) nodes.push_back(node_sexpr(n));
      items.push_back(SExpr::list(std::move(nodes)));
    }
    emit(SExpr::list(std::move(items)));
  } else if (violations.empty()) {
    out_ << bf.name << ": valid bundle, " << bf.bundle.space().size()
         << " strands, " << bf.bundle.edges().size() << " edges\n";
  } else {
    out_ << bf.name << ": invalid bundle\n";
    for (const Violation& v : violations) out_ << "  " << v << "\n";
  }
  return violations.empty() ? kExitHolds : kExitFails;
}

int Command::check_run() {
  auto p = ws_.protocol(ws_.load_expect(o_.protocol, FileKind::kProtocol));
  const BundleFile& bf = load_bundle(o_.file);
  PartialAssignment hint;
  if (!o_.search && bf.protocol->name() == p->name()) hint = bf.hint;
  const RunResult r = strandkit::check_run(bf.bundle, *p, hint);
  if (const auto* bad = std::get_if<NotARun>(&r)) {
    if (o_.sexpr) {
      emit(SExpr::list({sym("not-a-run"),
                        SExpr::list({sym("strand"), SExpr::number(bad->strand)}),
                        SExpr::string(bad->reason)}));
    } else {
      out_ << bf.name << ": not a run of " << p->name() << ": strand "
           << bad->strand << ": " << bad->reason << "\n";
    }
    return kExitFails;
  }
  const auto& rl = std::get<RoleAssignment>(r);
  if (o_.sexpr) {
    std::vector<SExpr> items{sym("run")};
    for (std::size_t s = 0; s < rl.size(); ++s) {
      std::ostringstream os;
      os << rl[s];
      items.push_back(SExpr::list({SExpr::number(s), SExpr::string(os.str())}));
    }
    emit(SExpr::list(std::move(items)));
  } else {
    out_ << bf.name << ": run of " << p->name() << "\n";
    for (std::size_t s = 0; s < rl.size(); ++s) {
      out_ << "  " << s << ": " << rl[s] << "\n";
    }
  }
  return kExitHolds;
}

int Command::check_hom() {
  const Skeleton& from = ws_.skeleton(ws_.load_expect(o_.from, FileKind::kSkeleton));
  auto to = ws_.load(o_.to);
  if (to.empty()) throw ParseError(o_.to, 1, 1, "file defines nothing");
  const std::string hom_name = ws_.load_expect(o_.witness, FileKind::kHom);
  std::vector<HomViolation> violations;
  if (to.front().first == FileKind::kSkeleton) {
    const Skeleton& k1 = ws_.skeleton(to.front().second);
    const HomWitness w = parse_hom(ws_.hom(hom_name), from, k1.vars(), o_.witness);
    violations = verify_hom(from, k1, w);
  } else if (to.front().first == FileKind::kBundle) {
    const BundleFile& bf = ws_.bundle(to.front().second);
    const HomWitness w = parse_hom(ws_.hom(hom_name), from, {}, o_.witness);
    violations = verify_hom_to_bundle(from, bf.bundle, w, bf.hint);
  } else {
    throw ParseError(o_.to, 1, 1, "expected a skeleton or a bundle");
  }
  if (o_.sexpr) {
    std::vector<SExpr> items{sym(violations.empty() ? "homomorphism" : "rejected")};
    for (const HomViolation& v : violations) {
      items.push_back(SExpr::list({SExpr::number(v.property), SExpr::string(v.detail)}));
    }
    emit(SExpr::list(std::move(items)));
  } else if (violations.empty()) {
    out_ << hom_name << ": homomorphism\n";
  } else {
    out_ << hom_name << ": not a homomorphism\n";
    for (const HomViolation& v : violations) out_ << "  " << v << "\n";
  }
  return violations.empty() ? kExitHolds : kExitFails;
}

SExpr formula_sexpr(const Formula& f) {
  std::vector<SExpr> atoms{sym("and")};
  for (const Atom& a : f.atoms) atoms.push_back(atom_sexpr(a));
  return SExpr::list({sym("formula"), declarations_sexpr(f.vars, f.strand_vars),
                      SExpr::list(std::move(atoms))});
}

int Command::formula() {
  const Skeleton& k = ws_.skeleton(ws_.load_expect(o_.skeleton, FileKind::kSkeleton));
  const Formula f = skeleton_formula(k);
  if (o_.bundle.empty()) {
    if (o_.sexpr) {
      emit(formula_sexpr(f));
    } else {
      out_ << k.name() << ":\n";
      for (const Atom& a : f.atoms) out_ << "  " << a << "\n";
    }
    return kExitHolds;
  }
  const BundleFile& bf = load_bundle(o_.bundle);
  const SigmaResult r = eval_sigma(k, bf.bundle);
  if (o_.sexpr) {
    emit(r.satisfiable ? SExpr::list({sym("satisfied"), assignment_sexpr(*r.assignment)})
                       : SExpr::list({sym("unsatisfied"), SExpr::string(r.reason)}));
  } else if (r.satisfiable) {
    out_ << k.name() << " satisfied in " << bf.name << " by " << *r.assignment
         << "\n";
  } else {
    out_ << k.name() << " not satisfied in " << bf.name << ": " << r.reason
         << "\n";
  }
  return r.satisfiable ? kExitHolds : kExitFails;
}

int Command::sentence_build() {
  const ShapeAnalysis& a = ws_.analysis(ws_.load_expect(o_.analysis, FileKind::kAnalysis));
  const ShapeSentence s = build_shape_sentence(a);
  if (o_.sexpr) {
    emit(sentence_sexpr(s));
  } else {
    out_ << s << "\n";
  }
  return kExitHolds;
}

int Command::sentence_eval() {
  const ShapeSentence s = load_sentence(o_.sentence);
  const BundleFile& bf = load_bundle(o_.bundle);
  const SentenceResult r = eval_sentence(s, bf.bundle);
  const char* side = r.side == SentenceResult::Side::kForward ? "forward" : "backward";
  if (o_.sexpr) {
    if (r.holds) {
      emit(SExpr::list({sym("holds")}));
    } else {
      std::vector<SExpr> items{sym("counter-model"), sym(side)};
      if (r.side == SentenceResult::Side::kBackward) {
        items.push_back(SExpr::list({sym("disjunct"), SExpr::number(r.disjunct)}));
      }
      items.push_back(assignment_sexpr(r.assignment));
      emit(SExpr::list(std::move(items)));
    }
  } else if (r.holds) {
    out_ << s.name << " holds in " << bf.name << "\n";
  } else {
    out_ << s.name << " fails in " << bf.name << " (" << side;
    if (r.side == SentenceResult::Side::kBackward) out_ << ", disjunct " << r.disjunct;
    out_ << "): " << r.assignment << "\n";
  }
  return r.holds ? kExitHolds : kExitFails;
}

int Command::goal_eval() {
  const Goal& g = ws_.goal(ws_.load_expect(o_.goal, FileKind::kGoal));
  const BundleFile& bf = load_bundle(o_.bundle);
  require_run(bf);
  const auto violations = eval_goal(g, bf.bundle);
  if (o_.sexpr) {
    std::vector<SExpr> items{sym(violations.empty() ? "holds" : "violated")};
    for (const Assignment& a : violations) items.push_back(assignment_sexpr(a));
    emit(SExpr::list(std::move(items)));
  } else if (violations.empty()) {
    out_ << g.name << " holds in " << bf.name << "\n";
  } else {
    out_ << g.name << " violated in " << bf.name << " by " << violations.size()
         << " assignment" << (violations.size() == 1 ? "" : "s") << "\n";
    for (const Assignment& a : violations) out_ << "  " << a << "\n";
  }
  return violations.empty() ? kExitHolds : kExitFails;
}

int Command::entail_cmd() {
  const ShapeSentence s = load_sentence(o_.sentence);
  Goal g = ws_.goal(ws_.load_expect(o_.goal, FileKind::kGoal));
  if (g.protocol->name() != s.protocol->name()) {
    g.protocol = s.protocol;
    validate_goal(g);
    if (!o_.sexpr) {
      out_ << "reading " << g.name << " against protocol " << s.protocol->name()
           << "\n";
    }
  }
  const EntailResult r = entail(s, g);
  if (o_.sexpr) {
    if (r.entailed) {
      std::ostringstream os;
      os << *r.proof;
      emit(SExpr::list({sym("entailed"), SExpr::string(os.str())}));
    } else {
      emit(SExpr::list({sym("unknown"), SExpr::string(r.reason)}));
    }
  } else if (r.entailed) {
    out_ << s.name << " entails " << g.name << "\n" << *r.proof << "\n";
  } else {
    out_ << "unknown: " << r.reason << "\n";
  }
  return r.entailed ? kExitHolds : kExitFails;
}

StateModel model_of(const Protocol& p) {
  if (!p.boxes()) {
    throw ValidationError("protocol " + p.name() + " declares no state model");
  }
  return acp_state_model(*p.boxes());
}

int Command::state_compat() {
  const BundleFile& bf = load_bundle(o_.bundle);
  const RoleAssignment rl = require_run(bf);
  const CompatibilityResult r =
      check_compatibility(bf.bundle, *bf.protocol, rl, model_of(*bf.protocol));
  if (o_.sexpr) {
    emit(r.compatible ? witness_sexpr(*r.witness)
                      : SExpr::list({sym("incompatible"),
                                     SExpr::list({sym("condition"),
                                                  SExpr::number(r.condition)}),
                                     SExpr::string(r.reason)}));
  } else if (r.compatible) {
    out_ << bf.name << ": compatible\n" << *r.witness << "\n";
  } else {
    out_ << bf.name << ": incompatible (condition " << r.condition
         << "): " << r.reason << "\n";
  }
  return r.compatible ? kExitHolds : kExitFails;
}

int Command::state_check_or_issue() {
  const CheckOrIssueResult r = check_or_issue(acp_state_model(o_.boxes), o_.len);
  if (o_.sexpr) {
    if (r.holds) {
      emit(SExpr::list({sym("holds"), SExpr::list({sym("prefixes"),
                                                   SExpr::number(r.prefixes)})}));
    } else {
      std::vector<SExpr> path{sym("path")};
      for (std::size_t s : r.path) path.push_back(SExpr::number(s));
      emit(SExpr::list({sym("counterexample"), SExpr::list(std::move(path)),
                        SExpr::list({sym("i"), SExpr::number(r.i)}),
                        SExpr::list({sym("k"), SExpr::number(r.k)})}));
    }
  } else if (r.holds) {
    out_ << "check-or-issue holds for bx=" << o_.boxes << ", length "
         << o_.len << " (" << r.prefixes << " prefixes)\n";
  } else {
    out_ << "counterexample for bx=" << o_.boxes << ": path";
    for (std::size_t s : r.path) out_ << " " << s;
    out_ << ", i=" << r.i << ", k=" << r.k << "\n";
  }
  return r.holds ? kExitHolds : kExitFails;
}

int Command::state_bridge() {
  const BundleFile& bf = load_bundle(o_.bundle);
  const RoleAssignment rl = require_run(bf);
  const StateModel m = model_of(*bf.protocol);
  const CompatibilityResult c = check_compatibility(bf.bundle, *bf.protocol, rl, m);
  if (!c.compatible) {
    out_ << bf.name << ": incompatible (condition " << c.condition
         << "): " << c.reason << "\n";
    return kExitFails;
  }
  const BridgeResult r =
      find_bridge_witness(bf.bundle, *bf.protocol, rl, m, *c.witness,
                          parse_node_arg(o_.from_node), parse_node_arg(o_.to_node));
  const bool found = r.kind == BridgeResult::Kind::kGeqState ||
                     r.kind == BridgeResult::Kind::kNewCardNode;
  if (o_.sexpr) {
    std::vector<SExpr> items;
    switch (r.kind) {
      case BridgeResult::Kind::kGeqState: items.push_back(sym("geq-state")); break;
      case BridgeResult::Kind::kNewCardNode: items.push_back(sym("new-card-node")); break;
      case BridgeResult::Kind::kNotApplicable: items.push_back(sym("not-applicable")); break;
      case BridgeResult::Kind::kNoWitness: items.push_back(sym("no-witness")); break;
    }
    items.push_back(SExpr::list({sym("s0"), SExpr::number(r.s0)}));
    items.push_back(SExpr::list({sym("s1"), SExpr::number(r.s1)}));
    if (r.node) items.push_back(SExpr::list({sym("node"), node_sexpr(*r.node)}));
    if (!r.reason.empty()) items.push_back(SExpr::string(r.reason));
    emit(SExpr::list(std::move(items)));
  } else {
    out_ << r << "\n";
  }
  return found ? kExitHolds : kExitFails;
}

int Command::export_dot_cmd() {
  const BundleFile& bf = load_bundle(o_.file);
  const std::string text = export_dot(bf.bundle, bf.name);
  if (o_.output.empty()) {
    out_ << text;
  } else {
    std::ofstream f(o_.output, std::ios::binary);
    if (!f) throw Error("cannot write " + o_.output);
    f << text;
  }
  return kExitHolds;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  Options o;
  CLI::App app{"strand-space verification workbench", "strandkit"};
  app.require_subcommand(1);
  app.add_flag("--sexpr", o.sexpr, "machine-readable S-expression output");

  auto* cb = app.add_subcommand("check-bundle", "validate a bundle file");
  cb->add_option("FILE", o.file)->required();
  auto* cr = app.add_subcommand("check-run", "check a bundle against a protocol");
  cr->add_option("--protocol", o.protocol)->required();
  cr->add_flag("--search", o.search, "ignore the roles named in the file");
  cr->add_option("FILE", o.file)->required();
  auto* ch = app.add_subcommand("check-hom", "verify a homomorphism witness");
  ch->add_option("--from", o.from)->required();
  ch->add_option("--to", o.to)->required();
  ch->add_option("--witness", o.witness)->required();
  auto* fm = app.add_subcommand("formula", "print or evaluate a skeleton formula");
  fm->add_option("--skeleton", o.skeleton)->required();
  fm->add_option("--bundle", o.bundle);
  auto* sn = app.add_subcommand("sentence", "shape analysis sentences");
  sn->require_subcommand(1);
  auto* sb = sn->add_subcommand("build", "build the sentence of an analysis");
  sb->add_option("--analysis", o.analysis)->required();
  auto* se = sn->add_subcommand("eval", "evaluate a sentence in a bundle");
  se->add_option("--sentence", o.sentence)->required();
  se->add_option("--bundle", o.bundle)->required();
  auto* gl = app.add_subcommand("goal", "security goals");
  gl->require_subcommand(1);
  auto* ge = gl->add_subcommand("eval", "evaluate a goal in a bundle");
  ge->add_option("--goal", o.goal)->required();
  ge->add_option("--bundle", o.bundle)->required();
  auto* en = app.add_subcommand("entail", "decide goal entailment by a sentence");
  en->add_option("--sentence", o.sentence)->required();
  en->add_option("--goal", o.goal)->required();
  auto* st = app.add_subcommand("state", "state annotations");
  st->require_subcommand(1);
  auto* sc = st->add_subcommand("compat", "check bundle compatibility");
  sc->add_option("--bundle", o.bundle)->required();
  auto* so = st->add_subcommand("check-or-issue", "exhaustive path check");
  so->add_option("--boxes", o.boxes)->required()->check(CLI::PositiveNumber);
  so->add_option("--len", o.len)->required();
  auto* sr = st->add_subcommand("bridge", "find the node between two annotated nodes");
  sr->add_option("--bundle", o.bundle)->required();
  sr->add_option("--from", o.from_node)->required();
  sr->add_option("--to", o.to_node)->required();
  auto* ed = app.add_subcommand("export-dot", "render a bundle as Graphviz");
  ed->add_option("FILE", o.file)->required();
  ed->add_option("-o,--output", o.output);

  std::vector<std::string> argv_store{"strandkit"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitHolds;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitHolds;
  } catch (const CLI::ParseError& e) {
    err << "strandkit: " << e.what() << "\n";
    return kExitUsage;
  }

  Command cmd(o, out);
  try {
    if (*cb) return cmd.check_bundle();
    if (*cr) return cmd.check_run();
    if (*ch) return cmd.check_hom();
    if (*fm) return cmd.formula();
    if (*sb) return cmd.sentence_build();
    if (*se) return cmd.sentence_eval();
    if (*ge) return cmd.goal_eval();
    if (*en) return cmd.entail_cmd();
    if (*sc) return cmd.state_compat();
    if (*so) return cmd.state_check_or_issue();
    if (*sr) return cmd.state_bridge();
    if (*ed) return cmd.export_dot_cmd();
  } catch (const NotRun& e) {
    out << e.what() << ": strand " << e.detail.strand << ": " << e.detail.reason
        << "\n";
    return kExitFails;
  } catch (const CLI::ValidationError& e) {
    err << "strandkit: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "strandkit: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace strandkit
