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

// One line per acceptance criterion; exits nonzero if any fails.

#include <iostream>
#include <sstream>

#include "strandkit/cli.h"
#include "support.h"

using namespace strandkit;
using namespace strandkit::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return run_cli(args, out, err);
}

std::string fx(const std::string& name) { return fixture(name); }

Outcome blanchet_falsification() {
  Outcome o;
  const BundleFile& mitm = bundle("blanchet-mitm");
  o.require(validate_bundle(mitm.bundle).empty(), "bundle does not validate");
  const RunResult run = check_run(mitm.bundle, protocol("blanchet"));
  o.require(std::holds_alternative<RoleAssignment>(run), "not a run of the protocol");
  if (!o.pass) return o;
  const auto bad = eval_goal(corpus().goal("auth"), mitm.bundle);
  o.require(bad.size() == 1, "expected one violating assignment, got " + std::to_string(bad.size()));
  if (!o.pass) return o;
  const Term b = *bad[0].terms.find({"b", Sort::kAKey});
  std::optional<Term> init_b;
  for (const StrandRole& r : std::get<RoleAssignment>(run)) {
    if (r.role == "init") init_b = *r.binding.find({"b", Sort::kAKey});
  }
  o.require(init_b && *init_b != b, "no init strand with a different responder key");
  o.require(cli({"goal", "eval", "--goal", fx("auth.goal"), "--bundle",
                 fx("blanchet-mitm.bundle")}) == kExitFails,
            "goal eval did not exit 1");
  if (o.pass) o.detail = "one violation; responder b = " + to_string(b) + ", init b = " + to_string(*init_b);
  return o;
}

Outcome sentence_fidelity() {
  Outcome o;
  const ShapeSentence s = build_shape_sentence(corpus().analysis("blanchet"));
  o.require(alpha_equivalent(s, corpus().sentence("blanchet")), "not alpha-equivalent to the golden sentence");
  o.require(s.disjuncts.size() == 1, "expected one disjunct");
  if (!o.pass) return o;
  const Disjunct& d = s.disjuncts[0];
  o.require(d.delta.size() == 5, "expected five equalities");
  std::size_t uniq = 0, prec = 0;
  for (const Atom& a : d.atoms) {
    uniq += std::holds_alternative<Uniq>(a);
    prec += std::holds_alternative<Prec>(a);
  }
  o.require(uniq > 0 && prec > 0, "missing uniq or prec conjuncts");
  o.detail = o.pass ? "alpha-equivalent, 5 equalities" : o.detail;
  return o;
}

Outcome theorem_one() {
  Outcome o;
  const ShapeAnalysis& amended = corpus().analysis("amended");
  std::vector<std::pair<const Skeleton*, std::string>> cases;
  for (const std::string& b : blanchet_bundles()) {
    cases.push_back({&skeleton("k0"), b});
    cases.push_back({&skeleton("k1"), b});
    cases.push_back({&skeleton("heard"), b});
  }
  for (const char* b : {"amended-honest", "amended-partial"}) {
    cases.push_back({&amended.pov, b});
    cases.push_back({&amended.shapes[0].skeleton, b});
  }
  std::size_t assignments = 0, discrepancies = 0, inhabited = 0;
  for (const auto& [k, name] : cases) {
    const BundleFile& bf = bundle(name);
    const Formula f = skeleton_formula(*k);
    const auto all = satisfy(k->protocol(), f.atoms, bf.bundle);
    inhabited += !all.empty();
    for (const Assignment& a : all) {
      ++assignments;
      const HomWitness w = induced_witness(*k, a);
      if (!verify_hom_to_bundle(*k, bf.bundle, w, bf.hint).empty()) ++discrepancies;
      const Assignment back = induced_assignment(*k, w);
      if (!check_assignment(k->protocol(), f.atoms, bf.bundle, back)) ++discrepancies;
    }
  }
  const BundleFile& mitm = bundle("blanchet-mitm");
  const HomWitness given = parse_hom(corpus().hom("k0-mitm"), skeleton("k0"), {}, "k0-mitm.hom");
  o.require(verify_hom_to_bundle(skeleton("k0"), mitm.bundle, given, mitm.hint).empty(),
            "shipped witness rejected");
  o.require(check_assignment(skeleton("k0").protocol(), skeleton_formula(skeleton("k0")).atoms,
                             mitm.bundle, induced_assignment(skeleton("k0"), given)),
            "shipped witness induces no satisfying assignment");
  o.require(inhabited >= 6, "fewer than six inhabited pairs");
  o.require(discrepancies == 0, std::to_string(discrepancies) + " discrepancies");
  if (o.pass) {
    o.detail = std::to_string(cases.size()) + " pairs, " + std::to_string(assignments) +
               " assignments, 0 discrepancies";
  }
  return o;
}

Outcome theorem_two() {
  Outcome o;
  const ShapeSentence& s = corpus().sentence("blanchet");
  for (const std::string& name : blanchet_bundles()) {
    o.require(eval_sentence(s, bundle(name).bundle).holds, "fails on " + name);
  }
  ShapeSentence dropped = s;
  dropped.disjuncts.clear();
  ShapeSentence weakened = s;
  std::erase_if(weakened.disjuncts[0].atoms, [](const Atom& a) {
    const auto* h = std::get_if<HtIn>(&a);
    return h != nullptr && h->role == "init";
  });
  std::size_t flipped = 0, flipped_weak = 0;
  for (const std::string& name : blanchet_bundles()) {
    flipped += !eval_sentence(dropped, bundle(name).bundle).holds;
    flipped_weak += !eval_sentence(weakened, bundle(name).bundle).holds;
  }
  o.require(flipped > 0, "mutation flips no bundle");
  if (o.pass) {
    o.detail = "holds on " + std::to_string(blanchet_bundles().size()) +
               " bundles; without the init disjunct fails on " + std::to_string(flipped) +
               ", without its init conjunct on " + std::to_string(flipped_weak);
  }
  return o;
}

Outcome amended_entailment() {
  Outcome o;
  const ShapeAnalysis& a = corpus().analysis("amended");
  for (const Shape& sh : a.shapes) {
    o.require(verify_hom(a.pov, sh.skeleton, sh.hom).empty(), "shape homomorphism rejected");
  }
  const ShapeSentence s = build_shape_sentence(a);
  for (const char* name : {"amended-honest", "amended-partial"}) {
    o.require(eval_sentence(s, bundle(name).bundle).holds, std::string("fails on ") + name);
  }
  const EntailResult r = entail(s, corpus().goal("amended-auth"));
  o.require(r.entailed && check_entailment_proof(s, corpus().goal("amended-auth"), *r.proof),
            "goal not entailed");
  o.require(cli({"entail", "--sentence", fx("amended.sas"), "--goal", fx("amended-auth.goal")}) ==
                kExitHolds,
            "entail did not exit 0");
  o.require(cli({"entail", "--sentence", fx("blanchet.sas"), "--goal", fx("auth.goal")}) ==
                kExitFails,
            "flawed entail did not exit 1");
  o.detail = o.pass ? "entailed, proof re-checked; flawed sentence unknown" : o.detail;
  return o;
}

Outcome check_or_issue_lemma() {
  Outcome o;
  std::size_t prefixes = 0;
  for (std::size_t bx : {1u, 2u, 3u}) {
    for (std::size_t len = 2; len <= 8; ++len) {
      const CheckOrIssueResult r = check_or_issue(acp_state_model(bx), len);
      o.require(r.holds, "fails for bx=" + std::to_string(bx));
      prefixes += r.prefixes;
    }
  }
  StateModel corrupted = acp_state_model(1);
  std::erase(corrupted.tau, TransitionSet::new_card());
  const CheckOrIssueResult r = check_or_issue(corrupted, 8);
  o.require(!r.holds,
            "tau without NewCard is strictly decreasing and has no infinite path, "
            "so no counterexample exists");
  if (o.pass) o.detail = std::to_string(prefixes) + " prefixes hold; corrupted tau refuted";
  return o;
}

Outcome bridge() {
  Outcome o;
  const BundleFile& bf = bundle("acp-two-cashiers");
  const RoleAssignment rl = run_of(bf);
  const StateModel m = acp_state_model(*bf.protocol->boxes());
  const CompatibilityResult c = check_compatibility(bf.bundle, *bf.protocol, rl, m);
  o.require(c.compatible, "two-cashier bundle incompatible");
  if (!o.pass) return o;
  o.require(!validate_compatibility(bf.bundle, *bf.protocol, rl, m, *c.witness),
            "witness does not re-validate");
  const BridgeResult r =
      find_bridge_witness(bf.bundle, *bf.protocol, rl, m, *c.witness, {8, 3}, {14, 3});
  o.require(r.kind == BridgeResult::Kind::kNewCardNode && r.node == Node{12, 1},
            "no new-card node between the cashiers");
  const BundleFile& gone = bundle("acp-no-new-card");
  o.require(!check_compatibility(gone.bundle, *gone.protocol, run_of(gone), m).compatible,
            "bundle without the new card is compatible");
  o.detail = o.pass ? "new card at (12 1); removal incompatible" : o.detail;
  return o;
}

Outcome algebra() {
  Outcome o;
  std::mt19937 rng(2026);
  for (int i = 0; i < 1000; ++i) {
    const Term t = random_ground(rng, 4);
    o.require(carried_by(t, t), "carried by not reflexive");
    std::vector<Term> mid, low;
    carried_subterms(t, mid);
    const Term& u = mid[rng() % mid.size()];
    carried_subterms(u, low);
    o.require(carried_by(low[rng() % low.size()], t), "carried by not transitive");
    const Term k = random_key(rng);
    o.require(invert_key(invert_key(k)) == k, "invk not an involution");
    const Term p = pair(Term::var("m", Sort::kTop), enc(Term::var("n", Sort::kData),
                                                        Term::var("x", Sort::kAKey, true)));
    Substitution sub;
    sub.bind({"m", Sort::kTop}, t);
    sub.bind({"n", Sort::kData}, d(rng() % 3));
    sub.bind({"x", Sort::kAKey}, a(rng() % 3));
    const auto theta = match(p, apply(sub, p));
    o.require(theta && *theta == sub, "match does not invert apply");
  }
  std::size_t uniq = 0;
  for (const std::string& name : all_bundles()) {
    const BundleFile& bf = bundle(name);
    const RoleAssignment rl = run_of(bf);
    for (std::size_t st = 0; st < rl.size(); ++st) {
      const RoleItem item = role_item(*bf.protocol, rl[st]);
      const std::size_t height = bf.bundle.space().trace(st).size();
      for (std::size_t i = 0; i < height && i < item.uniqorig.size(); ++i) {
        for (const Term& term : item.uniqorig[i]) {
          ++uniq;
          o.require(uniquely_originates(bf.bundle.space(), term, {st, i}),
                    to_string(term) + " not uniquely originating in " + name);
        }
      }
    }
  }
  if (o.pass) o.detail = "1000 samples; " + std::to_string(uniq) + " uniq assumptions hold";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"blanchet falsification", blanchet_falsification},
      {"sentence fidelity", sentence_fidelity},
      {"assignments and homomorphisms", theorem_one},
      {"sentence holds in runs", theorem_two},
      {"amended entailment", amended_entailment},
      {"check or issue", check_or_issue_lemma},
      {"bridge", bridge},
      {"algebra properties", algebra},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << "  "
              << criteria[i].first << ": " << o.detail << "\n";
  }
  return failed == 0 ? 0 : 1;
}
