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

#include "support.h"

using namespace strandkit;
using namespace strandkit::testing;

namespace {

const std::vector<VarKey>& pattern_vars() {
  static const std::vector<VarKey> vars{{"x", Sort::kAKey},
                                        {"k", Sort::kSKey},
                                        {"n", Sort::kData},
                                        {"m", Sort::kTop}};
  return vars;
}

Term random_pattern(std::mt19937& rng, int depth) {
  const unsigned pick = depth <= 0 ? rng() % 4 : rng() % 6;
  switch (pick) {
    case 0: {
      const VarKey& v = pattern_vars()[rng() % 4];
      return Term::var(v.name, v.sort, v.sort == Sort::kAKey && rng() % 2 == 0);
    }
    case 1: return random_key(rng);
    case 2: return d(rng() % 3);
    case 3: return g(rng() % 3);
    case 4: return pair(random_pattern(rng, depth - 1), random_pattern(rng, depth - 1));
    default: {
      Term key = rng() % 2 == 0 ? Term::var("x", Sort::kAKey, rng() % 2 == 0)
                                : random_key(rng);
      return enc(random_pattern(rng, depth - 1), key);
    }
  }
}

Substitution random_ground_sub(std::mt19937& rng) {
  Substitution sub;
  sub.bind({"x", Sort::kAKey}, a(rng() % 3));
  sub.bind({"k", Sort::kSKey}, s(rng() % 3));
  sub.bind({"n", Sort::kData}, d(rng() % 3));
  sub.bind({"m", Sort::kTop}, random_ground(rng, 2));
  return sub;
}

struct Case {
  const Skeleton* skeleton;
  std::string bundle;
};

std::vector<Case> skeleton_bundle_pairs() {
  const ShapeAnalysis& amended = corpus().analysis("amended");
  std::vector<Case> out;
  for (const std::string& b : blanchet_bundles()) {
    out.push_back({&skeleton("k0"), b});
    out.push_back({&skeleton("k1"), b});
    out.push_back({&skeleton("heard"), b});
  }
  for (const char* b : {"amended-honest", "amended-partial"}) {
    out.push_back({&amended.pov, b});
    out.push_back({&amended.shapes[0].skeleton, b});
  }
  return out;
}

}  // namespace

TEST_CASE("constructed terms are canonical") {
  std::mt19937 rng(1);
  for (int i = 0; i < 500; ++i) {
    const Term t = random_pattern(rng, 4);
    CHECK(is_canonical(t));
    CHECK(is_canonical(apply(random_ground_sub(rng), t)));
  }
}

TEST_CASE("inversion is an involution on keys") {
  std::mt19937 rng(2);
  for (int i = 0; i < 200; ++i) {
    const Term k = random_key(rng);
    CHECK(invert_key(invert_key(k)) == k);
    CHECK(sort_of(invert_key(k)) == sort_of(k));
  }
}

TEST_CASE("matching inverts substitution") {
  std::mt19937 rng(3);
  for (int i = 0; i < 500; ++i) {
    const Term p = random_pattern(rng, 4);
    const Substitution sub = random_ground_sub(rng);
    const Term t = apply(sub, p);
    CHECK(is_ground(t));
    const auto theta = match(p, t);
    REQUIRE(theta.has_value());
    CHECK(apply(*theta, p) == t);
    for (const VarKey& v : variables(p)) CHECK(*theta->find(v) == *sub.find(v));
  }
}

TEST_CASE("substitution composes") {
  std::mt19937 rng(4);
  for (int i = 0; i < 300; ++i) {
    const Term p = random_pattern(rng, 3);
    Substitution inner;
    inner.bind({"m", Sort::kTop}, pair(Term::var("n", Sort::kData), random_pattern(rng, 1)));
    inner.bind({"k", Sort::kSKey}, s(rng() % 3));
    const Substitution outer = random_ground_sub(rng);
    CHECK(apply(outer, apply(inner, p)) == apply(inner.then(outer), p));
    const Term l = random_pattern(rng, 2);
    const Term r = random_pattern(rng, 2);
    CHECK(apply(outer, pair(l, r)) == pair(apply(outer, l), apply(outer, r)));
  }
}

TEST_CASE("carried by is reflexive and transitive") {
  std::mt19937 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Term t = random_ground(rng, 4);
    CHECK(carried_by(t, t));
    std::vector<Term> mid;
    carried_subterms(t, mid);
    const Term& u = mid[rng() % mid.size()];
    std::vector<Term> low;
    carried_subterms(u, low);
    CHECK(carried_by(low[rng() % low.size()], t));
  }
}

TEST_CASE("precedence is a strict order") {
  for (const std::string& name : all_bundles()) {
    CAPTURE(name);
    const Bundle& b = bundle(name).bundle;
    const Precedence prec(b);
    for (const Node& x : prec.nodes()) {
      CHECK_FALSE(prec(x, x));
      for (const Node& y : prec.nodes()) {
        if (!prec(x, y)) continue;
        CHECK_FALSE(prec(y, x));
        for (const Node& z : prec.nodes()) {
          if (prec(y, z)) CHECK(prec(x, z));
        }
      }
    }
  }
}

TEST_CASE("every reception in a bundle has one transmitter") {
  for (const std::string& name : all_bundles()) {
    CAPTURE(name);
    const Bundle& b = bundle(name).bundle;
    const StrandSpace& space = b.space();
    for (std::size_t st = 0; st < space.size(); ++st) {
      for (std::size_t i = 0; i < space.trace(st).size(); ++i) {
        if (!space.trace(st)[i].inbound()) continue;
        std::size_t in = 0;
        for (const CommEdge& e : b.edges()) {
          if (e.to == Node{st, i}) {
            ++in;
            CHECK(evt(space, e.from).outbound());
            CHECK(evt(space, e.from).message == space.trace(st)[i].message);
          }
        }
        CHECK(in == 1);
      }
    }
  }
}

TEST_CASE("satisfying assignments and homomorphisms correspond") {
  std::size_t pairs = 0;
  std::size_t with_hom = 0;
  for (const Case& c : skeleton_bundle_pairs()) {
    CAPTURE(c.skeleton->name());
    CAPTURE(c.bundle);
    const BundleFile& bf = bundle(c.bundle);
    const Formula f = skeleton_formula(*c.skeleton);
    const auto all = satisfy(c.skeleton->protocol(), f.atoms, bf.bundle);
    ++pairs;
    if (!all.empty()) ++with_hom;
    for (const Assignment& asg : all) {
      CHECK(check_assignment(c.skeleton->protocol(), f.atoms, bf.bundle, asg));
      const HomWitness w = induced_witness(*c.skeleton, asg);
      CHECK(verify_hom_to_bundle(*c.skeleton, bf.bundle, w, bf.hint).empty());
      const Assignment back = induced_assignment(*c.skeleton, w);
      CHECK(back == restrict(asg, f.vars, f.strand_vars));
      CHECK(same_hom(*c.skeleton, induced_witness(*c.skeleton, back), w));
    }
    CHECK(eval_sigma(*c.skeleton, bf.bundle).satisfiable == !all.empty());
  }
  CHECK(pairs >= 6);
  CHECK(with_hom >= 6);
}

TEST_CASE("a homomorphism into a bundle gives a satisfying assignment") {
  const BundleFile& mitm = bundle("blanchet-mitm");
  const HomWitness w =
      parse_hom(corpus().hom("k0-mitm"), skeleton("k0"), {}, "k0-mitm.hom");
  REQUIRE(verify_hom_to_bundle(skeleton("k0"), mitm.bundle, w, mitm.hint).empty());
  const Formula f = skeleton_formula(skeleton("k0"));
  CHECK(check_assignment(skeleton("k0").protocol(), f.atoms, mitm.bundle,
                         induced_assignment(skeleton("k0"), w)));
}

TEST_CASE("homomorphisms compose") {
  const Skeleton& k0 = skeleton("k0");
  const Skeleton& k1 = skeleton("k1");
  const HomWitness delta = parse_hom(corpus().hom("delta1"), k0, k1.vars(), "delta1.hom");
  CHECK(same_hom(k0, compose(identity_witness(k0), delta), delta));
  CHECK(same_hom(k0, compose(delta, identity_witness(k1)), delta));
  std::size_t composed = 0;
  for (const std::string& name : blanchet_bundles()) {
    CAPTURE(name);
    const BundleFile& bf = bundle(name);
    const SigmaResult r = eval_sigma(k1, bf.bundle);
    if (!r.satisfiable) continue;
    const HomWitness w = compose(delta, *r.witness);
    CHECK(verify_hom_to_bundle(k0, bf.bundle, w, bf.hint).empty());
    ++composed;
  }
  CHECK(composed >= 2);
}

TEST_CASE("shape sentences hold in every run") {
  const ShapeSentence blanchet = build_shape_sentence(corpus().analysis("blanchet"));
  const ShapeSentence amended = build_shape_sentence(corpus().analysis("amended"));
  for (const std::string& name : blanchet_bundles()) {
    CHECK(eval_sentence(blanchet, bundle(name).bundle).holds);
  }
  for (const char* name : {"amended-honest", "amended-partial"}) {
    CHECK(eval_sentence(amended, bundle(name).bundle).holds);
  }
}

TEST_CASE("entailment is sound over the corpus") {
  struct Pair {
    ShapeSentence sentence;
    const char* goal;
    std::vector<std::string> bundles;
  };
  const std::vector<Pair> pairs{
      {build_shape_sentence(corpus().analysis("blanchet")), "auth", blanchet_bundles()},
      {build_shape_sentence(corpus().analysis("amended")), "amended-auth",
       {"amended-honest", "amended-partial"}},
  };
  std::size_t entailed = 0;
  for (const Pair& p : pairs) {
    CAPTURE(p.goal);
    const Goal& g = corpus().goal(p.goal);
    const EntailResult r = entail(p.sentence, g);
    if (!r.entailed) continue;
    ++entailed;
    CHECK(check_entailment_proof(p.sentence, g, *r.proof));
    for (const std::string& b : p.bundles) {
      CAPTURE(b);
      REQUIRE(eval_sentence(p.sentence, bundle(b).bundle).holds);
      CHECK(eval_goal(g, bundle(b).bundle).empty());
    }
  }
  CHECK(entailed >= 1);
}

TEST_CASE("precedence closure is closed and sound") {
  for (const Case& c : skeleton_bundle_pairs()) {
    CAPTURE(c.skeleton->name());
    CAPTURE(c.bundle);
    const Formula f = skeleton_formula(*c.skeleton);
    const std::set<Atom> closed = prec_closure(f.atoms);
    for (const Atom& at : f.atoms) CHECK(covered(closed, at));
    const std::vector<Atom> again(closed.begin(), closed.end());
    CHECK(prec_closure(again) == closed);
    const BundleFile& bf = bundle(c.bundle);
    for (const Assignment& asg : satisfy(c.skeleton->protocol(), f.atoms, bf.bundle)) {
      CHECK(check_assignment(c.skeleton->protocol(), again, bf.bundle, asg));
    }
  }
}
