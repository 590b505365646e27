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

#ifndef STRANDKIT_TESTS_SUPPORT_H_
#define STRANDKIT_TESTS_SUPPORT_H_

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "strandkit/io.h"
#include "strandkit/state.h"

namespace strandkit::testing {

inline std::string fixture(const std::string& name) {
  return std::string(STRANDKIT_FIXTURES) + "/" + name;
}

inline std::vector<std::string> fixture_files() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(STRANDKIT_FIXTURES)) {
    const std::string name = e.path().filename().string();
    if (name != "unbalanced.skel") out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Every well-formed fixture, loaded once.
inline Workspace& corpus() {
  static Workspace* ws = [] {
    auto* w = new Workspace;
    for (const std::string& f : fixture_files()) w->load(fixture(f));
    return w;
  }();
  return *ws;
}

inline const BundleFile& bundle(const std::string& name) {
  return corpus().bundle(name);
}

inline const Skeleton& skeleton(const std::string& name) {
  return corpus().skeleton(name);
}

inline const Protocol& protocol(const std::string& name) {
  return *corpus().protocol(name);
}

inline RoleAssignment run_of(const BundleFile& b) {
  return std::get<RoleAssignment>(check_run(b.bundle, *b.protocol, b.hint));
}

inline const std::vector<std::string>& blanchet_bundles() {
  static const std::vector<std::string> names{
      "blanchet-mitm", "blanchet-honest", "blanchet-partial", "blanchet-forged"};
  return names;
}

inline const std::vector<std::string>& all_bundles() {
  static const std::vector<std::string> names{
      "blanchet-mitm",    "blanchet-honest",  "blanchet-partial",
      "blanchet-forged",  "amended-honest",   "amended-partial",
      "acp-two-cashiers", "acp-no-new-card",  "acp-double-spend",
      "acp-new-card",     "single"};
  return names;
}

inline Term a(std::size_t i) { return Term::akey(i); }
inline Term ai(std::size_t i) { return Term::akey(i, true); }
inline Term s(std::size_t i) { return Term::skey(i); }
inline Term d(std::size_t i) { return Term::data(i); }
inline Term g(std::size_t i) { return Term::tag(i); }
inline Term pair(Term x, Term y) { return Term::pair(std::move(x), std::move(y)); }
inline Term enc(Term x, Term k) { return Term::enc(std::move(x), std::move(k)); }

inline Term random_key(std::mt19937& rng) {
  switch (rng() % 3) {
    case 0: return a(rng() % 3);
    case 1: return ai(rng() % 3);
    default: return s(rng() % 3);
  }
}

inline Term random_ground(std::mt19937& rng, int depth) {
  const unsigned pick = depth <= 0 ? rng() % 3 : rng() % 5;
  switch (pick) {
    case 0: return random_key(rng);
    case 1: return d(rng() % 3);
    case 2: return g(rng() % 3);
    case 3: return pair(random_ground(rng, depth - 1), random_ground(rng, depth - 1));
    default: return enc(random_ground(rng, depth - 1), random_key(rng));
  }
}

// Every subterm in a carried position, by direct enumeration.
inline void carried_subterms(const Term& t, std::vector<Term>& out) {
  out.push_back(t);
  if (t.is_pair()) {
    carried_subterms(t.left(), out);
    carried_subterms(t.right(), out);
  } else if (t.is_enc()) {
    carried_subterms(t.plaintext(), out);
  }
}

}  // namespace strandkit::testing

#endif  // STRANDKIT_TESTS_SUPPORT_H_
