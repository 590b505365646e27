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

// A small S-expression reader and printer. Comments run from ';' to the end
// of the line. Atoms are symbols, naturals or double-quoted strings.
#ifndef STRANDKIT_SEXPR_H_
#define STRANDKIT_SEXPR_H_

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace strandkit {

class SExpr {
 public:
  enum class Kind { kSymbol, kNumber, kString, kList };

  static SExpr symbol(std::string name, std::size_t line = 0,
                      std::size_t column = 0);
  static SExpr number(std::size_t value, std::size_t line = 0,
                      std::size_t column = 0);
  static SExpr string(std::string text, std::size_t line = 0,
                      std::size_t column = 0);
  static SExpr list(std::vector<SExpr> items, std::size_t line = 0,
                    std::size_t column = 0);

  Kind kind() const { return kind_; }
  bool is_symbol() const { return kind_ == Kind::kSymbol; }
  bool is_symbol(std::string_view name) const {
    return kind_ == Kind::kSymbol && text_ == name;
  }
  bool is_number() const { return kind_ == Kind::kNumber; }
  bool is_string() const { return kind_ == Kind::kString; }
  bool is_list() const { return kind_ == Kind::kList; }
  // A list whose first item is the given symbol.
  bool is_form(std::string_view head) const;

  const std::string& text() const { return text_; }
  std::size_t value() const { return value_; }
  const std::vector<SExpr>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  const SExpr& operator[](std::size_t i) const { return items_.at(i); }

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

  // Structural equality; locations are ignored.
  friend bool operator==(const SExpr& a, const SExpr& b);

 private:
  Kind kind_ = Kind::kList;
  std::string text_;
  std::size_t value_ = 0;
  std::vector<SExpr> items_;
  std::size_t line_ = 0;
  std::size_t column_ = 0;
};

// Every top-level expression in text. Throws ParseError, naming file.
std::vector<SExpr> parse_sexprs(std::string_view text,
                                const std::string& file = "<input>");

// Single-line rendering.
std::string to_string(const SExpr& e);
// Multi-line rendering: a list that does not fit in width columns puts each
// item after the head on its own line.
std::string pretty(const SExpr& e, std::size_t width = 78);
std::ostream& operator<<(std::ostream& os, const SExpr& e);

}  // namespace strandkit

#endif  // STRANDKIT_SEXPR_H_
