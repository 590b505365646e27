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

#include "strandkit/sexpr.h"

#include <cctype>
#include <sstream>

#include "strandkit/errors.h"

namespace strandkit {

SExpr SExpr::symbol(std::string name, std::size_t line, std::size_t column) {
  SExpr e;
  e.kind_ = Kind::kSymbol;
  e.text_ = std::move(name);
  e.line_ = line;
  e.column_ = column;
  return e;
}

SExpr SExpr::number(std::size_t value, std::size_t line, std::size_t column) {
  SExpr e;
  e.kind_ = Kind::kNumber;
  e.value_ = value;
  e.text_ = std::to_string(value);
  e.line_ = line;
  e.column_ = column;
  return e;
}

SExpr SExpr::string(std::string text, std::size_t line, std::size_t column) {
  SExpr e;
  e.kind_ = Kind::kString;
  e.text_ = std::move(text);
  e.line_ = line;
  e.column_ = column;
  return e;
}

SExpr SExpr::list(std::vector<SExpr> items, std::size_t line,
                  std::size_t column) {
  SExpr e;
  e.kind_ = Kind::kList;
  e.items_ = std::move(items);
  e.line_ = line;
  e.column_ = column;
  return e;
}

bool SExpr::is_form(std::string_view head) const {
  return is_list() && !items_.empty() && items_[0].is_symbol(head);
}

bool operator==(const SExpr& a, const SExpr& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ == SExpr::Kind::kList) return a.items_ == b.items_;
  return a.text_ == b.text_;
}

namespace {

class Reader {
 public:
  Reader(std::string_view text, const std::string& file)
      : text_(text), file_(file) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip();
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& message, std::size_t line,
                         std::size_t column) const {
    throw ParseError(file_, line, column, message);
  }

  char peek() const { return text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(peek()))) {
        advance();
      } else if (peek() == ';') {
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    const std::size_t line = line_, column = column_;
    const char c = peek();
    if (c == '(') {
      advance();
      std::vector<SExpr> items;
      skip();
      while (pos_ < text_.size() && peek() != ')') {
        items.push_back(read());
        skip();
      }
      if (pos_ >= text_.size()) fail("unbalanced parenthesis", line, column);
      advance();
      return SExpr::list(std::move(items), line, column);
    }
    if (c == ')') fail("unexpected ')'", line, column);
    if (c == '"') {
      advance();
      std::string text;
      while (pos_ < text_.size() && peek() != '"') {
        if (peek() == '\\') {
          advance();
          if (pos_ >= text_.size()) break;
        }
        text.push_back(peek());
        advance();
      }
      if (pos_ >= text_.size()) fail("unterminated string", line, column);
      advance();
      return SExpr::string(std::move(text), line, column);
    }
    std::string token;
    while (pos_ < text_.size()) {
      const char d = peek();
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' ||
          d == ')' || d == '"' || d == ';') {
        break;
      }
      token.push_back(d);
      advance();
    }
    const bool numeric =
        !token.empty() && token.find_first_not_of("0123456789") ==
                              std::string::npos;
    if (numeric) {
      std::size_t value = 0;
      try {
        value = std::stoull(token);
      } catch (const std::exception&) {
        fail("number out of range: " + token, line, column);
      }
      return SExpr::number(value, line, column);
    }
    return SExpr::symbol(std::move(token), line, column);
  }

  std::string_view text_;
  const std::string& file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

void write(std::ostream& os, const SExpr& e) {
  switch (e.kind()) {
    case SExpr::Kind::kSymbol:
    case SExpr::Kind::kNumber: os << e.text(); break;
    case SExpr::Kind::kString:
      os << '"';
      for (char c : e.text()) {
        if (c == '"' || c == '\\') os << '\\';
        os << c;
      }
      os << '"';
      break;
    case SExpr::Kind::kList:
      os << '(';
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (i) os << ' ';
        write(os, e[i]);
      }
      os << ')';
      break;
  }
}

void write_pretty(std::ostream& os, const SExpr& e, std::size_t indent,
                  std::size_t width) {
  const std::string flat = to_string(e);
  if (!e.is_list() || e.size() < 2 || indent + flat.size() <= width) {
    os << flat;
    return;
  }
  os << '(';
  write(os, e[0]);
  std::size_t first = 1;
  // Keep short atom arguments on the head line: (defrole init ...
  while (first < e.size() && !e[first].is_list()) {
    os << ' ';
    write(os, e[first]);
    ++first;
  }
  for (std::size_t i = first; i < e.size(); ++i) {
    os << '\n' << std::string(indent + 2, ' ');
    write_pretty(os, e[i], indent + 2, width);
  }
  os << ')';
}

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text,
                                const std::string& file) {
  return Reader(text, file).read_all();
}

std::string to_string(const SExpr& e) {
  std::ostringstream os;
  write(os, e);
  return os.str();
}

std::string pretty(const SExpr& e, std::size_t width) {
  std::ostringstream os;
  write_pretty(os, e, 0, width);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const SExpr& e) {
  write(os, e);
  return os;
}

}  // namespace strandkit
