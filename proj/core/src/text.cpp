// Copyright 2026 The psmfuzz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "text.hpp"

#include <cctype>
#include <limits>

#include "psmfuzz/errors.hpp"

namespace psmfuzz {

namespace {

std::string located(std::size_t line, std::size_t column, const std::string& message) {
  std::string out = "line " + std::to_string(line);
  if (column > 0) out += ", column " + std::to_string(column);
  return out + ": " + message;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(located(line, column, message)),
      line_(line),
      column_(column),
      message_(message) {}

namespace detail {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<SourceLine> logical_lines(std::string_view document) {
  std::vector<SourceLine> lines;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= document.size()) {
    std::size_t end = document.find('\n', start);
    if (end == std::string_view::npos) end = document.size();
    ++number;
    std::string_view raw = document.substr(start, end - start);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
    bool blank = true;
    for (char c : raw) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        blank = false;
        break;
      }
    }
    if (!blank) lines.push_back({number, std::string(raw)});
    if (end == document.size()) break;
    start = end + 1;
  }
  return lines;
}

void Cursor::skip_ws() {
  while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
}

bool Cursor::at_end() {
  skip_ws();
  return pos_ >= text_.size();
}

char Cursor::peek() {
  skip_ws();
  return pos_ < text_.size() ? text_[pos_] : '\0';
}

bool Cursor::consume(char c) {
  if (peek() == c) {
    ++pos_;
    return true;
  }
  return false;
}

bool Cursor::consume(std::string_view token) {
  skip_ws();
  if (text_.substr(pos_, token.size()) == token) {
    pos_ += token.size();
    return true;
  }
  return false;
}

bool Cursor::consume_word(std::string_view word) {
  skip_ws();
  if (text_.substr(pos_, word.size()) != word) return false;
  std::size_t after = pos_ + word.size();
  if (after < text_.size() && is_ident_char(text_[after])) return false;
  pos_ = after;
  return true;
}

void Cursor::expect(char c, std::string_view what) {
  if (!consume(c)) fail("expected '" + std::string(1, c) + "' " + std::string(what));
}

std::string Cursor::identifier(std::string_view what) {
  skip_ws();
  if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) fail("expected " + std::string(what));
  std::size_t start = pos_;
  while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
  return std::string(text_.substr(start, pos_ - start));
}

std::uint64_t Cursor::number(std::string_view what) {
  skip_ws();
  if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
    fail("expected " + std::string(what));
  }
  std::size_t start = pos_;
  std::uint64_t value = 0;
  while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
    auto digit = static_cast<std::uint64_t>(text_[pos_] - '0');
    if (value > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) {
      fail_at(start + 1, "number out of range");
    }
    value = value * 10 + digit;
    ++pos_;
  }
  return value;
}

Symbol Cursor::symbol() {
  skip_ws();
  std::size_t type_col = column();
  std::string type = identifier("message type");
  if (type == Symbol::kNullType) {
    if (peek() == '{') {
      ++pos_;
      if (!consume('}')) fail_at(type_col, "null carries no predicates");
    }
    return Symbol::null_action();
  }
  std::vector<FieldPredicate> preds;
  if (consume('{')) {
    if (!consume('}')) {
      while (true) {
        std::size_t field_col = (skip_ws(), column());
        std::string field = identifier("field name");
        expect('=', "after field name");
        std::uint64_t value = number("field value");
        for (const auto& p : preds) {
          if (p.field == field) fail_at(field_col, "duplicate predicate on field '" + field + "'");
        }
        preds.push_back({std::move(field), value});
        if (consume('}')) break;
        expect(',', "or '}' in predicate list");
      }
    }
  }
  return Symbol(std::move(type), std::move(preds));
}

std::optional<Symbol> Cursor::symbol_or_wildcard() {
  if (consume('*')) return std::nullopt;
  return symbol();
}

void Cursor::fail(const std::string& message) const {
  throw ParseError(line_, pos_ + 1, message);
}

void Cursor::fail_at(std::size_t column, const std::string& message) const {
  throw ParseError(line_, column, message);
}

}  // namespace detail
}  // namespace psmfuzz

#include <fstream>
#include <sstream>

#include "psmfuzz/io.hpp"

namespace psmfuzz {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace psmfuzz
