// Copyright 2026 The modl-forge Authors
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

// Error-recovering reader for the Turtle subset LLM responses actually use.
//
// Supported: @prefix/PREFIX, @base/BASE, comments, `a`, predicate lists,
// object lists, IRIs, prefixed names, string/numeric/boolean literals with
// datatypes or language tags, labeled and anonymous blank nodes.
// Collections are reported as unsupported and dropped.
//
// In recover mode a failing statement is discarded as a whole and parsing
// resumes after the next `.` at nesting depth zero. In strict mode the
// first diagnostic ends the parse, keeping the statements before it.

#pragma once

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modlforge/rdf.hpp"

namespace modlforge {

enum class ParseMode { strict, recover };

enum class DiagnosticKind { lex, syntax, unknown_prefix, unsupported_construct };

inline std::string_view to_string(DiagnosticKind k) {
  switch (k) {
    case DiagnosticKind::lex: return "lex";
    case DiagnosticKind::syntax: return "syntax";
    case DiagnosticKind::unknown_prefix: return "unknown-prefix";
    case DiagnosticKind::unsupported_construct: return "unsupported-construct";
  }
  return "?";
}

struct ParseDiagnostic {
  std::size_t line = 0;    // 1-based
  std::size_t column = 0;  // 1-based, in bytes
  DiagnosticKind kind = DiagnosticKind::syntax;
  std::string message;
  std::size_t skip_begin = 0;  // byte span that was discarded
  std::size_t skip_end = 0;
};

struct ParseOutcome {
  Graph graph;
  std::vector<ParseDiagnostic> diagnostics;
  std::size_t statements = 0;            // statements committed to the graph
  std::size_t recovered_statements = 0;  // skip-and-resume events
  bool aborted = false;                  // strict mode stopped at an error

  bool ok() const { return diagnostics.empty(); }
};

struct ParseOptions {
  ParseMode mode = ParseMode::recover;
  // Becomes part of every skolem label so graphs from different responses
  // never share blank nodes.
  std::string provenance;
  // When false, labeled blank nodes keep their document labels.
  bool skolemize = true;
  // Relative IRIs without an @base resolve against this.
  std::string fallback_base = "http://localhost/";
};

class UnknownPrefixError : public RdfError {
 public:
  using RdfError::RdfError;
};

namespace turtle_detail {

enum class Tok {
  iri,
  pname_ns,
  pname_ln,
  blank_label,
  string,
  integer,
  decimal,
  double_,
  langtag,
  datatype_mark,
  dot,
  semicolon,
  comma,
  lbracket,
  rbracket,
  lparen,
  rparen,
  kw_a,
  kw_true,
  kw_false,
  at_prefix,
  at_base,
  sparql_prefix,
  sparql_base,
  error,
  eof,
};

struct Token {
  Tok kind = Tok::eof;
  std::string text;    // decoded value
  std::string prefix;  // pname tokens
  std::size_t begin = 0;
  std::size_t end = 0;
};

inline bool is_name_start(unsigned char c) { return std::isalpha(c) || c >= 0x80; }
inline bool is_name_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '-' || c >= 0x80;
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : s_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      if (pos_ >= s_.size()) break;
      out.push_back(next());
    }
    out.push_back(Token{Tok::eof, {}, {}, s_.size(), s_.size()});
    return out;
  }

 private:
  unsigned char at(std::size_t i) const {
    return i < s_.size() ? static_cast<unsigned char>(s_[i]) : 0;
  }

  void skip_space_and_comments() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Token make(Tok kind, std::size_t begin, std::string text = {}) {
    return Token{kind, std::move(text), {}, begin, pos_};
  }

  Token error(std::size_t begin, std::string message) {
    return Token{Tok::error, std::move(message), {}, begin, pos_};
  }

  // Consumes to end of line; used for unterminated strings and IRIs.
  Token error_to_eol(std::size_t begin, std::string message) {
    while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
    return error(begin, std::move(message));
  }

  Token next() {
    const std::size_t begin = pos_;
    const unsigned char c = at(pos_);
    switch (c) {
      case '<': return iri_ref();
      case '"':
      case '\'': return string_literal();
      case '_':
        if (at(pos_ + 1) == ':') return blank_label();
        ++pos_;
        return error(begin, "unexpected '_'");
      case '@': return at_word();
      case '^':
        if (at(pos_ + 1) == '^') {
          pos_ += 2;
          return make(Tok::datatype_mark, begin);
        }
        ++pos_;
        return error(begin, "unexpected '^'");
      case '.':
        if (std::isdigit(at(pos_ + 1))) return number();
        ++pos_;
        return make(Tok::dot, begin);
      case ';': ++pos_; return make(Tok::semicolon, begin);
      case ',': ++pos_; return make(Tok::comma, begin);
      case '[': ++pos_; return make(Tok::lbracket, begin);
      case ']': ++pos_; return make(Tok::rbracket, begin);
      case '(': ++pos_; return make(Tok::lparen, begin);
      case ')': ++pos_; return make(Tok::rparen, begin);
      case ':': return prefixed_name(begin, {});
      case '+':
      case '-':
        if (std::isdigit(at(pos_ + 1)) || (at(pos_ + 1) == '.' && std::isdigit(at(pos_ + 2)))) {
          return number();
        }
        ++pos_;
        return error(begin, std::string("unexpected '") + static_cast<char>(c) + "'");
      default:
        break;
    }
    if (std::isdigit(c)) return number();
    if (is_name_start(c)) return word();
    ++pos_;
    while (pos_ < s_.size() && (at(pos_) & 0xC0) == 0x80) ++pos_;
    return error(begin, "unexpected character '" + std::string(s_.substr(begin, pos_ - begin)) + "'");
  }

  bool read_hex(std::size_t digits, std::uint32_t& cp) {
    if (pos_ + digits > s_.size()) return false;
    cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      const unsigned char h = at(pos_ + i);
      if (!std::isxdigit(h)) return false;
      cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(h) ? h - '0' : std::tolower(h) - 'a' + 10);
    }
    pos_ += digits;
    return true;
  }

  Token iri_ref() {
    const std::size_t begin = pos_++;
    std::string value;
    while (pos_ < s_.size()) {
      const unsigned char c = at(pos_);
      if (c == '>') {
        ++pos_;
        return make(Tok::iri, begin, std::move(value));
      }
      if (c == '\\') {
        ++pos_;
        std::uint32_t cp = 0;
        const unsigned char kind = at(pos_);
        ++pos_;
        if ((kind == 'u' && read_hex(4, cp)) || (kind == 'U' && read_hex(8, cp))) {
          append_utf8(value, cp);
          continue;
        }
        return error_to_eol(begin, "bad escape in IRI");
      }
      if (c <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
          c == '`') {
        // Not an IRI; most likely a stray '<' in prose.
        pos_ = begin + 1;
        return error(begin, "malformed IRI");
      }
      value += static_cast<char>(c);
      ++pos_;
    }
    return error(begin, "unterminated IRI");
  }

  Token string_literal() {
    const std::size_t begin = pos_;
    const char q = s_[pos_];
    const bool is_long = at(pos_ + 1) == static_cast<unsigned char>(q) &&
                         at(pos_ + 2) == static_cast<unsigned char>(q);
    pos_ += is_long ? 3 : 1;
    std::string value;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == q) {
        if (!is_long) {
          ++pos_;
          return make(Tok::string, begin, std::move(value));
        }
        if (at(pos_ + 1) == static_cast<unsigned char>(q) &&
            at(pos_ + 2) == static_cast<unsigned char>(q)) {
          // A long string may end with up to two extra quote characters.
          while (at(pos_ + 3) == static_cast<unsigned char>(q)) {
            value += q;
            ++pos_;
          }
          pos_ += 3;
          return make(Tok::string, begin, std::move(value));
        }
        value += c;
        ++pos_;
        continue;
      }
      if ((c == '\n' || c == '\r') && !is_long) {
        // Only the quote is bad; the rest of the line is lexed normally.
        pos_ = begin + 1;
        return error(begin, "unterminated string");
      }
      if (c == '\\') {
        ++pos_;
        const char e = pos_ < s_.size() ? s_[pos_] : '\0';
        ++pos_;
        std::uint32_t cp = 0;
        switch (e) {
          case 't': value += '\t'; break;
          case 'b': value += '\b'; break;
          case 'n': value += '\n'; break;
          case 'r': value += '\r'; break;
          case 'f': value += '\f'; break;
          case '"': value += '"'; break;
          case '\'': value += '\''; break;
          case '\\': value += '\\'; break;
          case 'u':
            if (!read_hex(4, cp)) return error_to_eol(begin, "bad \\u escape");
            append_utf8(value, cp);
            break;
          case 'U':
            if (!read_hex(8, cp)) return error_to_eol(begin, "bad \\U escape");
            append_utf8(value, cp);
            break;
          default:
            return error_to_eol(begin, "bad string escape");
        }
        continue;
      }
      value += c;
      ++pos_;
    }
    pos_ = begin + (is_long ? 3 : 1);
    return error(begin, is_long ? "unterminated long string" : "unterminated string");
  }

  Token blank_label() {
    const std::size_t begin = pos_;
    pos_ += 2;
    const unsigned char first = at(pos_);
    if (!(is_name_char(first) && first != '-')) return error(begin, "empty blank node label");
    std::size_t end = pos_;
    while (end < s_.size() && (is_name_char(at(end)) || at(end) == '.')) ++end;
    while (end > pos_ && s_[end - 1] == '.') --end;
    std::string label(s_.substr(pos_, end - pos_));
    pos_ = end;
    return make(Tok::blank_label, begin, std::move(label));
  }

  Token at_word() {
    const std::size_t begin = pos_++;
    std::size_t end = pos_;
    while (end < s_.size() && std::isalpha(at(end))) ++end;
    const std::string_view word = s_.substr(pos_, end - pos_);
    if (word.empty()) return error(begin, "stray '@'");
    if (at(end) != '-') {
      if (word == "prefix") {
        pos_ = end;
        return make(Tok::at_prefix, begin);
      }
      if (word == "base") {
        pos_ = end;
        return make(Tok::at_base, begin);
      }
    }
    while (at(end) == '-' && std::isalnum(at(end + 1))) {
      ++end;
      while (end < s_.size() && std::isalnum(at(end))) ++end;
    }
    std::string tag(s_.substr(pos_, end - pos_));
    pos_ = end;
    return make(Tok::langtag, begin, std::move(tag));
  }

  Token number() {
    const std::size_t begin = pos_;
    if (at(pos_) == '+' || at(pos_) == '-') ++pos_;
    while (std::isdigit(at(pos_))) ++pos_;
    Tok kind = Tok::integer;
    if (at(pos_) == '.' && std::isdigit(at(pos_ + 1))) {
      ++pos_;
      while (std::isdigit(at(pos_))) ++pos_;
      kind = Tok::decimal;
    }
    if ((at(pos_) == 'e' || at(pos_) == 'E')) {
      std::size_t e = pos_ + 1;
      if (at(e) == '+' || at(e) == '-') ++e;
      if (std::isdigit(at(e))) {
        while (std::isdigit(at(e))) ++e;
        pos_ = e;
        kind = Tok::double_;
      }
    }
    return make(kind, begin, std::string(s_.substr(begin, pos_ - begin)));
  }

  // Local part of a prefixed name, with backslash escapes decoded.
  bool local_name(std::string& out) {
    std::size_t end = pos_;
    std::size_t last_good = pos_;
    std::string value;
    std::string good_value;
    bool first = true;
    while (end < s_.size()) {
      const unsigned char c = at(end);
      if (is_name_char(c) || c == ':' || (c == '.' && !first)) {
        value += static_cast<char>(c);
        ++end;
      } else if (c == '%' && std::isxdigit(at(end + 1)) && std::isxdigit(at(end + 2))) {
        value.append(s_.substr(end, 3));
        end += 3;
      } else if (c == '\\' && end + 1 < s_.size() &&
                 std::string_view("_~.-!$&'()*+,;=/?#@%").find(s_[end + 1]) !=
                     std::string_view::npos) {
        value += s_[end + 1];
        end += 2;
      } else {
        break;
      }
      first = false;
      if (s_[end - 1] != '.' || (end >= 2 && s_[end - 2] == '\\')) {
        last_good = end;
        good_value = value;
      }
    }
    pos_ = last_good;
    out = std::move(good_value);
    return true;
  }

  Token prefixed_name(std::size_t begin, std::string prefix) {
    ++pos_;  // ':'
    std::string local;
    local_name(local);
    Token t = make(local.empty() ? Tok::pname_ns : Tok::pname_ln, begin, std::move(local));
    t.prefix = std::move(prefix);
    return t;
  }

  Token word() {
    const std::size_t begin = pos_;
    std::size_t end = pos_;
    while (end < s_.size() && (is_name_char(at(end)) || at(end) == '.')) ++end;
    std::size_t trimmed = end;
    while (trimmed > begin && s_[trimmed - 1] == '.') --trimmed;
    if (at(end) == ':' && trimmed == end) {
      std::string prefix(s_.substr(begin, end - begin));
      pos_ = end;
      return prefixed_name(begin, std::move(prefix));
    }
    pos_ = trimmed;
    const std::string_view w = s_.substr(begin, trimmed - begin);
    if (w == "a") return make(Tok::kw_a, begin);
    if (w == "true") return make(Tok::kw_true, begin, "true");
    if (w == "false") return make(Tok::kw_false, begin, "false");
    auto iequals = [](std::string_view x, std::string_view y) {
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::toupper(static_cast<unsigned char>(x[i])) != y[i]) return false;
      }
      return true;
    };
    if (iequals(w, "PREFIX")) return make(Tok::sparql_prefix, begin);
    if (iequals(w, "BASE")) return make(Tok::sparql_base, begin);
    return error(begin, "unexpected bare word '" + std::string(w) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline std::string resolve_iri(const std::string& ref, const std::string& base) {
  if (is_absolute_iri(ref)) return ref;
  auto strip_from = [&](std::string_view chars) {
    const auto cut = base.find_first_of(chars);
    return cut == std::string::npos ? base : base.substr(0, cut);
  };
  if (ref.empty()) return strip_from("#");
  if (ref[0] == '#') return strip_from("#") + ref;
  if (ref[0] == '?') return strip_from("?#") + ref;
  const auto scheme_end = base.find(':');
  if (ref.rfind("//", 0) == 0) return base.substr(0, scheme_end + 1) + ref;
  std::size_t path_start = scheme_end + 1;
  if (base.compare(path_start, 2, "//") == 0) {
    path_start = base.find('/', path_start + 2);
    if (path_start == std::string::npos) path_start = base.size();
  }
  if (ref[0] == '/') return base.substr(0, path_start) + ref;
  const std::string trimmed = strip_from("?#");
  const auto slash = trimmed.rfind('/');
  if (slash == std::string::npos || slash < path_start) return trimmed.substr(0, path_start) + "/" + ref;
  return trimmed.substr(0, slash + 1) + ref;
}

struct Failure {
  DiagnosticKind kind;
  std::string message;
  std::size_t token;  // index of the offending token
};

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& options)
      : text_(text), options_(options), tokens_(Lexer(text).run()) {
    out_.graph.set_provenance(options.provenance);
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '\n') line_starts_.push_back(i + 1);
    }
    if (!options.provenance.empty()) {
      for (const char c : options.provenance) {
        skolem_prefix_ += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
      }
      skolem_prefix_ += '_';
    }
  }

  ParseOutcome run() {
    while (peek().kind != Tok::eof) {
      const std::size_t start = index_;
      pending_.clear();
      pending_prefix_.reset();
      pending_base_.reset();
      depth_ = 0;
      try {
        statement();
        commit();
      } catch (const Failure& f) {
        const std::size_t begin = tokens_[start].begin;
        const std::size_t end = skip_to_terminator(start, f.token);
        add_diagnostic(f, begin, end);
        if (options_.mode == ParseMode::strict) {
          out_.aborted = true;
          break;
        }
        ++out_.recovered_statements;
      }
      if (out_.aborted) break;
    }
    out_.graph.prefixes() = env_;
    return std::move(out_);
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(index_ + ahead, tokens_.size() - 1)];
  }
  const Token& take() {
    const Token& t = tokens_[index_];
    if (index_ + 1 < tokens_.size()) ++index_;
    return t;
  }

  [[noreturn]] void fail(std::string message, DiagnosticKind kind = DiagnosticKind::syntax) {
    if (peek().kind == Tok::error && kind == DiagnosticKind::syntax) {
      throw Failure{DiagnosticKind::lex, peek().text, index_};
    }
    throw Failure{kind, std::move(message), index_};
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    take();
  }

  void add_diagnostic(const Failure& f, std::size_t begin, std::size_t end) {
    const std::size_t at = tokens_[std::min(f.token, tokens_.size() - 1)].begin;
    const auto line_it = std::upper_bound(line_starts_.begin(), line_starts_.end(), at);
    const std::size_t line_start = *(line_it - 1);
    out_.diagnostics.push_back(ParseDiagnostic{
        static_cast<std::size_t>(line_it - line_starts_.begin()), at - line_start + 1, f.kind,
        f.message, begin, end});
  }

  // Advances past the next `.` at nesting depth zero and returns the end of
  // the discarded span. Stops early in front of a directive.
  std::size_t skip_to_terminator(std::size_t start, std::size_t from) {
    index_ = from;
    int depth = depth_;
    for (;;) {
      const Token& t = peek();
      switch (t.kind) {
        case Tok::eof:
          return text_.size();
        case Tok::lbracket:
        case Tok::lparen:
          ++depth;
          break;
        case Tok::rbracket:
        case Tok::rparen:
          depth = depth > 0 ? depth - 1 : 0;
          break;
        case Tok::dot:
          if (depth == 0) {
            take();
            return t.end;
          }
          break;
        case Tok::at_prefix:
        case Tok::at_base:
        case Tok::sparql_prefix:
        case Tok::sparql_base:
          if (index_ > start) return tokens_[index_ - 1].end;
          break;
        default:
          break;
      }
      take();
    }
  }

  void commit() {
    if (pending_prefix_) env_.declare(pending_prefix_->first, pending_prefix_->second);
    if (pending_base_) env_.set_base(*pending_base_);
    for (auto& t : pending_) out_.graph.insert(std::move(t));
    ++out_.statements;
  }

  std::string base() const { return env_.base().value_or(options_.fallback_base); }

  void statement() {
    switch (peek().kind) {
      case Tok::at_prefix:
        take();
        prefix_body();
        expect(Tok::dot, "'.' after @prefix");
        return;
      case Tok::sparql_prefix:
        take();
        prefix_body();
        return;
      case Tok::at_base:
        take();
        base_body();
        expect(Tok::dot, "'.' after @base");
        return;
      case Tok::sparql_base:
        take();
        base_body();
        return;
      default:
        break;
    }
    triples();
    expect(Tok::dot, "'.' at end of statement");
  }

  void prefix_body() {
    if (peek().kind != Tok::pname_ns) fail("expected prefix label");
    std::string label = take().prefix;
    if (peek().kind != Tok::iri) fail("expected namespace IRI");
    pending_prefix_.emplace(std::move(label), resolve_iri(take().text, base()));
  }

  void base_body() {
    if (peek().kind != Tok::iri) fail("expected base IRI");
    pending_base_ = resolve_iri(take().text, base());
  }

  void triples() {
    if (peek().kind == Tok::lbracket) {
      const Term subject = blank_property_list();
      if (peek().kind != Tok::dot) predicate_object_list(subject);
      return;
    }
    const Term subject = subject_term();
    predicate_object_list(subject);
  }

  Term subject_term() {
    switch (peek().kind) {
      case Tok::iri:
      case Tok::pname_ns:
      case Tok::pname_ln:
        return iri_term();
      case Tok::blank_label:
        return blank(take().text);
      case Tok::lparen:
        fail("collections are not supported", DiagnosticKind::unsupported_construct);
      default:
        fail("expected subject");
    }
  }

  Term iri_term() {
    const Token& t = peek();
    if (t.kind == Tok::iri) return Term::iri(resolve_iri(take().text, base()));
    if (t.kind == Tok::pname_ns || t.kind == Tok::pname_ln) {
      const auto ns = lookup_prefix(t.prefix);
      if (!ns) fail("unknown prefix '" + t.prefix + ":'", DiagnosticKind::unknown_prefix);
      return Term::iri(*ns + take().text);
    }
    fail("expected IRI");
  }

  std::optional<std::string> lookup_prefix(const std::string& label) const {
    if (pending_prefix_ && pending_prefix_->first == label) return pending_prefix_->second;
    return env_.lookup(label);
  }

  Term blank(const std::string& label) {
    if (!options_.skolemize) return Term::blank(label);
    auto [it, inserted] = labels_.try_emplace(label);
    if (inserted) it->second = fresh_label();
    return Term::blank(it->second);
  }

  std::string fresh_label() {
    if (!options_.skolemize) return "anon" + std::to_string(counter_++);
    return skolem_prefix_ + "b" + std::to_string(counter_++);
  }

  Term blank_property_list() {
    take();  // '['
    ++depth_;
    const Term node = Term::blank(fresh_label());
    if (peek().kind != Tok::rbracket) predicate_object_list(node);
    expect(Tok::rbracket, "']'");
    --depth_;
    return node;
  }

  void predicate_object_list(const Term& subject) {
    for (;;) {
      Term predicate;
      if (peek().kind == Tok::kw_a) {
        take();
        predicate = Term::iri(vocab::kType);
      } else if (peek().kind == Tok::iri || peek().kind == Tok::pname_ns ||
                 peek().kind == Tok::pname_ln) {
        predicate = iri_term();
      } else {
        fail("expected predicate");
      }
      object_list(subject, predicate);
      if (peek().kind != Tok::semicolon) return;
      while (peek().kind == Tok::semicolon) take();
      const Tok k = peek().kind;
      if (k == Tok::dot || k == Tok::rbracket) return;
    }
  }

  void object_list(const Term& subject, const Term& predicate) {
    for (;;) {
      if (auto object = object_term()) {
        Triple t{subject, predicate, std::move(*object)};
        if (auto why = validate_triple(t); !why.empty()) fail(why);
        pending_.push_back(std::move(t));
      }
      if (peek().kind != Tok::comma) return;
      take();
    }
  }

  std::optional<Term> object_term() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::iri:
      case Tok::pname_ns:
      case Tok::pname_ln:
        return iri_term();
      case Tok::blank_label:
        return blank(take().text);
      case Tok::lbracket:
        return blank_property_list();
      case Tok::lparen:
        skip_collection();
        return std::nullopt;
      case Tok::string:
        return literal();
      case Tok::integer:
        return Term::literal(take().text, vocab::kInteger);
      case Tok::decimal:
        return Term::literal(take().text, vocab::kDecimal);
      case Tok::double_:
        return Term::literal(take().text, vocab::kDouble);
      case Tok::kw_true:
      case Tok::kw_false:
        return Term::literal(take().text, vocab::kBoolean);
      default:
        fail("expected object");
    }
  }

  Term literal() {
    std::string lexical = take().text;
    if (peek().kind == Tok::langtag) return Term::lang_literal(std::move(lexical), take().text);
    if (peek().kind == Tok::datatype_mark) {
      take();
      return Term::literal(std::move(lexical), iri_term().value);
    }
    return Term::literal(std::move(lexical));
  }

  // An object-position collection is dropped with a diagnostic; the rest of
  // the statement still counts.
  void skip_collection() {
    const std::size_t start = index_;
    if (options_.mode == ParseMode::strict) {
      fail("collections are not supported", DiagnosticKind::unsupported_construct);
    }
    int depth = 0;
    do {
      const Tok k = peek().kind;
      if (k == Tok::eof || (k == Tok::dot && depth == 0)) {
        fail("unterminated collection");
      }
      if (k == Tok::lparen) ++depth;
      if (k == Tok::rparen) --depth;
      take();
    } while (depth > 0);
    add_diagnostic(Failure{DiagnosticKind::unsupported_construct, "collection skipped", start},
                   tokens_[start].begin, tokens_[index_ - 1].end);
  }

  std::string_view text_;
  const ParseOptions& options_;
  std::vector<Token> tokens_;
  std::vector<std::size_t> line_starts_{0};
  std::size_t index_ = 0;
  int depth_ = 0;

  ParseOutcome out_;
  PrefixEnv env_;
  std::vector<Triple> pending_;
  std::optional<std::pair<std::string, std::string>> pending_prefix_;
  std::optional<std::string> pending_base_;
  std::map<std::string, std::string> labels_;
  std::string skolem_prefix_;
  std::size_t counter_ = 0;
};

}  // namespace turtle_detail

inline ParseOutcome parse_turtle(std::string_view text, const ParseOptions& options) {
  return turtle_detail::Parser(text, options).run();
}

inline ParseOutcome parse_turtle(std::string_view text, ParseMode mode = ParseMode::recover) {
  ParseOptions options;
  options.mode = mode;
  return parse_turtle(text, options);
}

// `p:local` or `:local` against `env`. Throws UnknownPrefixError.
inline std::string resolve_prefixed_name(const PrefixEnv& env, std::string_view qname) {
  const auto colon = qname.find(':');
  if (colon == std::string_view::npos) throw RdfError("not a prefixed name: " + std::string(qname));
  const std::string label(qname.substr(0, colon));
  const auto ns = env.lookup(label);
  if (!ns) throw UnknownPrefixError("unknown prefix '" + label + ":'");
  return *ns + std::string(qname.substr(colon + 1));
}

}  // namespace modlforge
