// Copyright 2026 The fairchk Authors
// SPDX-License-Identifier: Apache-2.0

// Lexer, recursive-descent parser and name resolver for the surface language.
//
//   program   := (typedef | procdef)*
//   typedef   := "type" NAME "=" ty
//   ty        := "end!" | "end?" | "!{" branches "}" | "?{" branches "}"
//              | "!(" ty ")" "." ty | "?(" ty ")" "." ty | NAME
//   procdef   := NAME "(" [param ("," param)*] ")" ["@rank" NAT] "=" proc
//   proc      := unary (("+[" ("1"|"2") "]" | "+") unary)*
//
// Choice is the loosest operator and associates to the left; prefixes bind
// tighter, so `x!a.P +[2] Q` is `(x!a.P) +[2] Q`.

#ifndef FAIRCHK_PARSER_HPP
#define FAIRCHK_PARSER_HPP

#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairchk/syntax.hpp"

namespace fairchk {

namespace detail {

enum class Tok { Ident, Nat, Punct, EndOut, EndIn, Eof };

struct Token {
  Tok kind;
  std::string text;
  Span span;
};

inline bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Span sp{line, col};
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      while (j < src.size() && src[j] == '\'') ++j;
      std::string word(src.substr(i, j - i));
      if (word == "end" && j < src.size() && (src[j] == '!' || src[j] == '?')) {
        out.push_back({src[j] == '!' ? Tok::EndOut : Tok::EndIn, word + src[j], sp});
        advance(j - i + 1);
        continue;
      }
      out.push_back({Tok::Ident, std::move(word), sp});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Nat, std::string(src.substr(i, j - i)), sp});
      advance(j - i);
      continue;
    }
    static constexpr std::string_view kPunct = "!?{}():,.=/|[]@+";
    if (kPunct.find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), sp});
      advance(1);
      continue;
    }
    throw ParseError("E-PARSE", sp, "unexpected character '" + std::string(1, c) + "'");
  }
  out.push_back({Tok::Eof, "", {line, col}});
  return out;
}

inline bool is_keyword(const std::string& s) {
  return s == "type" || s == "done" || s == "close" || s == "wait" || s == "new" ||
         s == "in" || s == "end";
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  SourceProgram program() {
    SourceProgram prog;
    while (!at_eof()) {
      if (peek_word("type"))
        prog.typedefs.push_back(typedef_());
      else
        prog.procdefs.push_back(procdef());
    }
    return prog;
  }

  TypeExprPtr type_only() {
    auto t = ty();
    expect_eof();
    return t;
  }

  ProcExprPtr proc_only() {
    auto p = proc();
    expect_eof();
    return p;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_eof() const { return peek().kind == Tok::Eof; }
  bool peek_punct(char c, std::size_t ahead = 0) const {
    const auto& t = peek(ahead);
    return t.kind == Tok::Punct && t.text[0] == c;
  }
  bool peek_word(std::string_view w) const {
    return peek().kind == Tok::Ident && peek().text == w;
  }

  [[noreturn]] void fail(const Token& t, const std::string& what) const {
    std::string found = t.kind == Tok::Eof ? "end of input" : "'" + t.text + "'";
    throw ParseError("E-PARSE", t.span, "expected " + what + ", found " + found);
  }

  void expect_eof() {
    if (!at_eof()) fail(peek(), "end of input");
  }

  Token expect_punct(char c) {
    if (!peek_punct(c)) fail(peek(), std::string("'") + c + "'");
    return toks_[pos_++];
  }
  void expect_word(std::string_view w) {
    if (!peek_word(w)) fail(peek(), "'" + std::string(w) + "'");
    ++pos_;
  }
  Token ident(const char* what) {
    const auto& t = peek();
    if (t.kind != Tok::Ident || is_keyword(t.text)) fail(t, what);
    return toks_[pos_++];
  }
  std::uint64_t nat() {
    const auto& t = peek();
    if (t.kind != Tok::Nat) fail(t, "a natural number");
    ++pos_;
    try {
      return std::stoull(t.text);
    } catch (const std::exception&) {
      throw ParseError("E-PARSE", t.span, "number out of range: " + t.text);
    }
  }

  template <class T>
  static void check_labels(const std::vector<std::pair<std::string, T>>& bs, Span sp) {
    std::set<std::string> seen;
    for (const auto& [l, _] : bs)
      if (!seen.insert(l).second)
        throw ParseError("E-LABELS", sp, "duplicate label '" + l + "'");
  }

  TypeDef typedef_() {
    Span sp = peek().span;
    expect_word("type");
    auto name = ident("a type name");
    expect_punct('=');
    return TypeDef{name.text, ty(), sp};
  }

  ProcDef procdef() {
    Span sp = peek().span;
    auto name = ident("a definition");
    ProcDef def;
    def.name = name.text;
    def.span = sp;
    expect_punct('(');
    if (!peek_punct(')')) {
      do {
        auto p = ident("a parameter name");
        expect_punct(':');
        def.params.push_back(Param{p.text, ty()});
      } while (peek_punct(',') && (++pos_, true));
    }
    expect_punct(')');
    if (peek_punct('@')) {
      ++pos_;
      expect_word("rank");
      def.rank_bound = nat();
    }
    expect_punct('=');
    def.body = proc();
    return def;
  }

  TypeExprPtr ty() {
    const Token& t = peek();
    Span sp = t.span;
    if (t.kind == Tok::EndOut || t.kind == Tok::EndIn) {
      ++pos_;
      return make_type(TypeExpr::End{t.kind == Tok::EndOut ? Polarity::Out : Polarity::In}, sp);
    }
    if (peek_punct('!') || peek_punct('?')) {
      Polarity pol = peek_punct('!') ? Polarity::Out : Polarity::In;
      ++pos_;
      if (peek_punct('{')) {
        ++pos_;
        std::vector<std::pair<std::string, TypeExprPtr>> bs;
        do {
          auto l = ident("a label");
          expect_punct(':');
          bs.emplace_back(l.text, ty());
        } while (peek_punct(',') && (++pos_, true));
        expect_punct('}');
        check_labels(bs, sp);
        return make_type(TypeExpr::Branches{pol, std::move(bs)}, sp);
      }
      if (peek_punct('(')) {
        ++pos_;
        auto payload = ty();
        expect_punct(')');
        expect_punct('.');
        auto cont = ty();
        return make_type(TypeExpr::Chan{pol, std::move(payload), std::move(cont)}, sp);
      }
      fail(peek(), "'{' or '('");
    }
    if (t.kind == Tok::Ident && !is_keyword(t.text)) {
      ++pos_;
      return make_type(TypeExpr::Name{t.text}, sp);
    }
    fail(t, "a session type");
  }

  ProcExprPtr proc() {
    auto left = unary();
    while (peek_punct('+')) {
      Span sp = peek().span;
      ++pos_;
      int k = 1;
      bool marked = false;
      if (peek_punct('[')) {
        ++pos_;
        const Token& kt = peek();
        auto n = nat();
        if (n != 1 && n != 2)
          throw ParseError("E-PARSE", kt.span, "choice marker must be 1 or 2");
        k = static_cast<int>(n);
        marked = true;
        expect_punct(']');
      }
      auto right = unary();
      left = make_proc(ProcExpr::Choice{k, marked, std::move(left), std::move(right)}, sp);
    }
    return left;
  }

  std::vector<std::pair<std::string, ProcExprPtr>> pbranches(Span sp) {
    std::vector<std::pair<std::string, ProcExprPtr>> bs;
    do {
      auto l = ident("a label");
      expect_punct(':');
      bs.emplace_back(l.text, proc());
    } while (peek_punct(',') && (++pos_, true));
    expect_punct('}');
    check_labels(bs, sp);
    return bs;
  }

  ProcExprPtr unary() {
    const Token& t = peek();
    Span sp = t.span;
    if (peek_punct('(')) {
      ++pos_;
      auto p = proc();
      expect_punct(')');
      return p;
    }
    if (peek_punct('[')) {
      ++pos_;
      auto x = ident("a channel");
      expect_punct(':');
      auto target = ty();
      std::optional<std::uint64_t> w;
      if (peek_punct('@')) {
        ++pos_;
        w = nat();
      }
      expect_punct(']');
      return make_proc(ProcExpr::Cast{x.text, std::move(target), w, unary()}, sp);
    }
    if (t.kind != Tok::Ident) fail(t, "a process");
    if (t.text == "done") {
      ++pos_;
      return make_proc(ProcExpr::Done{}, sp);
    }
    if (t.text == "close") {
      ++pos_;
      return make_proc(ProcExpr::Close{ident("a channel").text}, sp);
    }
    if (t.text == "wait") {
      ++pos_;
      auto x = ident("a channel");
      expect_punct('.');
      return make_proc(ProcExpr::Wait{x.text, unary()}, sp);
    }
    if (t.text == "new") {
      ++pos_;
      auto x = ident("a channel");
      expect_punct(':');
      auto lt = ty();
      expect_punct('/');
      auto rt = ty();
      expect_word("in");
      expect_punct('(');
      auto l = proc();
      expect_punct('|');
      auto r = proc();
      expect_punct(')');
      return make_proc(ProcExpr::NewSession{x.text, std::move(lt), std::move(rt), std::move(l),
                                            std::move(r)},
                       sp);
    }
    auto name = ident("a process");
    if (peek_punct('(')) {
      ++pos_;
      std::vector<std::string> args;
      if (!peek_punct(')')) {
        do {
          args.push_back(ident("a channel").text);
        } while (peek_punct(',') && (++pos_, true));
      }
      expect_punct(')');
      return make_proc(ProcExpr::Call{name.text, std::move(args)}, sp);
    }
    if (!peek_punct('!') && !peek_punct('?')) fail(peek(), "'(', '!' or '?'");
    Polarity pol = peek_punct('!') ? Polarity::Out : Polarity::In;
    ++pos_;
    if (peek_punct('{')) {
      ++pos_;
      return make_proc(ProcExpr::TagComm{name.text, pol, pbranches(sp)}, sp);
    }
    if (peek_punct('(')) {
      ++pos_;
      auto y = ident("a channel");
      if (pol == Polarity::Out) {
        expect_punct(')');
        expect_punct('.');
        return make_proc(ProcExpr::ChanOut{name.text, y.text, unary()}, sp);
      }
      expect_punct(':');
      auto annot = ty();
      expect_punct(')');
      expect_punct('.');
      return make_proc(ProcExpr::ChanIn{name.text, y.text, std::move(annot), unary()}, sp);
    }
    auto l = ident("a label");
    expect_punct('.');
    std::vector<std::pair<std::string, ProcExprPtr>> bs;
    bs.emplace_back(l.text, unary());
    return make_proc(ProcExpr::TagComm{name.text, pol, std::move(bs)}, sp);
  }
};

// --- resolution --------------------------------------------------------------

inline void resolve_type_names(const TypeExpr& t, const std::set<std::string>& names) {
  std::visit(overloaded{
                 [](const TypeExpr::End&) {},
                 [&](const TypeExpr::Branches& b) {
                   for (const auto& [_, c] : b.branches) resolve_type_names(*c, names);
                 },
                 [&](const TypeExpr::Chan& c) {
                   resolve_type_names(*c.payload, names);
                   resolve_type_names(*c.cont, names);
                 },
                 [&](const TypeExpr::Name& n) {
                   if (!names.count(n.name))
                     throw ParseError("E-UNRESOLVED", t.span, "unknown type '" + n.name + "'");
                 },
             },
             t.node);
}

inline void resolve_proc(const ProcExpr& p, const SourceProgram& prog,
                         const std::set<std::string>& type_names) {
  using P = ProcExpr;
  std::visit(overloaded{
                 [](const P::Done&) {},
                 [](const P::Close&) {},
                 [&](const P::Call& c) {
                   const ProcDef* d = prog.find_proc(c.name);
                   if (!d)
                     throw ParseError("E-UNRESOLVED", p.span, "unknown process '" + c.name + "'");
                   if (d->params.size() != c.args.size())
                     throw ParseError("E-ARITY", p.span,
                                      "'" + c.name + "' expects " +
                                          std::to_string(d->params.size()) + " argument(s), got " +
                                          std::to_string(c.args.size()));
                 },
                 [&](const P::Wait& w) { resolve_proc(*w.cont, prog, type_names); },
                 [&](const P::TagComm& t) {
                   for (const auto& [_, b] : t.branches) resolve_proc(*b, prog, type_names);
                 },
                 [&](const P::ChanOut& o) { resolve_proc(*o.cont, prog, type_names); },
                 [&](const P::ChanIn& i) {
                   resolve_type_names(*i.type, type_names);
                   resolve_proc(*i.cont, prog, type_names);
                 },
                 [&](const P::Choice& c) {
                   resolve_proc(*c.left, prog, type_names);
                   resolve_proc(*c.right, prog, type_names);
                 },
                 [&](const P::NewSession& n) {
                   resolve_type_names(*n.left_type, type_names);
                   resolve_type_names(*n.right_type, type_names);
                   resolve_proc(*n.left, prog, type_names);
                   resolve_proc(*n.right, prog, type_names);
                 },
                 [&](const P::Cast& c) {
                   resolve_type_names(*c.target, type_names);
                   resolve_proc(*c.cont, prog, type_names);
                 },
             },
             p.node);
}

}  // namespace detail

/// Checks name uniqueness, name resolution, call arity and contractivity.
/// Throws ParseError on the first violation.
inline void resolve(const SourceProgram& prog) {
  std::set<std::string> type_names;
  for (const auto& t : prog.typedefs)
    if (!type_names.insert(t.name).second)
      throw ParseError("E-DUPLICATE", t.span, "type '" + t.name + "' defined twice");
  std::set<std::string> proc_names;
  for (const auto& p : prog.procdefs) {
    if (!proc_names.insert(p.name).second)
      throw ParseError("E-DUPLICATE", p.span, "process '" + p.name + "' defined twice");
    std::set<std::string> params;
    for (const auto& prm : p.params)
      if (!params.insert(prm.name).second)
        throw ParseError("E-DUPLICATE", p.span, "parameter '" + prm.name + "' repeated");
  }
  for (const auto& t : prog.typedefs) detail::resolve_type_names(*t.body, type_names);

  // Unguarded recursion can only arise through chains of bare names.
  for (const auto& t : prog.typedefs) {
    std::set<std::string> seen{t.name};
    const TypeExpr* cur = t.body.get();
    while (const auto* n = std::get_if<TypeExpr::Name>(&cur->node)) {
      if (!seen.insert(n->name).second)
        throw ParseError("E-NONCONTRACTIVE", t.span,
                         "type '" + t.name + "' is not contractive (unguarded recursion)");
      cur = prog.find_type(n->name)->body.get();
    }
  }

  for (const auto& p : prog.procdefs) {
    for (const auto& prm : p.params) detail::resolve_type_names(*prm.type, type_names);
    detail::resolve_proc(*p.body, prog, type_names);
  }
}

/// Parses and resolves a whole program.
inline SourceProgram parse(std::string_view text) {
  detail::Parser parser(text);
  SourceProgram prog = parser.program();
  resolve(prog);
  return prog;
}

/// Parses a standalone type expression and resolves its names against `prog`.
inline TypeExprPtr parse_type(std::string_view text, const SourceProgram& prog) {
  detail::Parser parser(text);
  auto t = parser.type_only();
  std::set<std::string> names;
  for (const auto& td : prog.typedefs) names.insert(td.name);
  detail::resolve_type_names(*t, names);
  return t;
}

/// Parses a standalone process expression (not resolved).
inline ProcExprPtr parse_proc(std::string_view text) {
  detail::Parser parser(text);
  return parser.proc_only();
}

}  // namespace fairchk

#endif  // FAIRCHK_PARSER_HPP
