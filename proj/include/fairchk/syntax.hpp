// Copyright 2026 The fairchk Authors
// SPDX-License-Identifier: Apache-2.0

// Abstract syntax of type and process definitions.

#ifndef FAIRCHK_SYNTAX_HPP
#define FAIRCHK_SYNTAX_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fairchk {

enum class Polarity : std::uint8_t { In, Out };

inline constexpr Polarity opposite(Polarity p) {
  return p == Polarity::In ? Polarity::Out : Polarity::In;
}
inline constexpr char polarity_char(Polarity p) { return p == Polarity::In ? '?' : '!'; }

struct Span {
  int line = 0;
  int column = 0;
};

/// Error raised by the parser and resolver. `code` is a stable diagnostic code.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string code, Span span, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)), span_(span) {}

  const std::string& code() const { return code_; }
  Span span() const { return span_; }

 private:
  std::string code_;
  Span span_;
};

// ---------------------------------------------------------------------------
// Types

struct TypeExpr;
using TypeExprPtr = std::shared_ptr<const TypeExpr>;

struct TypeExpr {
  struct End {
    Polarity pol;
  };
  /// Branch order is kept as written.
  struct Branches {
    Polarity pol;
    std::vector<std::pair<std::string, TypeExprPtr>> branches;
  };
  struct Chan {
    Polarity pol;
    TypeExprPtr payload;
    TypeExprPtr cont;
  };
  struct Name {
    std::string name;
  };

  std::variant<End, Branches, Chan, Name> node;
  Span span;
};

inline TypeExprPtr make_type(decltype(TypeExpr::node) node, Span span = {}) {
  return std::make_shared<const TypeExpr>(TypeExpr{std::move(node), span});
}

// ---------------------------------------------------------------------------
// Processes

struct ProcExpr;
using ProcExprPtr = std::shared_ptr<const ProcExpr>;

struct ProcExpr {
  struct Done {};
  struct Call {
    std::string name;
    std::vector<std::string> args;
  };
  struct Close {
    std::string chan;
  };
  struct Wait {
    std::string chan;
    ProcExprPtr cont;
  };
  struct TagComm {
    std::string chan;
    Polarity pol;
    std::vector<std::pair<std::string, ProcExprPtr>> branches;
  };
  struct ChanOut {
    std::string chan;
    std::string payload;
    ProcExprPtr cont;
  };
  struct ChanIn {
    std::string chan;
    std::string var;
    TypeExprPtr type;
    ProcExprPtr cont;
  };
  /// `branch` is the index (1 or 2) of the side leading to termination.
  /// `explicit_branch` records whether the source carried a marker.
  struct Choice {
    int branch = 1;
    bool explicit_branch = true;
    ProcExprPtr left;
    ProcExprPtr right;
  };
  struct NewSession {
    std::string chan;
    TypeExprPtr left_type;
    TypeExprPtr right_type;
    ProcExprPtr left;
    ProcExprPtr right;
  };
  struct Cast {
    std::string chan;
    TypeExprPtr target;
    std::optional<std::uint64_t> weight;
    ProcExprPtr cont;
  };

  std::variant<Done, Call, Close, Wait, TagComm, ChanOut, ChanIn, Choice, NewSession, Cast> node;
  Span span;
};

inline ProcExprPtr make_proc(decltype(ProcExpr::node) node, Span span = {}) {
  return std::make_shared<const ProcExpr>(ProcExpr{std::move(node), span});
}

// ---------------------------------------------------------------------------
// Programs

struct TypeDef {
  std::string name;
  TypeExprPtr body;
  Span span;
};

struct Param {
  std::string name;
  TypeExprPtr type;
};

struct ProcDef {
  std::string name;
  std::vector<Param> params;
  std::optional<std::uint64_t> rank_bound;  // `@rank N`
  ProcExprPtr body;
  Span span;
};

struct SourceProgram {
  std::vector<TypeDef> typedefs;
  std::vector<ProcDef> procdefs;

  const TypeDef* find_type(const std::string& name) const {
    for (const auto& t : typedefs)
      if (t.name == name) return &t;
    return nullptr;
  }
  const ProcDef* find_proc(const std::string& name) const {
    for (const auto& p : procdefs)
      if (p.name == name) return &p;
    return nullptr;
  }
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ---------------------------------------------------------------------------
// Structural equality (spans and the branch-marker flag are ignored).

inline bool same_type_expr(const TypeExpr& a, const TypeExpr& b);
inline bool same_proc_expr(const ProcExpr& a, const ProcExpr& b);

inline bool same_type_expr(const TypeExpr& a, const TypeExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const TypeExpr::End& x) { return x.pol == std::get<TypeExpr::End>(b.node).pol; },
          [&](const TypeExpr::Branches& x) {
            const auto& y = std::get<TypeExpr::Branches>(b.node);
            if (x.pol != y.pol || x.branches.size() != y.branches.size()) return false;
            for (std::size_t i = 0; i < x.branches.size(); ++i)
              if (x.branches[i].first != y.branches[i].first ||
                  !same_type_expr(*x.branches[i].second, *y.branches[i].second))
                return false;
            return true;
          },
          [&](const TypeExpr::Chan& x) {
            const auto& y = std::get<TypeExpr::Chan>(b.node);
            return x.pol == y.pol && same_type_expr(*x.payload, *y.payload) &&
                   same_type_expr(*x.cont, *y.cont);
          },
          [&](const TypeExpr::Name& x) { return x.name == std::get<TypeExpr::Name>(b.node).name; },
      },
      a.node);
}

inline bool same_proc_expr(const ProcExpr& a, const ProcExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  using P = ProcExpr;
  return std::visit(
      overloaded{
          [&](const P::Done&) { return true; },
          [&](const P::Call& x) {
            const auto& y = std::get<P::Call>(b.node);
            return x.name == y.name && x.args == y.args;
          },
          [&](const P::Close& x) { return x.chan == std::get<P::Close>(b.node).chan; },
          [&](const P::Wait& x) {
            const auto& y = std::get<P::Wait>(b.node);
            return x.chan == y.chan && same_proc_expr(*x.cont, *y.cont);
          },
          [&](const P::TagComm& x) {
            const auto& y = std::get<P::TagComm>(b.node);
            if (x.chan != y.chan || x.pol != y.pol || x.branches.size() != y.branches.size())
              return false;
            for (std::size_t i = 0; i < x.branches.size(); ++i)
              if (x.branches[i].first != y.branches[i].first ||
                  !same_proc_expr(*x.branches[i].second, *y.branches[i].second))
                return false;
            return true;
          },
          [&](const P::ChanOut& x) {
            const auto& y = std::get<P::ChanOut>(b.node);
            return x.chan == y.chan && x.payload == y.payload && same_proc_expr(*x.cont, *y.cont);
          },
          [&](const P::ChanIn& x) {
            const auto& y = std::get<P::ChanIn>(b.node);
            return x.chan == y.chan && x.var == y.var && same_type_expr(*x.type, *y.type) &&
                   same_proc_expr(*x.cont, *y.cont);
          },
          [&](const P::Choice& x) {
            const auto& y = std::get<P::Choice>(b.node);
            return x.branch == y.branch && same_proc_expr(*x.left, *y.left) &&
                   same_proc_expr(*x.right, *y.right);
          },
          [&](const P::NewSession& x) {
            const auto& y = std::get<P::NewSession>(b.node);
            return x.chan == y.chan && same_type_expr(*x.left_type, *y.left_type) &&
                   same_type_expr(*x.right_type, *y.right_type) &&
                   same_proc_expr(*x.left, *y.left) && same_proc_expr(*x.right, *y.right);
          },
          [&](const P::Cast& x) {
            const auto& y = std::get<P::Cast>(b.node);
            return x.chan == y.chan && x.weight == y.weight &&
                   same_type_expr(*x.target, *y.target) && same_proc_expr(*x.cont, *y.cont);
          },
      },
      a.node);
}

inline bool same_program(const SourceProgram& a, const SourceProgram& b) {
  if (a.typedefs.size() != b.typedefs.size() || a.procdefs.size() != b.procdefs.size())
    return false;
  for (std::size_t i = 0; i < a.typedefs.size(); ++i)
    if (a.typedefs[i].name != b.typedefs[i].name ||
        !same_type_expr(*a.typedefs[i].body, *b.typedefs[i].body))
      return false;
  for (std::size_t i = 0; i < a.procdefs.size(); ++i) {
    const auto& p = a.procdefs[i];
    const auto& q = b.procdefs[i];
    if (p.name != q.name || p.params.size() != q.params.size() || p.rank_bound != q.rank_bound ||
        !same_proc_expr(*p.body, *q.body))
      return false;
    for (std::size_t j = 0; j < p.params.size(); ++j)
      if (p.params[j].name != q.params[j].name ||
          !same_type_expr(*p.params[j].type, *q.params[j].type))
        return false;
  }
  return true;
}

}  // namespace fairchk

#endif  // FAIRCHK_SYNTAX_HPP
