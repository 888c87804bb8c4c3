// Copyright 2026 The fairchk Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FAIRCHK_RENDER_HPP
#define FAIRCHK_RENDER_HPP

#include <string>

#include "fairchk/syntax.hpp"

namespace fairchk {

inline std::string render(const TypeExpr& t) {
  return std::visit(
      overloaded{
          [](const TypeExpr::End& e) { return std::string("end") + polarity_char(e.pol); },
          [](const TypeExpr::Branches& b) {
            std::string s(1, polarity_char(b.pol));
            s += "{";
            for (std::size_t i = 0; i < b.branches.size(); ++i) {
              if (i) s += ", ";
              s += b.branches[i].first + ": " + render(*b.branches[i].second);
            }
            return s + "}";
          },
          [](const TypeExpr::Chan& c) {
            return std::string(1, polarity_char(c.pol)) + "(" + render(*c.payload) + ")." +
                   render(*c.cont);
          },
          [](const TypeExpr::Name& n) { return n.name; },
      },
      t.node);
}

namespace detail {

inline std::string render_proc(const ProcExpr& p, bool need_unary);

inline std::string render_unary(const ProcExpr& p) { return render_proc(p, true); }

inline std::string render_proc(const ProcExpr& p, bool need_unary) {
  using P = ProcExpr;
  return std::visit(
      overloaded{
          [](const P::Done&) { return std::string("done"); },
          [](const P::Call& c) {
            std::string s = c.name + "(";
            for (std::size_t i = 0; i < c.args.size(); ++i) s += (i ? ", " : "") + c.args[i];
            return s + ")";
          },
          [](const P::Close& c) { return "close " + c.chan; },
          [](const P::Wait& w) { return "wait " + w.chan + ". " + render_unary(*w.cont); },
          [](const P::TagComm& t) {
            std::string s = t.chan + polarity_char(t.pol);
            if (t.branches.size() == 1)
              return s + t.branches[0].first + ". " + render_unary(*t.branches[0].second);
            s += "{";
            for (std::size_t i = 0; i < t.branches.size(); ++i) {
              if (i) s += ", ";
              s += t.branches[i].first + ": " + render_proc(*t.branches[i].second, false);
            }
            return s + "}";
          },
          [](const P::ChanOut& o) {
            return o.chan + "!(" + o.payload + "). " + render_unary(*o.cont);
          },
          [](const P::ChanIn& i) {
            return i.chan + "?(" + i.var + " : " + render(*i.type) + "). " + render_unary(*i.cont);
          },
          [need_unary](const P::Choice& c) {
            std::string s = render_proc(*c.left, false) + " +[" + std::to_string(c.branch) +
                            "] " + render_unary(*c.right);
            return need_unary ? "(" + s + ")" : s;
          },
          [](const P::NewSession& n) {
            return "new " + n.chan + " : " + render(*n.left_type) + " / " + render(*n.right_type) +
                   " in (" + render_proc(*n.left, false) + " | " + render_proc(*n.right, false) +
                   ")";
          },
          [](const P::Cast& c) {
            std::string s = "[" + c.chan + " : " + render(*c.target);
            if (c.weight) s += " @" + std::to_string(*c.weight);
            return s + "] " + render_unary(*c.cont);
          },
      },
      p.node);
}

}  // namespace detail

inline std::string render(const ProcExpr& p) { return detail::render_proc(p, false); }

inline std::string render(const ProcDef& d) {
  std::string s = d.name + "(";
  for (std::size_t i = 0; i < d.params.size(); ++i)
    s += (i ? ", " : "") + d.params[i].name + " : " + render(*d.params[i].type);
  s += ")";
  if (d.rank_bound) s += " @rank " + std::to_string(*d.rank_bound);
  return s + " = " + render(*d.body);
}

inline std::string render(const SourceProgram& prog) {
  std::string s;
  for (const auto& t : prog.typedefs) s += "type " + t.name + " = " + render(*t.body) + "\n";
  if (!prog.typedefs.empty() && !prog.procdefs.empty()) s += "\n";
  for (const auto& d : prog.procdefs) s += render(d) + "\n";
  return s;
}

}  // namespace fairchk

#endif  // FAIRCHK_RENDER_HPP
