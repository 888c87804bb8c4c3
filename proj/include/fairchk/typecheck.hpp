// Copyright 2026 The fairchk Authors
// SPDX-License-Identifier: Apache-2.0

// Static checks on programs: algorithmic typing, termination paths, safety,
// minimum ranks and action boundedness.

#ifndef FAIRCHK_TYPECHECK_HPP
#define FAIRCHK_TYPECHECK_HPP

#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fairchk/render.hpp"
#include "fairchk/semantics.hpp"
#include "fairchk/subtyping.hpp"
#include "fairchk/types.hpp"
#include "fairchk/weight.hpp"

namespace fairchk {

struct Diagnostic {
  std::string code;
  std::string rule;        // typing rule or analysis that failed; may be empty
  std::string definition;  // enclosing definition; empty for program-level errors
  Span span;
  std::string message;
  std::vector<std::pair<std::string, std::string>> details;
};

using TypingContext = std::map<std::string, TypeId>;

/// Interned view of a resolved program shared by all analyses. Choice
/// branches live here rather than in the AST so that branch inference can
/// revise them without rebuilding terms.
struct ProgramModel {
  const SourceProgram* prog = nullptr;
  TypeTable table;
  std::map<std::string, std::vector<TypeId>> params;
  std::map<const ProcExpr*, int> branch;
  std::map<const ProcExpr*, Weight> cast_weight;  // casts whose subtyping check passed
  std::map<const ProcExpr*, std::string> owner;
  std::vector<const ProcExpr*> occurrences;  // pre-order, definition by definition

  const ProcDef& def(const std::string& name) const { return *prog->find_proc(name); }
  int branch_of(const ProcExpr* p) const { return branch.at(p); }
};

namespace detail {

inline void collect_occurrences(ProgramModel& m, const ProcExpr* p, const std::string& def) {
  m.occurrences.push_back(p);
  m.owner[p] = def;
  using P = ProcExpr;
  std::visit(overloaded{
                 [](const P::Done&) {},
                 [](const P::Call&) {},
                 [](const P::Close&) {},
                 [&](const P::Wait& w) { collect_occurrences(m, w.cont.get(), def); },
                 [&](const P::TagComm& t) {
                   for (const auto& [_, b] : t.branches) collect_occurrences(m, b.get(), def);
                 },
                 [&](const P::ChanOut& o) { collect_occurrences(m, o.cont.get(), def); },
                 [&](const P::ChanIn& i) { collect_occurrences(m, i.cont.get(), def); },
                 [&](const P::Choice& c) {
                   m.branch[p] = c.branch;
                   collect_occurrences(m, c.left.get(), def);
                   collect_occurrences(m, c.right.get(), def);
                 },
                 [&](const P::NewSession& n) {
                   collect_occurrences(m, n.left.get(), def);
                   collect_occurrences(m, n.right.get(), def);
                 },
                 [&](const P::Cast& c) { collect_occurrences(m, c.cont.get(), def); },
             },
             p->node);
}

}  // namespace detail

/// `prog` must be resolved and must outlive the model.
inline ProgramModel make_model(const SourceProgram& prog) {
  ProgramModel m;
  m.prog = &prog;
  for (const auto& t : prog.typedefs) intern_typedef(m.table, t.name, prog);
  for (const auto& d : prog.procdefs) {
    std::vector<TypeId> ps;
    for (const auto& p : d.params) ps.push_back(intern(m.table, *p.type, prog));
    m.params[d.name] = std::move(ps);
    detail::collect_occurrences(m, d.body.get(), d.name);
  }
  return m;
}

/// Channels occurring free in a process.
inline std::set<std::string> free_names(const ProcExpr& p) {
  using P = ProcExpr;
  std::set<std::string> out;
  std::visit(overloaded{
                 [](const P::Done&) {},
                 [&](const P::Call& c) { out.insert(c.args.begin(), c.args.end()); },
                 [&](const P::Close& c) { out.insert(c.chan); },
                 [&](const P::Wait& w) {
                   out = free_names(*w.cont);
                   out.insert(w.chan);
                 },
                 [&](const P::TagComm& t) {
                   for (const auto& [_, b] : t.branches) out.merge(free_names(*b));
                   out.insert(t.chan);
                 },
                 [&](const P::ChanOut& o) {
                   out = free_names(*o.cont);
                   out.insert(o.chan);
                   out.insert(o.payload);
                 },
                 [&](const P::ChanIn& i) {
                   out = free_names(*i.cont);
                   out.erase(i.var);
                   out.insert(i.chan);
                 },
                 [&](const P::Choice& c) {
                   out = free_names(*c.left);
                   out.merge(free_names(*c.right));
                 },
                 [&](const P::NewSession& n) {
                   out = free_names(*n.left);
                   out.merge(free_names(*n.right));
                   out.erase(n.chan);
                 },
                 [&](const P::Cast& c) {
                   out = free_names(*c.cont);
                   out.insert(c.chan);
                 },
             },
             p.node);
  return out;
}

// ---------------------------------------------------------------------------
// Algorithmic typing

namespace detail {

class AlgChecker {
 public:
  AlgChecker(ProgramModel& m, std::string def) : m_(m), def_(std::move(def)) {}

  std::optional<Diagnostic> check(const TypingContext& ctx, const ProcExpr& p) {
    using P = ProcExpr;
    return std::visit(
        overloaded{
            [&](const P::Done&) -> Result {
              if (!ctx.empty()) return leak("a-done", p, ctx, "channels left unused at done");
              return ok();
            },
            [&](const P::Call& c) -> Result {
              const auto& ps = m_.params.at(c.name);
              std::set<std::string> seen;
              for (std::size_t i = 0; i < c.args.size(); ++i) {
                const std::string& a = c.args[i];
                if (!seen.insert(a).second)
                  return err("E-TYPE-MISMATCH", "a-call", p,
                             "channel '" + a + "' passed twice to " + c.name);
                auto it = ctx.find(a);
                if (it == ctx.end())
                  return err("E-TYPE-MISMATCH", "a-call", p, "channel '" + a + "' is not available");
                if (!equiv(m_.table, it->second, ps[i]))
                  return mismatch("a-call", p, a, ps[i], it->second);
              }
              TypingContext rest = ctx;
              for (const auto& a : c.args) rest.erase(a);
              if (!rest.empty()) return leak("a-call", p, rest, "channels not passed to " + c.name);
              return ok();
            },
            [&](const P::Close& c) -> Result {
              auto t = lookup("a-close", p, ctx, c.chan);
              if (!t.first) return t.second;
              TypeId want = m_.table.end(Polarity::Out);
              if (!equiv(m_.table, *t.first, want)) return mismatch("a-close", p, c.chan, want, *t.first);
              TypingContext rest = ctx;
              rest.erase(c.chan);
              if (!rest.empty()) return leak("a-close", p, rest, "channels left unused at close");
              return ok();
            },
            [&](const P::Wait& w) -> Result {
              auto t = lookup("a-wait", p, ctx, w.chan);
              if (!t.first) return t.second;
              TypeId want = m_.table.end(Polarity::In);
              if (!equiv(m_.table, *t.first, want)) return mismatch("a-wait", p, w.chan, want, *t.first);
              TypingContext rest = ctx;
              rest.erase(w.chan);
              return check(rest, *w.cont);
            },
            [&](const P::TagComm& tc) -> Result {
              auto t = lookup("a-tag", p, ctx, tc.chan);
              if (!t.first) return t.second;
              const auto* node = std::get_if<TagsNode>(&m_.table.node(*t.first));
              bool shape = node && node->pol == tc.pol && node->branches.size() == tc.branches.size();
              if (shape)
                for (const auto& [l, _] : tc.branches) shape = shape && node->branches.count(l);
              if (!shape) {
                Diagnostic d = base("E-TYPE-MISMATCH", "a-tag", p,
                                    "tag communication on '" + tc.chan + "' does not match its type");
                d.details.emplace_back("actual", render_type(m_.table, *t.first));
                return d;
              }
              // Branches in label order, for deterministic diagnostics.
              std::map<std::string, const ProcExpr*> sorted;
              for (const auto& [l, b] : tc.branches) sorted.emplace(l, b.get());
              std::map<std::string, TypeId> conts = node->branches;
              for (const auto& [l, b] : sorted) {
                TypingContext next = ctx;
                next[tc.chan] = conts.at(l);
                if (auto d = check(next, *b)) return d;
              }
              return ok();
            },
            [&](const P::ChanOut& o) -> Result {
              auto t = lookup("a-channel-out", p, ctx, o.chan);
              if (!t.first) return t.second;
              const auto* node = std::get_if<ChanNode>(&m_.table.node(*t.first));
              if (!node || node->pol != Polarity::Out) {
                Diagnostic d = base("E-TYPE-MISMATCH", "a-channel-out", p,
                                    "'" + o.chan + "' cannot send a channel");
                d.details.emplace_back("actual", render_type(m_.table, *t.first));
                return d;
              }
              if (o.payload == o.chan)
                return err("E-TYPE-MISMATCH", "a-channel-out", p, "a channel cannot be sent over itself");
              auto u = lookup("a-channel-out", p, ctx, o.payload);
              if (!u.first) return u.second;
              if (!equiv(m_.table, *u.first, node->payload))
                return mismatch("a-channel-out", p, o.payload, node->payload, *u.first);
              TypingContext next = ctx;
              next.erase(o.payload);
              next[o.chan] = node->cont;
              return check(next, *o.cont);
            },
            [&](const P::ChanIn& in) -> Result {
              auto t = lookup("a-channel-in", p, ctx, in.chan);
              if (!t.first) return t.second;
              const auto* node = std::get_if<ChanNode>(&m_.table.node(*t.first));
              if (!node || node->pol != Polarity::In) {
                Diagnostic d = base("E-TYPE-MISMATCH", "a-channel-in", p,
                                    "'" + in.chan + "' cannot receive a channel");
                d.details.emplace_back("actual", render_type(m_.table, *t.first));
                return d;
              }
              TypeId annot = intern(m_.table, *in.type, *m_.prog);
              if (!equiv(m_.table, annot, node->payload))
                return mismatch("a-channel-in", p, in.var, node->payload, annot);
              if (in.var == in.chan || ctx.count(in.var))
                return err("E-CONTEXT-LEAK", "a-channel-in", p,
                           "received channel '" + in.var + "' shadows a channel in use");
              TypingContext next = ctx;
              next[in.chan] = node->cont;
              next[in.var] = annot;
              return check(next, *in.cont);
            },
            [&](const P::Choice& c) -> Result {
              if (auto d = check(ctx, *c.left)) return d;
              return check(ctx, *c.right);
            },
            [&](const P::NewSession& n) -> Result {
              if (ctx.count(n.chan))
                return err("E-CONTEXT-LEAK", "a-par", p,
                           "session '" + n.chan + "' shadows a channel in use");
              TypeId s = intern(m_.table, *n.left_type, *m_.prog);
              TypeId t = intern(m_.table, *n.right_type, *m_.prog);
              if (!compatible(m_.table, s, t)) {
                Diagnostic d = base("E-INCOMPATIBLE", "a-par", p,
                                    "endpoint types of session '" + n.chan + "' are not compatible");
                d.details.emplace_back("left", render_type(m_.table, s));
                d.details.emplace_back("right", render_type(m_.table, t));
                return d;
              }
              std::set<std::string> fl = free_names(*n.left);
              std::set<std::string> fr = free_names(*n.right);
              TypingContext cl, cr;
              for (const auto& [c, ty] : ctx) {
                bool l = fl.count(c) > 0, r = fr.count(c) > 0;
                if (l == r)
                  return err("E-CONTEXT-LEAK", "a-par", p,
                             "channel '" + c + "' must be used by exactly one side of session '" +
                                 n.chan + "'");
                (l ? cl : cr).emplace(c, ty);
              }
              cl[n.chan] = s;
              cr[n.chan] = t;
              if (auto d = check(cl, *n.left)) return d;
              return check(cr, *n.right);
            },
            [&](const P::Cast& c) -> Result {
              auto s = lookup("a-cast", p, ctx, c.chan);
              if (!s.first) return s.second;
              TypeId target = intern(m_.table, *c.target, *m_.prog);
              SubtypeVerdict v = fair_subtype(m_.table, *s.first, target);
              if (!v.holds) {
                Diagnostic d = base("E-SUBTYPE", "a-cast", p,
                                    "cast on '" + c.chan + "': " + describe(m_.table, v));
                d.details.emplace_back("actual", render_type(m_.table, *s.first));
                d.details.emplace_back("target", render_type(m_.table, target));
                d.details.emplace_back(
                    "failure", v.failure == SubtypeVerdict::Failure::Diverges ? "diverges" : "not-simulated");
                if (v.offending) {
                  d.details.emplace_back("offending-left", render_type(m_.table, v.offending->first, false));
                  d.details.emplace_back("offending-right", render_type(m_.table, v.offending->second, false));
                }
                // Keep checking under the target type to find further errors.
                recovered.push_back(std::move(d));
                TypingContext next = ctx;
                next[c.chan] = target;
                return check(next, *c.cont);
              }
              m_.cast_weight[&p] = v.weight;
              if (c.weight && v.weight > Weight(*c.weight)) {
                Diagnostic d = base("E-WEIGHT-ANNOTATION", "a-cast", p,
                                    "computed weight (rk) " + v.weight.str() +
                                        " exceeds annotation " + std::to_string(*c.weight));
                d.details.emplace_back("weight", v.weight.str());
                return d;
              }
              TypingContext next = ctx;
              next[c.chan] = target;
              return check(next, *c.cont);
            },
        },
        p.node);
  }

 private:
  using Result = std::optional<Diagnostic>;

  static Result ok() { return std::nullopt; }

  Diagnostic base(std::string code, std::string rule, const ProcExpr& p, std::string msg) const {
    return Diagnostic{std::move(code), std::move(rule), def_, p.span, std::move(msg), {}};
  }
  Result err(std::string code, std::string rule, const ProcExpr& p, std::string msg) const {
    return base(std::move(code), std::move(rule), p, std::move(msg));
  }
  Result mismatch(std::string rule, const ProcExpr& p, const std::string& chan, TypeId expected,
                  TypeId actual) const {
    Diagnostic d = base("E-TYPE-MISMATCH", std::move(rule), p, "type mismatch on '" + chan + "'");
    d.details.emplace_back("expected", render_type(m_.table, expected));
    d.details.emplace_back("actual", render_type(m_.table, actual));
    return d;
  }
  Result leak(std::string rule, const ProcExpr& p, const TypingContext& rest, std::string msg) const {
    Diagnostic d = base("E-CONTEXT-LEAK", std::move(rule), p, std::move(msg));
    for (const auto& [c, t] : rest) d.details.emplace_back(c, render_type(m_.table, t));
    return d;
  }
  std::pair<std::optional<TypeId>, Result> lookup(const char* rule, const ProcExpr& p,
                                                  const TypingContext& ctx,
                                                  const std::string& chan) const {
    auto it = ctx.find(chan);
    if (it != ctx.end()) return {it->second, std::nullopt};
    return {std::nullopt,
            err("E-TYPE-MISMATCH", rule, p, "channel '" + chan + "' is not available")};
  }

  ProgramModel& m_;
  std::string def_;

 public:
  std::vector<Diagnostic> recovered;  // failed casts, in source order
};

}  // namespace detail

/// Inductive algorithmic typing of `p` under `ctx`; calls are axioms.
/// Records the weight of every cast it validates in `m.cast_weight`.
/// Failed casts do not stop the check; any other failure does.
inline std::vector<Diagnostic> alg_check(ProgramModel& m, const std::string& def,
                                         const TypingContext& ctx, const ProcExpr& p) {
  detail::AlgChecker checker(m, def);
  std::optional<Diagnostic> first = checker.check(ctx, p);
  std::vector<Diagnostic> out = std::move(checker.recovered);
  if (first) out.push_back(std::move(*first));
  return out;
}

inline TypingContext param_context(const ProgramModel& m, const ProcDef& d) {
  TypingContext ctx;
  const auto& ps = m.params.at(d.name);
  for (std::size_t i = 0; i < d.params.size(); ++i) ctx[d.params[i].name] = ps[i];
  return ctx;
}

// ---------------------------------------------------------------------------
// Termination paths and safety

/// Successors of an occurrence along termination paths.
inline std::vector<const ProcExpr*> term_successors(const ProgramModel& m, const ProcExpr* p) {
  using P = ProcExpr;
  std::vector<const ProcExpr*> out;
  std::visit(overloaded{
                 [](const P::Done&) {},
                 [&](const P::Call& c) { out.push_back(m.def(c.name).body.get()); },
                 [](const P::Close&) {},
                 [&](const P::Wait& w) { out.push_back(w.cont.get()); },
                 [&](const P::TagComm& t) {
                   for (const auto& [_, b] : t.branches) out.push_back(b.get());
                 },
                 [&](const P::ChanOut& o) { out.push_back(o.cont.get()); },
                 [&](const P::ChanIn& i) { out.push_back(i.cont.get()); },
                 [&](const P::Choice& c) {
                   out.push_back(m.branch_of(p) == 1 ? c.left.get() : c.right.get());
                 },
                 [&](const P::NewSession& n) {
                   out.push_back(n.left.get());
                   out.push_back(n.right.get());
                 },
                 [&](const P::Cast& c) { out.push_back(c.cont.get()); },
             },
             p->node);
  return out;
}

/// Occurrences reachable from `root` along termination paths (root included).
inline std::set<const ProcExpr*> term_reach(const ProgramModel& m, const ProcExpr* root) {
  std::set<const ProcExpr*> seen{root};
  std::deque<const ProcExpr*> work{root};
  while (!work.empty()) {
    const ProcExpr* p = work.front();
    work.pop_front();
    for (const ProcExpr* q : term_successors(m, p))
      if (seen.insert(q).second) work.push_back(q);
  }
  return seen;
}

/// Occurrences P with A <= P <= A: on a termination path from the body of A
/// that leads back to a call of A.
inline std::set<const ProcExpr*> loop_occurrences(const ProgramModel& m, const std::string& a) {
  const ProcExpr* body = m.def(a).body.get();
  std::set<const ProcExpr*> fwd = term_reach(m, body);
  std::map<const ProcExpr*, std::vector<const ProcExpr*>> preds;
  for (const ProcExpr* p : fwd)
    for (const ProcExpr* q : term_successors(m, p)) preds[q].push_back(p);
  std::set<const ProcExpr*> back{body};
  std::deque<const ProcExpr*> work{body};
  while (!work.empty()) {
    const ProcExpr* p = work.front();
    work.pop_front();
    for (const ProcExpr* q : preds[p])
      if (back.insert(q).second) work.push_back(q);
  }
  // `body` is only on a loop if some call of A reaches it.
  bool looping = false;
  for (const ProcExpr* p : fwd)
    if (const auto* c = std::get_if<ProcExpr::Call>(&p->node); c && c->name == a && back.count(p))
      looping = true;
  std::set<const ProcExpr*> out;
  if (!looping) return out;
  for (const ProcExpr* p : fwd)
    if (back.count(p)) out.insert(p);
  return out;
}

struct UnsafeOccurrence {
  const ProcExpr* occurrence;
  std::string loop;  // definition whose loop contains it
};

/// Sessions and positive-weight casts lying on a termination-path loop.
/// Each occurrence is reported once, for the first definition in program order.
inline std::vector<UnsafeOccurrence> unsafe_occurrences(const ProgramModel& m) {
  std::vector<UnsafeOccurrence> out;
  std::set<const ProcExpr*> reported;
  for (const auto& d : m.prog->procdefs) {
    std::set<const ProcExpr*> loop = loop_occurrences(m, d.name);
    for (const ProcExpr* p : m.occurrences) {
      if (!loop.count(p) || reported.count(p)) continue;
      bool bad = std::holds_alternative<ProcExpr::NewSession>(p->node);
      if (std::holds_alternative<ProcExpr::Cast>(p->node)) {
        auto it = m.cast_weight.find(p);
        bad = it != m.cast_weight.end() && it->second > Weight(0);
      }
      if (bad) {
        reported.insert(p);
        out.push_back({p, d.name});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ranks and action boundedness

using NameSet = std::set<std::string>;

class RankEngine {
 public:
  explicit RankEngine(const ProgramModel& m) : m_(m) {}

  /// Minimum rank of `p` when the definitions in `visited` count as 0.
  Weight min_rank(const ProcExpr* p, const NameSet& visited) {
    auto key = std::make_pair(p, visited);
    if (auto it = rank_memo_.find(key); it != rank_memo_.end()) return it->second;
    using P = ProcExpr;
    Weight w = std::visit(
        overloaded{
            [](const P::Done&) { return Weight(0); },
            [&](const P::Call& c) {
              if (visited.count(c.name)) return Weight(0);
              NameSet next = visited;
              next.insert(c.name);
              return min_rank(m_.def(c.name).body.get(), next);
            },
            [](const P::Close&) { return Weight(0); },
            [&](const P::Wait& x) { return min_rank(x.cont.get(), visited); },
            [&](const P::TagComm& t) {
              Weight hi(0);
              for (const auto& [_, b] : t.branches) hi = wmax(hi, min_rank(b.get(), visited));
              return hi;
            },
            [&](const P::ChanOut& o) { return min_rank(o.cont.get(), visited); },
            [&](const P::ChanIn& i) { return min_rank(i.cont.get(), visited); },
            [&](const P::Choice& c) {
              return min_rank(m_.branch_of(p) == 1 ? c.left.get() : c.right.get(), visited);
            },
            [&](const P::NewSession& n) {
              return Weight(1) + min_rank(n.left.get(), visited) + min_rank(n.right.get(), visited);
            },
            [&](const P::Cast& c) {
              auto it = m_.cast_weight.find(p);
              Weight cw = it == m_.cast_weight.end() ? Weight(0) : it->second;
              return cw + min_rank(c.cont.get(), visited);
            },
        },
        p->node);
    rank_memo_.emplace(std::move(key), w);
    return w;
  }

  bool action_bounded(const ProcExpr* p, const NameSet& visited) {
    auto key = std::make_pair(p, visited);
    if (auto it = bounded_memo_.find(key); it != bounded_memo_.end()) return it->second;
    using P = ProcExpr;
    bool b = std::visit(
        overloaded{
            [](const P::Done&) { return true; },
            [&](const P::Call& c) {
              if (visited.count(c.name)) return false;
              NameSet next = visited;
              next.insert(c.name);
              return action_bounded(m_.def(c.name).body.get(), next);
            },
            [](const P::Close&) { return true; },
            [&](const P::Wait& x) { return action_bounded(x.cont.get(), visited); },
            [&](const P::TagComm& t) {
              for (const auto& [_, q] : t.branches)
                if (action_bounded(q.get(), visited)) return true;
              return false;
            },
            [&](const P::ChanOut& o) { return action_bounded(o.cont.get(), visited); },
            [&](const P::ChanIn& i) { return action_bounded(i.cont.get(), visited); },
            [&](const P::Choice& c) {
              return action_bounded(m_.branch_of(p) == 1 ? c.left.get() : c.right.get(), visited);
            },
            [&](const P::NewSession& n) {
              return action_bounded(n.left.get(), visited) && action_bounded(n.right.get(), visited);
            },
            [&](const P::Cast& c) { return action_bounded(c.cont.get(), visited); },
        },
        p->node);
    bounded_memo_.emplace(std::move(key), b);
    return b;
  }

 private:
  const ProgramModel& m_;
  std::map<std::pair<const ProcExpr*, NameSet>, Weight> rank_memo_;
  std::map<std::pair<const ProcExpr*, NameSet>, bool> bounded_memo_;
};

inline Weight min_rank(const ProgramModel& m, const ProcExpr& p, const NameSet& visited = {}) {
  return RankEngine(m).min_rank(&p, visited);
}

inline bool action_bounded(const ProgramModel& m, const ProcExpr& p, const NameSet& visited = {}) {
  return RankEngine(m).action_bounded(&p, visited);
}

/// Rank of a definition as the tb-rules constrain it: infinite when its body
/// reaches an unsafe occurrence or a cast of infinite weight, otherwise the
/// minimum rank of the body.
inline Weight feasible_rank(const ProgramModel& m, const std::string& def,
                            const std::set<const ProcExpr*>& unsafe, RankEngine& ranks) {
  const ProcExpr* body = m.def(def).body.get();
  for (const ProcExpr* p : term_reach(m, body)) {
    if (unsafe.count(p)) return Weight::infinity();
    if (auto it = m.cast_weight.find(p); it != m.cast_weight.end() && it->second.is_infinite())
      return Weight::infinity();
  }
  return ranks.min_rank(body, {});
}

// ---------------------------------------------------------------------------
// Whole-program check

struct CheckOptions {
  bool infer_branch = false;
  bool timings = false;
};

struct DefinitionReport {
  std::string name;
  Weight rank = Weight::infinity();
  bool ok = true;
  std::vector<Diagnostic> diagnostics;
};

struct CheckReport {
  bool accepted = true;
  std::vector<DefinitionReport> definitions;
  std::vector<Diagnostic> diagnostics;  // program-level (parse errors)
  std::vector<std::pair<std::string, double>> timings;  // phase -> milliseconds
  std::map<const ProcExpr*, int> inferred;              // choices revised by inference

  const DefinitionReport* find(const std::string& name) const {
    for (const auto& d : definitions)
      if (d.name == name) return &d;
    return nullptr;
  }
};

namespace detail {

/// Picks the terminating branch of every unmarked choice, one choice at a
/// time: prefer the branch under which the enclosing definition is action
/// bounded, then the smaller minimum rank, then branch 1.
inline std::map<const ProcExpr*, int> infer_branches(ProgramModel& m) {
  std::map<const ProcExpr*, int> chosen;
  for (const ProcExpr* p : m.occurrences) {
    const auto* c = std::get_if<ProcExpr::Choice>(&p->node);
    if (!c || c->explicit_branch) continue;
    const ProcDef& d = m.def(m.owner.at(p));
    std::pair<int, Weight> best{2, Weight::infinity()};
    int best_k = 1;
    for (int k : {1, 2}) {
      m.branch[p] = k;
      RankEngine re(m);
      bool bounded = true;
      for (const ProcExpr* q : m.occurrences)
        if (m.owner.at(q) == d.name && !re.action_bounded(q, {})) bounded = false;
      std::pair<int, Weight> score{bounded ? 0 : 1, re.min_rank(d.body.get(), {})};
      if (score < best) {
        best = score;
        best_k = k;
      }
    }
    m.branch[p] = best_k;
    chosen[p] = best_k;
  }
  return chosen;
}

class PhaseTimer {
 public:
  PhaseTimer(bool on, std::vector<std::pair<std::string, double>>& sink)
      : on_(on), sink_(sink), start_(std::chrono::steady_clock::now()) {}
  void lap(const char* phase) {
    if (!on_) return;
    auto now = std::chrono::steady_clock::now();
    sink_.emplace_back(phase, std::chrono::duration<double, std::milli>(now - start_).count());
    start_ = now;
  }

 private:
  bool on_;
  std::vector<std::pair<std::string, double>>& sink_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Runs the full pipeline on a resolved program: typing (which fixes cast
/// weights), safety, ranks, rank annotations and action boundedness.
inline CheckReport check_program(ProgramModel& m, const CheckOptions& opts = {}) {
  CheckReport r;
  detail::PhaseTimer timer(opts.timings, r.timings);
  std::map<std::string, std::size_t> slot;
  for (const auto& d : m.prog->procdefs) {
    slot[d.name] = r.definitions.size();
    r.definitions.push_back({d.name, Weight::infinity(), true, {}});
  }
  auto report = [&](Diagnostic d) {
    auto& def = r.definitions[slot.at(d.definition)];
    def.ok = false;
    def.diagnostics.push_back(std::move(d));
  };

  for (const auto& d : m.prog->procdefs)
    for (auto& diag : alg_check(m, d.name, param_context(m, d), *d.body)) report(std::move(diag));
  timer.lap("typing");

  if (opts.infer_branch) r.inferred = detail::infer_branches(m);

  std::set<const ProcExpr*> unsafe;
  for (const auto& u : unsafe_occurrences(m)) {
    unsafe.insert(u.occurrence);
    bool session = std::holds_alternative<ProcExpr::NewSession>(u.occurrence->node);
    Diagnostic d{"E-UNSAFE-LOOP", "safe-program", m.owner.at(u.occurrence), u.occurrence->span,
                 std::string(session ? "session creation" : "positive-weight cast") +
                     " on a termination-path loop of " + u.loop,
                 {{"loop", u.loop}}};
    if (!session) d.details.emplace_back("weight", m.cast_weight.at(u.occurrence).str());
    report(std::move(d));
  }
  timer.lap("safety");

  RankEngine ranks(m);
  for (const auto& d : m.prog->procdefs) {
    Weight w = feasible_rank(m, d.name, unsafe, ranks);
    r.definitions[slot.at(d.name)].rank = w;
    if (w.is_infinite()) {
      report({"E-INFINITE-RANK", "rank", d.name, d.span,
              "no finite rank can be assigned to " + d.name,
              {{"min-rank", ranks.min_rank(d.body.get(), {}).str()}}});
    } else if (d.rank_bound && w > Weight(*d.rank_bound)) {
      report({"E-RANK-ANNOTATION", "rank", d.name, d.span,
              "rank " + w.str() + " exceeds annotation " + std::to_string(*d.rank_bound),
              {{"rank", w.str()}, {"bound", std::to_string(*d.rank_bound)}}});
    }
  }
  timer.lap("ranks");

  for (const auto& d : m.prog->procdefs) {
    std::size_t failing = 0;
    const ProcExpr* first = nullptr;
    for (const ProcExpr* p : m.occurrences)
      if (m.owner.at(p) == d.name && !ranks.action_bounded(p, {})) {
        if (!first) first = p;
        ++failing;
      }
    if (first)
      report({"E-UNBOUNDED-ACTION", "action-bounded", d.name, first->span,
              "sub-process at " + std::to_string(first->span.line) + ":" +
                  std::to_string(first->span.column) + " has no finite path to termination",
              {{"unbounded-occurrences", std::to_string(failing)}}});
  }
  timer.lap("boundedness");

  for (const auto& d : r.definitions) r.accepted = r.accepted && d.ok;
  return r;
}

}  // namespace fairchk

#endif  // FAIRCHK_TYPECHECK_HPP
