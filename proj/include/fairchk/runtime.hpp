// Copyright 2026 The fairchk Authors
// SPDX-License-Identifier: Apache-2.0

// Reference interpreter with a seeded, uniformly random scheduler.

#ifndef FAIRCHK_RUNTIME_HPP
#define FAIRCHK_RUNTIME_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fairchk/render.hpp"
#include "fairchk/syntax.hpp"

namespace fairchk {

/// 64-bit Mersenne Twister (fixed by the C++ standard) with a portable
/// unbiased bounded draw, so traces reproduce across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, n). Requires n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % n + 1) % n;
    std::uint64_t x;
    do x = gen_();
    while (x > limit);
    return x % n;
  }

 private:
  std::mt19937_64 gen_;
};

struct Endpoint {
  std::uint32_t session = 0;
  int side = 0;  // 0: left of `new`, 1: right
  auto operator<=>(const Endpoint&) const = default;
};

struct Thread {
  ProcExprPtr proc;
  std::map<std::string, Endpoint> env;
};

struct TraceEvent {
  std::uint64_t step;
  std::string rule;
  std::string session;  // "-" when no session is involved
  std::string detail;
};

struct RunOutcome {
  enum class Kind { Terminated, StepLimit, Stuck };
  Kind kind = Kind::Terminated;
  std::uint64_t steps = 0;
  std::string dump;  // residual threads when stuck

  static const char* kind_name(Kind k) {
    switch (k) {
      case Kind::Terminated: return "terminated";
      case Kind::StepLimit: return "step-limit";
      case Kind::Stuck: return "stuck";
    }
    return "?";
  }
};

/// The rule names a trace may contain.
inline const std::vector<std::string>& reduction_rules() {
  static const std::vector<std::string> rules{"rb-choice", "rb-pick",     "rb-signal", "rb-tag",
                                              "rb-channel", "sb-cast-new", "sb-call"};
  return rules;
}

/// A flat parallel composition of threads. Sessions are restricted names
/// connecting two thread endpoints.
class Soup {
 public:
  Soup(const SourceProgram& prog, ProcExprPtr main) : prog_(&prog) { spawn({std::move(main), {}}); }

  bool terminated() const { return threads_.empty(); }
  const std::vector<Thread>& threads() const { return threads_; }

  /// Applies one redex chosen uniformly among the enabled ones. Returns
  /// false when none is enabled.
  bool step(Rng& rng, std::uint64_t step_no, const std::function<void(const TraceEvent&)>& trace) {
    std::vector<Redex> rs = redexes();
    if (rs.empty()) return false;
    const Redex r = rs[rng.below(rs.size())];
    fire(r, rng, step_no, trace);
    return true;
  }

  std::string dump() const {
    std::string out;
    for (const auto& t : threads_) {
      out += render(*t.proc);
      if (!t.env.empty()) {
        out += "    with";
        for (const auto& [n, e] : t.env) out += " " + n + "=" + session_name(e.session) + side_mark(e);
      }
      out += "\n";
    }
    return out;
  }

 private:
  enum class RedexKind { Choice, Pick, Cast, Call, Sync };
  struct Redex {
    RedexKind kind;
    std::size_t thread;
    std::size_t partner = 0;  // for Sync: the input side
  };

  static std::string side_mark(const Endpoint& e) { return e.side == 0 ? "+" : "-"; }

  std::string session_name(std::uint32_t id) const { return session_names_[id]; }

  // Adds a thread, eagerly splitting session creations and dropping `done`.
  void spawn(Thread t) {
    while (true) {
      if (std::holds_alternative<ProcExpr::Done>(t.proc->node)) return;
      const auto* n = std::get_if<ProcExpr::NewSession>(&t.proc->node);
      if (!n) break;
      auto id = static_cast<std::uint32_t>(session_names_.size());
      session_names_.push_back(n->chan + "#" + std::to_string(id));
      Thread right{n->right, t.env};
      right.env[n->chan] = {id, 1};
      t.env[n->chan] = {id, 0};
      t.proc = n->left;
      spawn(std::move(right));
    }
    threads_.push_back(std::move(t));
  }

  static const std::string* subject(const ProcExpr& p) {
    using P = ProcExpr;
    return std::visit(overloaded{
                          [](const P::Close& c) -> const std::string* { return &c.chan; },
                          [](const P::Wait& w) -> const std::string* { return &w.chan; },
                          [](const P::TagComm& t) -> const std::string* { return &t.chan; },
                          [](const P::ChanOut& o) -> const std::string* { return &o.chan; },
                          [](const P::ChanIn& i) -> const std::string* { return &i.chan; },
                          [](const auto&) -> const std::string* { return nullptr; },
                      },
                      p.node);
  }

  // Whether the output-ish head of `a` synchronizes with the input-ish head of `b`.
  static bool matches(const ProcExpr& a, const ProcExpr& b) {
    using P = ProcExpr;
    if (std::holds_alternative<P::Close>(a.node)) return std::holds_alternative<P::Wait>(b.node);
    if (const auto* t = std::get_if<P::TagComm>(&a.node)) {
      const auto* u = std::get_if<P::TagComm>(&b.node);
      if (!u || t->pol != Polarity::Out || u->pol != Polarity::In || t->branches.size() != 1)
        return false;
      for (const auto& [l, _] : u->branches)
        if (l == t->branches[0].first) return true;
      return false;
    }
    if (std::holds_alternative<P::ChanOut>(a.node)) return std::holds_alternative<P::ChanIn>(b.node);
    return false;
  }

  std::vector<Redex> redexes() const {
    using P = ProcExpr;
    std::vector<Redex> rs;
    std::map<Endpoint, std::size_t> holder;
    for (std::size_t i = 0; i < threads_.size(); ++i)
      if (const std::string* x = subject(*threads_[i].proc)) holder[threads_[i].env.at(*x)] = i;
    for (std::size_t i = 0; i < threads_.size(); ++i) {
      const ProcExpr& p = *threads_[i].proc;
      if (std::holds_alternative<P::Choice>(p.node)) {
        rs.push_back({RedexKind::Choice, i});
      } else if (std::holds_alternative<P::Cast>(p.node)) {
        rs.push_back({RedexKind::Cast, i});
      } else if (std::holds_alternative<P::Call>(p.node)) {
        rs.push_back({RedexKind::Call, i});
      } else if (const auto* t = std::get_if<P::TagComm>(&p.node);
                 t && t->pol == Polarity::Out && t->branches.size() > 1) {
        rs.push_back({RedexKind::Pick, i});
      } else if (const std::string* x = subject(p)) {
        Endpoint e = threads_[i].env.at(*x);
        auto it = holder.find({e.session, 1 - e.side});
        if (it != holder.end() && matches(p, *threads_[it->second].proc))
          rs.push_back({RedexKind::Sync, i, it->second});
      }
    }
    return rs;
  }

  void fire(const Redex& r, Rng& rng, std::uint64_t step_no,
            const std::function<void(const TraceEvent&)>& trace) {
    using P = ProcExpr;
    auto emit = [&](std::string rule, std::string session, std::string detail) {
      if (trace) trace({step_no, std::move(rule), std::move(session), std::move(detail)});
    };
    Thread t = threads_[r.thread];
    const ProcExpr& p = *t.proc;
    switch (r.kind) {
      case RedexKind::Choice: {
        const auto& c = std::get<P::Choice>(p.node);
        bool left = rng.below(2) == 0;
        emit("rb-choice", "-", left ? "left" : "right");
        replace(r.thread, {left ? c.left : c.right, t.env});
        return;
      }
      case RedexKind::Pick: {
        const auto& tc = std::get<P::TagComm>(p.node);
        // Labels are drawn in lexicographic order, independent of source order.
        std::map<std::string, ProcExprPtr> sorted(tc.branches.begin(), tc.branches.end());
        auto it = sorted.begin();
        std::advance(it, static_cast<long>(rng.below(sorted.size())));
        emit("rb-pick", session_name(t.env.at(tc.chan).session), it->first);
        P::TagComm single{tc.chan, Polarity::Out, {{it->first, it->second}}};
        replace(r.thread, {make_proc(std::move(single), p.span), t.env});
        return;
      }
      case RedexKind::Cast: {
        const auto& c = std::get<P::Cast>(p.node);
        emit("sb-cast-new", session_name(t.env.at(c.chan).session), c.chan);
        replace(r.thread, {c.cont, t.env});
        return;
      }
      case RedexKind::Call: {
        const auto& c = std::get<P::Call>(p.node);
        const ProcDef* d = prog_->find_proc(c.name);
        std::map<std::string, Endpoint> env;
        for (std::size_t i = 0; i < c.args.size(); ++i) env[d->params[i].name] = t.env.at(c.args[i]);
        emit("sb-call", "-", c.name);
        replace(r.thread, {d->body, std::move(env)});
        return;
      }
      case RedexKind::Sync: break;
    }
    Thread u = threads_[r.partner];
    const ProcExpr& q = *u.proc;
    std::string sess = session_name(t.env.at(*subject(p)).session);
    std::optional<Thread> next_t, next_u;
    if (std::holds_alternative<P::Close>(p.node)) {
      const auto& w = std::get<P::Wait>(q.node);
      emit("rb-signal", sess, "");
      u.env.erase(w.chan);
      next_u = Thread{w.cont, u.env};
    } else if (const auto* send = std::get_if<P::TagComm>(&p.node)) {
      const auto& in = std::get<P::TagComm>(q.node);
      const std::string& label = send->branches[0].first;
      emit("rb-tag", sess, label);
      next_t = Thread{send->branches[0].second, t.env};
      for (const auto& [l, b] : in.branches)
        if (l == label) next_u = Thread{b, u.env};
    } else {
      const auto& out = std::get<P::ChanOut>(p.node);
      const auto& in = std::get<P::ChanIn>(q.node);
      emit("rb-channel", sess, session_name(t.env.at(out.payload).session));
      Endpoint sent = t.env.at(out.payload);
      t.env.erase(out.payload);
      u.env[in.var] = sent;
      next_t = Thread{out.cont, t.env};
      next_u = Thread{in.cont, u.env};
    }
    // Remove both threads (higher index first), then respawn continuations.
    std::size_t hi = std::max(r.thread, r.partner), lo = std::min(r.thread, r.partner);
    threads_.erase(threads_.begin() + static_cast<long>(hi));
    threads_.erase(threads_.begin() + static_cast<long>(lo));
    if (next_t) spawn(std::move(*next_t));
    if (next_u) spawn(std::move(*next_u));
  }

  void replace(std::size_t i, Thread t) {
    threads_.erase(threads_.begin() + static_cast<long>(i));
    spawn(std::move(t));
  }

  const SourceProgram* prog_;
  std::vector<Thread> threads_;
  std::vector<std::string> session_names_;
};

/// The definition a run starts from: `Main` if present, otherwise the first
/// definition without parameters.
inline const ProcDef* entry_point(const SourceProgram& prog) {
  if (const ProcDef* m = prog.find_proc("Main"); m && m->params.empty()) return m;
  for (const auto& d : prog.procdefs)
    if (d.params.empty()) return &d;
  return nullptr;
}

struct RunOptions {
  std::uint64_t seed = 1;
  std::uint64_t max_steps = 100000;
  std::function<void(const TraceEvent&)> trace;
};

/// Runs `entry` (a parameterless definition of `prog`) to completion, to a
/// stuck state or to the step limit.
inline RunOutcome run(const SourceProgram& prog, const ProcDef& entry, const RunOptions& opts) {
  Rng rng(opts.seed);
  Soup soup(prog, entry.body);
  RunOutcome out;
  while (!soup.terminated()) {
    if (out.steps >= opts.max_steps) {
      out.kind = RunOutcome::Kind::StepLimit;
      return out;
    }
    if (!soup.step(rng, out.steps + 1, opts.trace)) {
      out.kind = RunOutcome::Kind::Stuck;
      out.dump = soup.dump();
      return out;
    }
    ++out.steps;
  }
  out.kind = RunOutcome::Kind::Terminated;
  return out;
}

}  // namespace fairchk

#endif  // FAIRCHK_RUNTIME_HPP
