// Copyright 2026 The fairchk Authors
// SPDX-License-Identifier: Apache-2.0

// Shared helpers for the test suites: corpus access, random generators and
// independent reference implementations used as oracles.

#ifndef FAIRCHK_TESTS_SUPPORT_HPP
#define FAIRCHK_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fairchk/fairchk.hpp"

namespace fairchk::testing {

inline std::string corpus_dir() { return FAIRCHK_CORPUS_DIR; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(corpus_dir()))
    if (e.path().extension() == ".ft") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

inline SourceProgram load_corpus(const std::string& name) {
  return parse(read_file(corpus_dir() + "/" + name));
}

/// A parsed program together with its model. The program is heap-allocated
/// so the model's pointer stays valid when the struct moves.
struct Checked {
  std::unique_ptr<SourceProgram> prog;
  ProgramModel model;
  CheckReport report;
};

inline Checked check_corpus(const std::string& name, CheckOptions opts = {}) {
  auto prog = std::make_unique<SourceProgram>(load_corpus(name));
  ProgramModel m = make_model(*prog);
  CheckReport r = check_program(m, opts);
  return {std::move(prog), std::move(m), std::move(r)};
}

inline std::set<std::string> codes_of(const DefinitionReport& d) {
  std::set<std::string> out;
  for (const auto& x : d.diagnostics) out.insert(x.code);
  return out;
}

inline TypeId named(ProgramModel& m, const std::string& name) {
  return intern_typedef(m.table, name, *m.prog);
}

inline TypeId type_of(ProgramModel& m, const std::string& text) {
  return intern(m.table, *parse_type(text, *m.prog), *m.prog);
}

// ---------------------------------------------------------------------------
// Random regular types

/// Random regular type with at most `max_nodes` nodes, built directly in the
/// table with reserve/define so that cycles of any shape arise.
struct TypeGen {
  std::mt19937_64 rng;
  int max_nodes = 8;
  int max_labels = 3;
  double chan_prob = 0.1;

  explicit TypeGen(std::uint64_t seed) : rng(seed) {}

  int pick(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }
  bool coin(double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

  TypeId operator()(TypeTable& table) {
    int n = 1 + pick(max_nodes);
    std::vector<TypeId> ids;
    for (int i = 0; i < n; ++i) ids.push_back(table.reserve());
    static const char* labels[] = {"a", "b", "c", "d"};
    for (int i = 0; i < n; ++i) {
      Polarity pol = coin(0.5) ? Polarity::In : Polarity::Out;
      // Later nodes end more often, so most types are bounded.
      double end_prob = 0.15 + 0.5 * i / n;
      if (coin(end_prob)) {
        table.define(ids[i], EndNode{pol});
      } else if (coin(chan_prob)) {
        TypeId payload = coin(0.5) ? table.end(Polarity::Out) : ids[pick(n)];
        table.define(ids[i], ChanNode{pol, payload, ids[pick(n)]});
      } else {
        std::map<std::string, TypeId> bs;
        int k = 1 + pick(max_labels);
        for (int j = 0; j < k; ++j) bs[labels[pick(4)]] = ids[pick(n)];
        table.define(ids[i], TagsNode{pol, std::move(bs)});
      }
    }
    return ids[0];
  }
};

/// Copies the graph reachable from `root` into fresh nodes. `edit` may
/// rewrite the (already remapped) copy of any node. Channel payloads keep
/// pointing at the original nodes, so edits never change a payload type.
inline TypeId copy_graph(TypeTable& table, TypeId root,
                         const std::function<void(TypeId, TypeNode&)>& edit = {}) {
  std::vector<TypeId> nodes = reachable(table, root);
  std::map<TypeId, TypeId> map;
  for (TypeId n : nodes) map[n] = table.reserve();
  for (TypeId n : nodes) {
    TypeNode node = table.node(n);
    std::visit(overloaded{
                   [](EndNode&) {},
                   [&](TagsNode& t) {
                     for (auto& [_, c] : t.branches) c = map.at(c);
                   },
                   [&](ChanNode& c) { c.cont = map.at(c.cont); },
               },
               node);
    if (edit) edit(n, node);
    table.define(map[n], node);
  }
  return map.at(root);
}

/// A variant of `root` that is an unfair supertype of it: one output node
/// loses a label, one input node gains a label, or the root is unfolded
/// once into a fresh node.
inline TypeId mutate_up(TypeTable& table, TypeId root, std::mt19937_64& rng) {
  std::vector<std::pair<TypeId, int>> options;  // node, kind
  for (TypeId n : reachable(table, root)) {
    if (const auto* t = std::get_if<TagsNode>(&table.node(n))) {
      if (t->pol == Polarity::Out && t->branches.size() > 1) options.emplace_back(n, 0);
      if (t->pol == Polarity::In && t->branches.size() < 5) options.emplace_back(n, 1);
    }
  }
  options.emplace_back(root, 2);
  auto [victim, kind] = options[rng() % options.size()];
  if (kind == 2) {
    TypeId fresh = table.reserve();
    table.define(fresh, table.node(root));
    return fresh;
  }
  TypeId in_end = table.end(Polarity::In);
  std::uint64_t r = rng();
  return copy_graph(table, root, [&](TypeId old, TypeNode& node) {
    if (old != victim) return;
    auto& t = std::get<TagsNode>(node);
    if (kind == 0) {
      auto it = t.branches.begin();
      std::advance(it, static_cast<long>(r % t.branches.size()));
      t.branches.erase(it);
    } else {
      static const char* extra[] = {"a", "b", "c", "d", "e"};
      for (int i = 0; i < 5; ++i)
        if (t.branches.emplace(extra[(r + i) % 5], in_end).second) break;
    }
  });
}

// ---------------------------------------------------------------------------
// Oracles

/// Whether the trees of `a` and `b` agree on every path of length below
/// `depth`, by direct recursion on the depth (memoized).
inline bool agree_to_depth(const TypeTable& table, TypeId a, TypeId b, int depth,
                           std::map<std::tuple<TypeId, TypeId, int>, bool>& memo) {
  if (depth == 0) return true;
  auto key = std::make_tuple(a, b, depth);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const TypeNode& x = table.node(a);
  const TypeNode& y = table.node(b);
  bool ok = x.index() == y.index() && node_polarity(x) == node_polarity(y);
  if (ok) {
    if (const auto* tx = std::get_if<TagsNode>(&x)) {
      const auto& ty = std::get<TagsNode>(y);
      ok = tx->branches.size() == ty.branches.size();
      for (auto i = tx->branches.begin(), j = ty.branches.begin(); ok && i != tx->branches.end(); ++i, ++j)
        ok = i->first == j->first && agree_to_depth(table, i->second, j->second, depth - 1, memo);
    } else if (const auto* cx = std::get_if<ChanNode>(&x)) {
      const auto& cy = std::get<ChanNode>(y);
      ok = agree_to_depth(table, cx->payload, cy.payload, depth - 1, memo) &&
           agree_to_depth(table, cx->cont, cy.cont, depth - 1, memo);
    }
  }
  memo[key] = ok;
  return ok;
}

/// Tree equality by expansion to depth 2 * |a| * |b|, past which two regular
/// trees that still agree must agree forever.
inline bool equiv_by_expansion(const TypeTable& table, TypeId a, TypeId b) {
  int depth = 2 * static_cast<int>(reachable(table, a).size() * reachable(table, b).size()) + 1;
  std::map<std::tuple<TypeId, TypeId, int>, bool> memo;
  return agree_to_depth(table, a, b, depth, memo);
}

/// Reachable nodes by depth-first search.
inline std::set<TypeId> reachable_dfs(const TypeTable& table, TypeId root) {
  std::set<TypeId> seen;
  std::function<void(TypeId)> go = [&](TypeId t) {
    if (!seen.insert(t).second) return;
    for (TypeId c : children(table, t)) go(c);
  };
  go(root);
  return seen;
}

/// Pair enumeration by depth-first search over matched children.
inline std::set<TypePair> pairs_dfs(const TypeTable& table, TypeId a, TypeId b) {
  std::set<TypePair> seen;
  std::function<void(TypeId, TypeId)> go = [&](TypeId x, TypeId y) {
    if (!seen.insert({x, y}).second) return;
    const auto* tx = std::get_if<TagsNode>(&table.node(x));
    const auto* ty = std::get_if<TagsNode>(&table.node(y));
    if (tx && ty)
      for (const auto& [l, c] : tx->branches)
        if (ty->branches.count(l)) go(c, ty->branches.at(l));
    const auto* cx = std::get_if<ChanNode>(&table.node(x));
    const auto* cy = std::get_if<ChanNode>(&table.node(y));
    if (cx && cy) {
      go(cx->payload, cy->payload);
      go(cx->cont, cy->cont);
    }
  };
  go(a, b);
  return seen;
}

/// Session rank by layered search: the set of configurations reachable with
/// exactly n synchronizations, closed under picks, for n = 0, 1, ...
inline Weight rank_by_layers(TypeTable& table, TypeId s, TypeId t) {
  auto pick_closure = [&](std::set<Config> layer) {
    std::vector<Config> work(layer.begin(), layer.end());
    while (!work.empty()) {
      Config c = work.back();
      work.pop_back();
      for (const auto& tr : type_transitions(table, c.left))
        if (std::holds_alternative<Tau>(tr.label) && layer.insert({tr.target, c.right}).second)
          work.push_back({tr.target, c.right});
      for (const auto& tr : type_transitions(table, c.right))
        if (std::holds_alternative<Tau>(tr.label) && layer.insert({c.left, tr.target}).second)
          work.push_back({c.left, tr.target});
    }
    return layer;
  };
  std::set<Config> layer = pick_closure({{s, t}});
  std::set<std::set<Config>> seen_layers;
  for (std::uint64_t n = 0;; ++n) {
    for (const Config& c : layer)
      if (is_success(table, c)) return Weight(n + 1);
    if (layer.empty() || !seen_layers.insert(layer).second) return Weight::infinity();
    std::set<Config> next;
    for (const Config& c : layer)
      for (const auto& a : type_transitions(table, c.left))
        for (const auto& b : type_transitions(table, c.right)) {
          const auto* ta = std::get_if<TagAct>(&a.label);
          const auto* tb = std::get_if<TagAct>(&b.label);
          const auto* ca = std::get_if<ChanAct>(&a.label);
          const auto* cb = std::get_if<ChanAct>(&b.label);
          bool sync = (ta && tb && ta->pol != tb->pol && ta->label == tb->label) ||
                      (ca && cb && ca->pol != cb->pol && equiv_by_expansion(table, ca->payload, cb->payload));
          if (sync) next.insert({a.target, b.target});
        }
    layer = pick_closure(std::move(next));
  }
}

/// Least annotation n <= bound such that s <=n t is derivable in the
/// annotated fair subtyping rules (greatest fixpoint over judgments), or
/// infinity when none is.
inline Weight derivation_search(TypeTable& table, TypeId s, TypeId t, std::uint64_t bound) {
  // Candidate pairs: everything reachable by matched descent.
  std::set<TypePair> pairs = pairs_dfs(table, s, t);
  struct Rule {
    enum { End, In, Out, Chan, Bad } kind;
    bool strict = false;
    std::vector<TypePair> premises;
  };
  std::map<TypePair, Rule> rules;
  for (const auto& p : pairs) {
    const TypeNode& a = table.node(p.first);
    const TypeNode& b = table.node(p.second);
    Rule r{Rule::Bad, false, {}};
    const auto* ea = std::get_if<EndNode>(&a);
    const auto* eb = std::get_if<EndNode>(&b);
    const auto* ta = std::get_if<TagsNode>(&a);
    const auto* tb = std::get_if<TagsNode>(&b);
    const auto* ca = std::get_if<ChanNode>(&a);
    const auto* cb = std::get_if<ChanNode>(&b);
    if (ea && eb && ea->pol == eb->pol) {
      r.kind = Rule::End;
    } else if (ca && cb && ca->pol == cb->pol && equiv_by_expansion(table, ca->payload, cb->payload)) {
      r.kind = Rule::Chan;
      r.premises.push_back({ca->cont, cb->cont});
    } else if (ta && tb && ta->pol == tb->pol) {
      const auto& small = ta->pol == Polarity::In ? ta->branches : tb->branches;
      const auto& large = ta->pol == Polarity::In ? tb->branches : ta->branches;
      bool ok = std::all_of(small.begin(), small.end(),
                            [&](const auto& kv) { return large.count(kv.first) > 0; });
      if (ok) {
        r.kind = ta->pol == Polarity::In ? Rule::In : Rule::Out;
        r.strict = ta->pol == Polarity::Out && small.size() < large.size();
        for (const auto& [l, _] : small) r.premises.push_back({ta->branches.at(l), tb->branches.at(l)});
      }
    }
    rules[p] = r;
  }
  // valid[p][n]: judgment p <=n currently assumed derivable.
  std::map<TypePair, std::vector<bool>> valid;
  for (const auto& p : pairs) valid[p] = std::vector<bool>(bound + 1, rules[p].kind != Rule::Bad);
  auto some_below = [&](const TypePair& p, std::uint64_t n, bool strict) {
    const auto& v = valid.at(p);
    for (std::uint64_t m = 0; m <= bound; ++m)
      if (v[m] && (strict ? m < n : m <= n)) return true;
    return false;
  };
  auto any = [&](const TypePair& p) { return some_below(p, bound, false); };
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : pairs) {
      const Rule& r = rules[p];
      for (std::uint64_t n = 0; n <= bound; ++n) {
        if (!valid[p][n]) continue;
        bool ok = false;
        if (r.kind == Rule::End) {
          ok = true;
        } else if (r.kind == Rule::In || r.kind == Rule::Chan) {
          ok = std::all_of(r.premises.begin(), r.premises.end(),
                           [&](const TypePair& q) { return some_below(q, n, false); });
        } else if (r.kind == Rule::Out) {
          bool out1 = !r.strict && std::all_of(r.premises.begin(), r.premises.end(), [&](const TypePair& q) {
                        return some_below(q, n, false);
                      });
          bool out2 = std::all_of(r.premises.begin(), r.premises.end(), any) &&
                      std::any_of(r.premises.begin(), r.premises.end(),
                                  [&](const TypePair& q) { return some_below(q, n, true); });
          ok = out1 || out2;
        }
        if (!ok) {
          valid[p][n] = false;
          changed = true;
        }
      }
    }
  }
  for (std::uint64_t n = 0; n <= bound; ++n)
    if (valid[{s, t}][n]) return Weight(n);
  return Weight::infinity();
}

// ---------------------------------------------------------------------------
// Random programs (syntax only)

struct ProgramGen {
  std::mt19937_64 rng;
  explicit ProgramGen(std::uint64_t seed) : rng(seed) {}

  int pick(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

  std::vector<std::string> labels{"a", "b", "ok", "stop"};
  std::vector<std::string> chans{"x", "y", "z", "w'"};
  std::vector<std::string> tnames{"T", "U", "V'"};
  std::vector<std::pair<std::string, int>> procs;  // name, arity

  TypeExprPtr type(int depth) {
    int k = depth <= 0 ? pick(3) : pick(6);
    Polarity pol = pick(2) ? Polarity::In : Polarity::Out;
    if (k == 0) return make_type(TypeExpr::End{pol});
    if (k == 1 || k == 2) return make_type(TypeExpr::Name{tnames[pick(tnames.size())]});
    if (k == 3) return make_type(TypeExpr::Chan{pol, type(depth - 1), type(depth - 1)});
    std::vector<std::pair<std::string, TypeExprPtr>> bs;
    std::vector<std::string> ls = labels;
    std::shuffle(ls.begin(), ls.end(), rng);
    int n = 1 + pick(3);
    for (int i = 0; i < n; ++i) bs.emplace_back(ls[i], type(depth - 1));
    return make_type(TypeExpr::Branches{pol, std::move(bs)});
  }

  std::string chan() { return chans[pick(chans.size())]; }

  ProcExprPtr proc(int depth) {
    using P = ProcExpr;
    int k = depth <= 0 ? pick(3) : pick(11);
    switch (k) {
      case 0: return make_proc(P::Done{});
      case 1: return make_proc(P::Close{chan()});
      case 2: {
        auto [name, arity] = procs[pick(procs.size())];
        std::vector<std::string> args;
        for (int i = 0; i < arity; ++i) args.push_back(chan());
        return make_proc(P::Call{name, args});
      }
      case 3: return make_proc(P::Wait{chan(), proc(depth - 1)});
      case 4: {
        std::vector<std::pair<std::string, ProcExprPtr>> bs;
        std::vector<std::string> ls = labels;
        std::shuffle(ls.begin(), ls.end(), rng);
        int n = 1 + pick(3);
        for (int i = 0; i < n; ++i) bs.emplace_back(ls[i], proc(depth - 1));
        return make_proc(P::TagComm{chan(), pick(2) ? Polarity::In : Polarity::Out, std::move(bs)});
      }
      case 5: return make_proc(P::ChanOut{chan(), chan(), proc(depth - 1)});
      case 6: return make_proc(P::ChanIn{chan(), chan(), type(2), proc(depth - 1)});
      case 7:
        return make_proc(P::Choice{1 + pick(2), true, proc(depth - 1), proc(depth - 1)});
      case 8:
        return make_proc(P::NewSession{chan(), type(2), type(2), proc(depth - 1), proc(depth - 1)});
      case 9: {
        std::optional<std::uint64_t> w;
        if (pick(2)) w = static_cast<std::uint64_t>(pick(5));
        return make_proc(P::Cast{chan(), type(2), w, proc(depth - 1)});
      }
      default: return make_proc(P::Done{});
    }
  }

  SourceProgram program() {
    SourceProgram prog;
    for (const auto& n : tnames) prog.typedefs.push_back({n, nullptr, {}});
    // Typedef bodies must be guarded: wrap in a constructor.
    for (auto& td : prog.typedefs) {
      auto body = type(2);
      while (std::holds_alternative<TypeExpr::Name>(body->node)) body = type(2);
      td.body = body;
    }
    procs.clear();
    int n = 1 + pick(3);
    static const char* names[] = {"Main", "A", "B'", "Loop"};
    for (int i = 0; i < n; ++i) procs.emplace_back(names[i], pick(3));
    for (const auto& [name, arity] : procs) {
      ProcDef d;
      d.name = name;
      for (int i = 0; i < arity; ++i) d.params.push_back({chans[i], type(2)});
      if (pick(4) == 0) d.rank_bound = static_cast<std::uint64_t>(pick(10));
      d.body = proc(4);
      prog.procdefs.push_back(std::move(d));
    }
    return prog;
  }
};

}  // namespace fairchk::testing

#endif  // FAIRCHK_TESTS_SUPPORT_HPP
