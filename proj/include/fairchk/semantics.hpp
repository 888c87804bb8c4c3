// Copyright 2026 The fairchk Authors
// SPDX-License-Identifier: Apache-2.0

// Transitions of session types, session configurations and compatibility.

#ifndef FAIRCHK_SEMANTICS_HPP
#define FAIRCHK_SEMANTICS_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fairchk/types.hpp"
#include "fairchk/weight.hpp"

namespace fairchk {

struct Tau {
  auto operator<=>(const Tau&) const = default;
};
struct TagAct {
  Polarity pol;
  std::string label;
  auto operator<=>(const TagAct&) const = default;
};
struct ChanAct {
  Polarity pol;
  TypeId payload;
  auto operator<=>(const ChanAct&) const = default;
};

using TypeLabel = std::variant<Tau, TagAct, ChanAct>;

struct Transition {
  TypeLabel label;
  TypeId target;
};

/// Outgoing transitions of a single type. A multi-branch output first picks
/// a label (a tau step to the singleton output), and only a singleton output
/// sends its tag. Labels are listed in lexicographic order.
inline std::vector<Transition> type_transitions(TypeTable& table, TypeId t) {
  std::vector<Transition> out;
  TypeNode n = table.node(t);
  if (const auto* tg = std::get_if<TagsNode>(&n)) {
    if (tg->pol == Polarity::In || tg->branches.size() == 1) {
      for (const auto& [l, c] : tg->branches) out.push_back({TagAct{tg->pol, l}, c});
    } else {
      for (const auto& [l, c] : tg->branches)
        out.push_back({Tau{}, table.tags(Polarity::Out, {{l, c}})});
    }
  } else if (const auto* ch = std::get_if<ChanNode>(&n)) {
    out.push_back({ChanAct{ch->pol, ch->payload}, ch->cont});
  }
  return out;
}

struct Config {
  TypeId left;
  TypeId right;
  auto operator<=>(const Config&) const = default;
};

enum class EdgeKind : std::uint8_t { PickLeft, PickRight, Sync };

struct ConfigEdge {
  std::size_t target;
  EdgeKind kind;
};

/// The configurations reachable from a root pair. Node 0 is the root.
struct ConfigGraph {
  std::vector<Config> nodes;
  std::vector<std::vector<ConfigEdge>> edges;
  std::vector<bool> success;

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& e : edges) n += e.size();
    return n;
  }
};

inline bool is_success(const TypeTable& table, Config c) {
  const auto* a = std::get_if<EndNode>(&table.node(c.left));
  const auto* b = std::get_if<EndNode>(&table.node(c.right));
  return a && b && a->pol != b->pol;
}

inline ConfigGraph build_config_graph(TypeTable& table, TypeId s, TypeId t) {
  ConfigGraph g;
  std::map<Config, std::size_t> index;
  auto add = [&](Config c) {
    auto [it, fresh] = index.emplace(c, g.nodes.size());
    if (fresh) {
      g.nodes.push_back(c);
      g.edges.emplace_back();
      g.success.push_back(is_success(table, c));
    }
    return it->second;
  };
  add({s, t});
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    Config c = g.nodes[i];
    std::vector<Transition> ls = type_transitions(table, c.left);
    std::vector<Transition> rs = type_transitions(table, c.right);
    std::vector<ConfigEdge> es;
    for (const auto& tr : ls)
      if (std::holds_alternative<Tau>(tr.label))
        es.push_back({add({tr.target, c.right}), EdgeKind::PickLeft});
    for (const auto& tr : rs)
      if (std::holds_alternative<Tau>(tr.label))
        es.push_back({add({c.left, tr.target}), EdgeKind::PickRight});
    for (const auto& a : ls) {
      for (const auto& b : rs) {
        bool sync = false;
        if (const auto* ta = std::get_if<TagAct>(&a.label)) {
          const auto* tb = std::get_if<TagAct>(&b.label);
          sync = tb && ta->pol != tb->pol && ta->label == tb->label;
        } else if (const auto* ca = std::get_if<ChanAct>(&a.label)) {
          const auto* cb = std::get_if<ChanAct>(&b.label);
          sync = cb && ca->pol != cb->pol && equiv(table, ca->payload, cb->payload);
        }
        if (sync) es.push_back({add({a.target, b.target}), EdgeKind::Sync});
      }
    }
    g.edges[i] = std::move(es);
  }
  return g;
}

/// Nodes of `g` from which some success node is reachable.
inline std::vector<bool> can_succeed(const ConfigGraph& g) {
  std::vector<std::vector<std::size_t>> preds(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    for (const auto& e : g.edges[i]) preds[e.target].push_back(i);
  std::vector<bool> good = g.success;
  std::deque<std::size_t> work;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (good[i]) work.push_back(i);
  while (!work.empty()) {
    std::size_t n = work.front();
    work.pop_front();
    for (std::size_t p : preds[n])
      if (!good[p]) {
        good[p] = true;
        work.push_back(p);
      }
  }
  return good;
}

inline bool compatible(const ConfigGraph& g) {
  for (bool b : can_succeed(g))
    if (!b) return false;
  return true;
}

inline bool compatible(TypeTable& table, TypeId s, TypeId t) {
  return compatible(build_config_graph(table, s, t));
}

/// One plus the least number of synchronizations leading from the root to a
/// success node. Picks are free.
inline Weight session_rank(const ConfigGraph& g) {
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> dist(g.nodes.size(), kUnseen);
  std::deque<std::size_t> work{0};
  dist[0] = 0;
  while (!work.empty()) {
    std::size_t n = work.front();
    work.pop_front();
    if (g.success[n]) return Weight(dist[n] + 1);
    for (const auto& e : g.edges[n]) {
      std::size_t w = e.kind == EdgeKind::Sync ? 1 : 0;
      if (dist[e.target] == kUnseen || dist[n] + w < dist[e.target]) {
        dist[e.target] = dist[n] + w;
        if (w == 0)
          work.push_front(e.target);
        else
          work.push_back(e.target);
      }
    }
  }
  return Weight::infinity();
}

inline Weight session_rank(TypeTable& table, TypeId s, TypeId t) {
  return session_rank(build_config_graph(table, s, t));
}

/// Compatible pairs must have a finite rank. Returns false on a violation.
inline bool rank_consistent(TypeTable& table, TypeId s, TypeId t) {
  ConfigGraph g = build_config_graph(table, s, t);
  return !compatible(g) || session_rank(g).finite();
}

/// GraphViz rendering; success nodes are double circles, dead nodes (which
/// cannot reach success) are drawn dashed.
inline std::string to_dot(const TypeTable& table, const ConfigGraph& g) {
  auto esc = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '"' || c == '\\') o += '\\';
      o += c;
    }
    return o;
  };
  std::vector<bool> good = can_succeed(g);
  std::string out = "digraph config {\n  node [shape=ellipse];\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    std::string label =
        render_type(table, g.nodes[i].left) + " # " + render_type(table, g.nodes[i].right);
    out += "  n" + std::to_string(i) + " [label=\"" + esc(label) + "\"";
    if (g.success[i]) out += ", shape=doublecircle";
    if (!good[i]) out += ", style=dashed";
    out += "];\n";
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    for (const auto& e : g.edges[i]) {
      out += "  n" + std::to_string(i) + " -> n" + std::to_string(e.target);
      if (e.kind != EdgeKind::Sync) out += " [style=dotted]";
      out += ";\n";
    }
  return out + "}\n";
}

}  // namespace fairchk

#endif  // FAIRCHK_SEMANTICS_HPP
