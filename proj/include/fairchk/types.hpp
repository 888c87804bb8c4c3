// Copyright 2026 The fairchk Authors
// SPDX-License-Identifier: Apache-2.0

// Regular session-type trees, represented as a graph of interned nodes.

#ifndef FAIRCHK_TYPES_HPP
#define FAIRCHK_TYPES_HPP

#include <cassert>
#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fairchk/syntax.hpp"

namespace fairchk {

struct TypeId {
  std::uint32_t index = 0;
  auto operator<=>(const TypeId&) const = default;
};

using TypePair = std::pair<TypeId, TypeId>;

struct EndNode {
  Polarity pol;
  auto operator<=>(const EndNode&) const = default;
};
struct TagsNode {
  Polarity pol;
  std::map<std::string, TypeId> branches;  // non-empty
  auto operator<=>(const TagsNode&) const = default;
};
struct ChanNode {
  Polarity pol;
  TypeId payload;
  TypeId cont;
  auto operator<=>(const ChanNode&) const = default;
};

using TypeNode = std::variant<EndNode, TagsNode, ChanNode>;

inline Polarity node_polarity(const TypeNode& n) {
  return std::visit([](const auto& x) { return x.pol; }, n);
}

/// Append-only store of type nodes. Nodes built through end()/tags()/chan()
/// are hash-consed; recursive types are tied with reserve()/define().
///
/// A table is not safe for concurrent mutation. Once construction is over it
/// can be read from several threads, except that equiv() and dual() fill
/// memo tables.
class TypeTable {
 public:
  TypeId end(Polarity pol) { return make(EndNode{pol}); }

  TypeId tags(Polarity pol, std::map<std::string, TypeId> branches) {
    if (branches.empty()) throw std::invalid_argument("tag branch set must be non-empty");
    return make(TagsNode{pol, std::move(branches)});
  }

  TypeId chan(Polarity pol, TypeId payload, TypeId cont) {
    return make(ChanNode{pol, payload, cont});
  }

  TypeId reserve() {
    nodes_.emplace_back(std::nullopt);
    return TypeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  void define(TypeId id, TypeNode node) {
    assert(id.index < nodes_.size() && !nodes_[id.index]);
    if (auto* t = std::get_if<TagsNode>(&node); t && t->branches.empty())
      throw std::invalid_argument("tag branch set must be non-empty");
    consed_.emplace(node, id);
    nodes_[id.index] = std::move(node);
  }

  const TypeNode& node(TypeId id) const {
    assert(id.index < nodes_.size() && nodes_[id.index]);
    return *nodes_[id.index];
  }

  bool defined(TypeId id) const { return id.index < nodes_.size() && nodes_[id.index]; }
  std::size_t size() const { return nodes_.size(); }

  void set_name(TypeId id, const std::string& name) { names_.emplace(id, name); }
  const std::string* name_of(TypeId id) const {
    auto it = names_.find(id);
    return it == names_.end() ? nullptr : &it->second;
  }

  // Memo tables used by the free functions below.
  std::map<TypeId, TypeId>& dual_memo() { return dual_memo_; }
  std::map<TypePair, bool>& equiv_memo() { return equiv_memo_; }
  std::map<std::string, TypeId>& typedef_ids() { return typedef_ids_; }

 private:
  TypeId make(TypeNode n) {
    auto it = consed_.find(n);
    if (it != consed_.end()) return it->second;
    nodes_.emplace_back(n);
    TypeId id{static_cast<std::uint32_t>(nodes_.size() - 1)};
    consed_.emplace(std::move(n), id);
    return id;
  }

  std::vector<std::optional<TypeNode>> nodes_;
  std::map<TypeNode, TypeId> consed_;
  std::map<TypeId, std::string> names_;
  std::map<TypeId, TypeId> dual_memo_;
  std::map<TypePair, bool> equiv_memo_;
  std::map<std::string, TypeId> typedef_ids_;
};

/// Immediate subtrees of a node: tag continuations, channel payload and
/// continuation.
inline std::vector<TypeId> children(const TypeTable& table, TypeId id) {
  std::vector<TypeId> out;
  std::visit(overloaded{
                 [](const EndNode&) {},
                 [&](const TagsNode& t) {
                   for (const auto& [_, c] : t.branches) out.push_back(c);
                 },
                 [&](const ChanNode& c) {
                   out.push_back(c.payload);
                   out.push_back(c.cont);
                 },
             },
             table.node(id));
  return out;
}

/// Nodes reachable from `root` (including payload types), in BFS order.
inline std::vector<TypeId> reachable(const TypeTable& table, TypeId root) {
  std::vector<TypeId> order{root};
  std::set<TypeId> seen{root};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (TypeId c : children(table, order[i]))
      if (seen.insert(c).second) order.push_back(c);
  return order;
}

// ---------------------------------------------------------------------------
// Interning of surface type expressions.

namespace detail {

inline TypeId intern_expr(TypeTable& table, const TypeExpr& e, const SourceProgram& prog);

inline TypeId intern_name(TypeTable& table, const std::string& name, const SourceProgram& prog) {
  auto& ids = table.typedef_ids();
  if (auto it = ids.find(name); it != ids.end()) return it->second;
  const TypeDef* def = prog.find_type(name);
  if (!def) throw std::invalid_argument("unresolved type name '" + name + "'");
  if (const auto* alias = std::get_if<TypeExpr::Name>(&def->body->node)) {
    TypeId id = intern_name(table, alias->name, prog);
    ids.emplace(name, id);
    return id;
  }
  TypeId id = table.reserve();
  ids.emplace(name, id);
  table.set_name(id, name);
  const TypeExpr& body = *def->body;
  std::visit(overloaded{
                 [&](const TypeExpr::End& x) { table.define(id, EndNode{x.pol}); },
                 [&](const TypeExpr::Branches& b) {
                   std::map<std::string, TypeId> m;
                   for (const auto& [l, c] : b.branches) m.emplace(l, intern_expr(table, *c, prog));
                   table.define(id, TagsNode{b.pol, std::move(m)});
                 },
                 [&](const TypeExpr::Chan& c) {
                   TypeId p = intern_expr(table, *c.payload, prog);
                   TypeId k = intern_expr(table, *c.cont, prog);
                   table.define(id, ChanNode{c.pol, p, k});
                 },
                 [](const TypeExpr::Name&) {},
             },
             body.node);
  return id;
}

inline TypeId intern_expr(TypeTable& table, const TypeExpr& e, const SourceProgram& prog) {
  return std::visit(overloaded{
                        [&](const TypeExpr::End& x) { return table.end(x.pol); },
                        [&](const TypeExpr::Branches& b) {
                          std::map<std::string, TypeId> m;
                          for (const auto& [l, c] : b.branches)
                            m.emplace(l, intern_expr(table, *c, prog));
                          return table.tags(b.pol, std::move(m));
                        },
                        [&](const TypeExpr::Chan& c) {
                          TypeId p = intern_expr(table, *c.payload, prog);
                          TypeId k = intern_expr(table, *c.cont, prog);
                          return table.chan(c.pol, p, k);
                        },
                        [&](const TypeExpr::Name& n) { return intern_name(table, n.name, prog); },
                    },
                    e.node);
}

}  // namespace detail

/// Interns a resolved, contractive type expression. Typedef names are
/// resolved against `prog`; a table should only ever see one program.
inline TypeId intern(TypeTable& table, const TypeExpr& e, const SourceProgram& prog) {
  return detail::intern_expr(table, e, prog);
}

inline TypeId intern_typedef(TypeTable& table, const std::string& name,
                             const SourceProgram& prog) {
  return detail::intern_name(table, name, prog);
}

// ---------------------------------------------------------------------------
// Semantic operations.

/// Flips the polarity of every node along the carrier protocol. Channel
/// payloads are kept as they are: both endpoints exchange the same channel.
inline TypeId dual(TypeTable& table, TypeId t) {
  auto& memo = table.dual_memo();
  if (auto it = memo.find(t); it != memo.end()) return it->second;
  TypeNode n = table.node(t);
  if (const auto* e = std::get_if<EndNode>(&n)) {
    TypeId d = table.end(opposite(e->pol));
    memo.emplace(t, d);
    return d;
  }
  TypeId d = table.reserve();
  memo.emplace(t, d);
  if (auto* tg = std::get_if<TagsNode>(&n)) {
    std::map<std::string, TypeId> m;
    for (const auto& [l, c] : tg->branches) m.emplace(l, dual(table, c));
    table.define(d, TagsNode{opposite(tg->pol), std::move(m)});
  } else {
    const auto& ch = std::get<ChanNode>(n);
    table.define(d, ChanNode{opposite(ch.pol), ch.payload, dual(table, ch.cont)});
  }
  return d;
}

/// Label union of two tag branches with the same polarity and disjoint labels.
inline std::optional<TypeId> plus(TypeTable& table, TypeId t, TypeId s) {
  const auto* a = std::get_if<TagsNode>(&table.node(t));
  const auto* b = std::get_if<TagsNode>(&table.node(s));
  if (!a || !b || a->pol != b->pol) return std::nullopt;
  std::map<std::string, TypeId> m = a->branches;
  for (const auto& [l, c] : b->branches)
    if (!m.emplace(l, c).second) return std::nullopt;
  return table.tags(a->pol, std::move(m));
}

/// Tree equality, decided by a bisimulation check over pairs of reachable nodes.
inline bool equiv(TypeTable& table, TypeId t, TypeId s) {
  if (t == s) return true;
  auto& memo = table.equiv_memo();
  if (auto it = memo.find({t, s}); it != memo.end()) return it->second;

  std::set<TypePair> visited{{t, s}};
  std::deque<TypePair> work{{t, s}};
  bool ok = true;
  while (ok && !work.empty()) {
    auto [a, b] = work.front();
    work.pop_front();
    if (a == b) continue;
    const TypeNode& na = table.node(a);
    const TypeNode& nb = table.node(b);
    auto push = [&](TypeId x, TypeId y) {
      if (visited.insert({x, y}).second) work.emplace_back(x, y);
    };
    if (na.index() != nb.index() || node_polarity(na) != node_polarity(nb)) {
      ok = false;
    } else if (const auto* ta = std::get_if<TagsNode>(&na)) {
      const auto& tb = std::get<TagsNode>(nb);
      if (ta->branches.size() != tb.branches.size()) {
        ok = false;
        break;
      }
      for (auto ia = ta->branches.begin(), ib = tb.branches.begin(); ia != ta->branches.end();
           ++ia, ++ib) {
        if (ia->first != ib->first) {
          ok = false;
          break;
        }
        push(ia->second, ib->second);
      }
    } else if (const auto* ca = std::get_if<ChanNode>(&na)) {
      const auto& cb = std::get<ChanNode>(nb);
      push(ca->payload, cb.payload);
      push(ca->cont, cb.cont);
    }
  }
  if (ok) {
    // Every visited pair is part of the bisimulation.
    for (const auto& p : visited) memo[p] = true;
  } else {
    memo[{t, s}] = false;
  }
  return ok;
}

/// True iff an End node is reachable from every node reachable from `t`.
inline bool is_bounded(const TypeTable& table, TypeId t) {
  std::vector<TypeId> nodes = reachable(table, t);
  std::map<TypeId, std::vector<TypeId>> preds;
  std::deque<TypeId> work;
  std::set<TypeId> good;
  for (TypeId n : nodes) {
    for (TypeId c : children(table, n)) preds[c].push_back(n);
    if (std::holds_alternative<EndNode>(table.node(n)) && good.insert(n).second)
      work.push_back(n);
  }
  while (!work.empty()) {
    TypeId n = work.front();
    work.pop_front();
    for (TypeId p : preds[n])
      if (good.insert(p).second) work.push_back(p);
  }
  return good.size() == nodes.size();
}

/// Least set containing (t, s) closed under matched descent: shared tag
/// labels, channel payloads and channel continuations.
inline std::set<TypePair> reachable_pairs(const TypeTable& table, TypeId t, TypeId s) {
  std::set<TypePair> seen{{t, s}};
  std::deque<TypePair> work{{t, s}};
  while (!work.empty()) {
    auto [a, b] = work.front();
    work.pop_front();
    auto push = [&](TypeId x, TypeId y) {
      if (seen.insert({x, y}).second) work.emplace_back(x, y);
    };
    const TypeNode& na = table.node(a);
    const TypeNode& nb = table.node(b);
    if (const auto* ta = std::get_if<TagsNode>(&na)) {
      if (const auto* tb = std::get_if<TagsNode>(&nb))
        for (const auto& [l, c] : ta->branches)
          if (auto it = tb->branches.find(l); it != tb->branches.end()) push(c, it->second);
    } else if (const auto* ca = std::get_if<ChanNode>(&na)) {
      if (const auto* cb = std::get_if<ChanNode>(&nb)) {
        push(ca->payload, cb->payload);
        push(ca->cont, cb->cont);
      }
    }
  }
  return seen;
}

// ---------------------------------------------------------------------------
// Rendering.

namespace detail {

inline std::string render_type_id(const TypeTable& table, TypeId id, bool top,
                                  std::vector<TypeId>& stack, std::set<TypeId>& backrefs) {
  if (!top)
    if (const std::string* n = table.name_of(id)) return *n;
  for (TypeId s : stack)
    if (s == id) {
      backrefs.insert(id);
      return "#" + std::to_string(id.index);
    }
  stack.push_back(id);
  std::string out = std::visit(
      overloaded{
          [](const EndNode& e) { return std::string("end") + polarity_char(e.pol); },
          [&](const TagsNode& t) {
            std::string s(1, polarity_char(t.pol));
            s += "{";
            bool first = true;
            for (const auto& [l, c] : t.branches) {
              if (!first) s += ", ";
              first = false;
              s += l + ": " + render_type_id(table, c, false, stack, backrefs);
            }
            return s + "}";
          },
          [&](const ChanNode& c) {
            std::string p = render_type_id(table, c.payload, false, stack, backrefs);
            std::string k = render_type_id(table, c.cont, false, stack, backrefs);
            return std::string(1, polarity_char(c.pol)) + "(" + p + ")." + k;
          },
      },
      table.node(id));
  stack.pop_back();
  if (backrefs.count(id)) out = "#" + std::to_string(id.index) + "=" + out;
  return out;
}

}  // namespace detail

/// Renders a type in the surface grammar. Typedef names are used for named
/// subtrees, and for the root too unless `expand_root`; unnamed cycles are
/// shown as `#n=...` with back references `#n`.
inline std::string render_type(const TypeTable& table, TypeId id, bool expand_root = true) {
  std::vector<TypeId> stack;
  std::set<TypeId> backrefs;
  return detail::render_type_id(table, id, expand_root, stack, backrefs);
}

/// One line per node: `#i = node`, children referenced by index.
inline std::string dump_table(const TypeTable& table) {
  std::string out;
  auto ref = [](TypeId c) { return "#" + std::to_string(c.index); };
  for (std::uint32_t i = 0; i < table.size(); ++i) {
    TypeId id{i};
    if (!table.defined(id)) continue;
    out += ref(id);
    if (const std::string* n = table.name_of(id)) out += " (" + *n + ")";
    out += " = ";
    out += std::visit(overloaded{
                          [](const EndNode& e) { return std::string("end") + polarity_char(e.pol); },
                          [&](const TagsNode& t) {
                            std::string s(1, polarity_char(t.pol));
                            s += "{";
                            bool first = true;
                            for (const auto& [l, c] : t.branches) {
                              s += (first ? "" : ", ") + l + ": " + ref(c);
                              first = false;
                            }
                            return s + "}";
                          },
                          [&](const ChanNode& c) {
                            return std::string(1, polarity_char(c.pol)) + "(" + ref(c.payload) +
                                   ")." + ref(c.cont);
                          },
                      },
                      table.node(id));
    out += "\n";
  }
  return out;
}

}  // namespace fairchk

#endif  // FAIRCHK_TYPES_HPP
