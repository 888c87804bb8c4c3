// Copyright 2026 The fairchk Authors
// SPDX-License-Identifier: Apache-2.0

// Unfair subtyping, subtyping weights and fair subtyping.

#ifndef FAIRCHK_SUBTYPING_HPP
#define FAIRCHK_SUBTYPING_HPP

#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairchk/types.hpp"
#include "fairchk/weight.hpp"

namespace fairchk {

/// The pairs visited while checking s <= t by rule descent, in BFS order.
/// When `holds`, `pairs` is a simulation containing (s, t).
struct Simulation {
  bool holds = true;
  std::vector<TypePair> pairs;
  std::map<TypePair, std::size_t> index;
  std::vector<std::vector<std::size_t>> succ;  // premises of each pair's rule
  std::optional<TypePair> failed;
  std::string reason;
};

namespace detail {

/// Checks the local side conditions of the rule matching (a, b). On
/// success fills the premises; otherwise returns the reason.
inline std::optional<std::string> simulation_step(TypeTable& table, TypeId a, TypeId b,
                                                  std::vector<TypePair>& premises) {
  const TypeNode& na = table.node(a);
  const TypeNode& nb = table.node(b);
  if (na.index() != nb.index()) return "constructor mismatch";
  if (node_polarity(na) != node_polarity(nb)) return "polarity mismatch";
  if (std::holds_alternative<EndNode>(na)) return std::nullopt;
  if (const auto* ca = std::get_if<ChanNode>(&na)) {
    const auto& cb = std::get<ChanNode>(nb);
    if (!equiv(table, ca->payload, cb.payload)) return "channel payload types differ";
    premises.emplace_back(ca->cont, cb.cont);
    return std::nullopt;
  }
  const auto& ta = std::get<TagsNode>(na);
  const auto& tb = std::get<TagsNode>(nb);
  // Inputs: the subtype may accept fewer labels. Outputs: the supertype may
  // send fewer labels.
  const auto& small = ta.pol == Polarity::In ? ta.branches : tb.branches;
  const auto& large = ta.pol == Polarity::In ? tb.branches : ta.branches;
  for (const auto& [l, _] : small)
    if (!large.count(l)) return "label '" + l + "' not offered";
  for (const auto& [l, _] : small) premises.emplace_back(ta.branches.at(l), tb.branches.at(l));
  return std::nullopt;
}

}  // namespace detail

/// Unfair subtyping. The rules are syntax directed, so (s, t) is related iff
/// every pair reachable from it by rule descent satisfies its local check.
inline Simulation unfair_simulation(TypeTable& table, TypeId s, TypeId t) {
  Simulation sim;
  auto add = [&](TypePair p) {
    auto [it, fresh] = sim.index.emplace(p, sim.pairs.size());
    if (fresh) {
      sim.pairs.push_back(p);
      sim.succ.emplace_back();
    }
    return it->second;
  };
  add({s, t});
  for (std::size_t i = 0; i < sim.pairs.size(); ++i) {
    std::vector<TypePair> premises;
    auto [a, b] = sim.pairs[i];
    if (auto err = detail::simulation_step(table, a, b, premises)) {
      sim.holds = false;
      sim.failed = sim.pairs[i];
      sim.reason = *err;
      return sim;
    }
    std::vector<std::size_t> succ;
    for (const auto& p : premises) succ.push_back(add(p));
    sim.succ[i] = std::move(succ);
  }
  return sim;
}

inline bool unfair_subtype(TypeTable& table, TypeId s, TypeId t) {
  return unfair_simulation(table, s, t).holds;
}

/// Least solution of the weight equations over a simulation, one entry per
/// pair. Values above the number of pairs are infinite.
inline std::vector<Weight> subtype_weights(const TypeTable& table, const Simulation& sim) {
  if (!sim.holds) throw std::logic_error("subtype weights need a simulation");
  const std::size_t k = sim.pairs.size();
  enum class Kind { Zero, Max, Strict, Equal, Same };
  std::vector<Kind> kind(k);
  for (std::size_t i = 0; i < k; ++i) {
    const TypeNode& na = table.node(sim.pairs[i].first);
    const TypeNode& nb = table.node(sim.pairs[i].second);
    if (std::holds_alternative<EndNode>(na)) {
      kind[i] = Kind::Zero;
    } else if (std::holds_alternative<ChanNode>(na)) {
      kind[i] = Kind::Same;
    } else {
      const auto& ta = std::get<TagsNode>(na);
      const auto& tb = std::get<TagsNode>(nb);
      if (ta.pol == Polarity::In)
        kind[i] = Kind::Max;
      else
        kind[i] = ta.branches.size() == tb.branches.size() ? Kind::Equal : Kind::Strict;
    }
  }
  const Weight one(1);
  const Weight cutoff(k);
  std::vector<Weight> rk(k, Weight(0));
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (kind[i] == Kind::Zero) continue;
      Weight lo = Weight::infinity(), hi(0);
      for (std::size_t j : sim.succ[i]) {
        lo = wmin(lo, rk[j]);
        hi = wmax(hi, rk[j]);
      }
      Weight v;
      switch (kind[i]) {
        case Kind::Max: v = hi; break;
        case Kind::Strict: v = one + lo; break;
        case Kind::Equal: v = wmin(one + lo, hi); break;
        case Kind::Same: v = lo; break;
        case Kind::Zero: break;
      }
      if (v > cutoff) v = Weight::infinity();
      if (v != rk[i]) {
        rk[i] = v;
        changed = true;
      }
    }
  }
  return rk;
}

/// rk(s, t). Requires that s is an unfair subtype of t.
inline Weight subtype_weight(TypeTable& table, TypeId s, TypeId t) {
  Simulation sim = unfair_simulation(table, s, t);
  if (!sim.holds) throw std::logic_error("subtype_weight: types are not related");
  return subtype_weights(table, sim)[0];
}

struct SubtypeVerdict {
  enum class Failure { None, NotSimulated, Diverges };

  bool holds = false;
  Weight weight = Weight::infinity();
  Failure failure = Failure::None;
  std::optional<TypePair> offending;
  std::string reason;
  std::size_t simulation_size = 0;
};

inline SubtypeVerdict fair_subtype(TypeTable& table, TypeId s, TypeId t) {
  SubtypeVerdict v;
  Simulation sim = unfair_simulation(table, s, t);
  v.simulation_size = sim.pairs.size();
  if (!sim.holds) {
    v.failure = SubtypeVerdict::Failure::NotSimulated;
    v.offending = sim.failed;
    v.reason = sim.reason;
    return v;
  }
  std::vector<Weight> rk = subtype_weights(table, sim);
  for (std::size_t i = 0; i < rk.size(); ++i)
    if (rk[i].is_infinite()) {
      v.failure = SubtypeVerdict::Failure::Diverges;
      v.offending = sim.pairs[i];
      v.reason = "infinite weight";
      return v;
    }
  v.holds = true;
  v.weight = rk[0];
  return v;
}

inline bool diverges(TypeTable& table, TypeId s, TypeId t) {
  Simulation sim = unfair_simulation(table, s, t);
  return sim.holds && subtype_weights(table, sim)[0].is_infinite();
}

inline std::string describe(const TypeTable& table, const SubtypeVerdict& v) {
  if (v.holds) return "holds, weight " + v.weight.str();
  std::string pair = v.offending ? "(" + render_type(table, v.offending->first, false) + ", " +
                                       render_type(table, v.offending->second, false) + ")"
                                 : "?";
  if (v.failure == SubtypeVerdict::Failure::Diverges) return "fails: divergence at " + pair;
  return "fails: not simulated at " + pair + ": " + v.reason;
}

}  // namespace fairchk

#endif  // FAIRCHK_SUBTYPING_HPP
