#include "mpst/equivalence.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

namespace mpst {

bool TauPolicy::isTau(const ActionLabel& a) const {
  return std::any_of(predicates.begin(), predicates.end(), [&](const auto& p) { return p(a); });
}

TauPolicy TauPolicy::hiding(std::set<std::string> printed) {
  TauPolicy t;
  t.predicates.push_back([hidden = std::move(printed)](const ActionLabel& a) { return hidden.contains(print(a)); });
  return t;
}

std::string_view toString(BisimResult r) {
  switch (r) {
    case BisimResult::Bisimilar: return "bisimilar";
    case BisimResult::NotBisimilar: return "notBisimilar";
    case BisimResult::InconclusiveDepthBound: return "inconclusiveDepthBound";
  }
  return {};
}

std::string_view toString(Side s) { return s == Side::A ? "A" : "B"; }

namespace {

constexpr int kTau = -1;

struct Move {
  int label;
  std::size_t to;
};

// Disjoint union of both LTSs; states of b are offset by `na`. Label ids
// follow the lexicographic order of printed labels.
struct Graph {
  std::size_t na = 0;
  std::size_t n = 0;
  std::vector<std::string> names;
  std::vector<std::vector<Move>> out;
  std::vector<bool> open;

  Graph(const Lts& a, const Lts& b, const TauPolicy& tau) {
    na = a.states.size();
    n = na + b.states.size();
    std::set<std::string> all;
    for (const Lts* l : {&a, &b})
      for (const auto& e : l->edges)
        if (!tau.isTau(e.label)) all.insert(print(e.label));
    names.assign(all.begin(), all.end());
    out.resize(n);
    open.assign(n, false);
    auto add = [&](const Lts& l, std::size_t offset) {
      for (const auto& e : l.edges) {
        int id = kTau;
        if (!tau.isTau(e.label))
          id = static_cast<int>(std::lower_bound(names.begin(), names.end(), print(e.label)) - names.begin());
        out[e.from + offset].push_back({id, e.to + offset});
      }
      for (auto s : l.openStates) open[s + offset] = true;
    };
    add(a, 0);
    add(b, na);
    for (auto& moves : out) {
      std::sort(moves.begin(), moves.end(),
                [](const Move& x, const Move& y) { return std::tie(x.label, x.to) < std::tie(y.label, y.to); });
      moves.erase(std::unique(moves.begin(), moves.end(),
                              [](const Move& x, const Move& y) { return x.label == y.label && x.to == y.to; }),
                  moves.end());
    }
  }

  std::size_t root(Side s) const { return s == Side::A ? 0 : na; }
  std::string name(int id) const { return id == kTau ? "τ" : names[static_cast<std::size_t>(id)]; }
  int idOf(const std::string& printed) const {
    auto it = std::lower_bound(names.begin(), names.end(), printed);
    return it != names.end() && *it == printed ? static_cast<int>(it - names.begin()) : -2;
  }
};

// ---------------------------------------------------------------------------
// Branching bisimulation by signature refinement

using Signature = std::vector<std::pair<int, std::size_t>>;

struct Partition {
  std::vector<std::size_t> block;
  std::size_t rounds = 0;
};

Partition refine(const Graph& g) {
  Partition p;
  p.block.assign(g.n, 0);
  std::size_t count = 1;
  while (true) {
    std::vector<Signature> sig(g.n);
    for (std::size_t s = 0; s < g.n; ++s)
      for (const auto& m : g.out[s])
        if (!(m.label == kTau && p.block[m.to] == p.block[s])) sig[s].push_back({m.label, p.block[m.to]});
    // Inert τ-steps inherit the signatures of their targets.
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t s = 0; s < g.n; ++s)
        for (const auto& m : g.out[s]) {
          if (m.label != kTau || p.block[m.to] != p.block[s]) continue;
          for (const auto& entry : sig[m.to])
            if (std::find(sig[s].begin(), sig[s].end(), entry) == sig[s].end()) {
              sig[s].push_back(entry);
              changed = true;
            }
        }
    }
    std::map<std::pair<std::size_t, Signature>, std::size_t> ids;
    std::vector<std::size_t> next(g.n);
    for (std::size_t s = 0; s < g.n; ++s) {
      std::sort(sig[s].begin(), sig[s].end());
      sig[s].erase(std::unique(sig[s].begin(), sig[s].end()), sig[s].end());
      next[s] = ids.try_emplace({p.block[s], std::move(sig[s])}, ids.size()).first->second;
    }
    ++p.rounds;
    p.block = std::move(next);
    if (ids.size() == count) break;
    count = ids.size();
  }
  return p;
}

std::vector<std::pair<std::size_t, std::size_t>> witnessRelation(const Graph& g, const Partition& p) {
  std::set<std::pair<std::size_t, std::size_t>> seen{{0, g.na}};
  std::deque<std::pair<std::size_t, std::size_t>> work{{0, g.na}};
  auto visit = [&](std::size_t s, std::size_t t) {
    if (p.block[s] == p.block[t] && seen.insert({s, t}).second) work.push_back({s, t});
  };
  while (!work.empty()) {
    auto [s, t] = work.front();
    work.pop_front();
    for (const auto& ms : g.out[s]) {
      if (ms.label == kTau) visit(ms.to, t);
      for (const auto& mt : g.out[t])
        if (mt.label == ms.label) visit(ms.to, mt.to);
    }
    for (const auto& mt : g.out[t])
      if (mt.label == kTau) visit(s, mt.to);
  }
  std::vector<std::pair<std::size_t, std::size_t>> rel;
  for (auto [s, t] : seen) rel.push_back({s, t - g.na});
  return rel;
}

// ---------------------------------------------------------------------------
// Trace evidence over state sets

struct StateSet {
  std::vector<std::size_t> states;
  bool wild = false;  // contains an unexpanded state, so nothing can be refused

  friend auto operator<=>(const StateSet&, const StateSet&) = default;
  friend bool operator==(const StateSet&, const StateSet&) = default;
};

StateSet closure(const Graph& g, std::vector<std::size_t> seed) {
  std::set<std::size_t> all(seed.begin(), seed.end());
  while (!seed.empty()) {
    auto s = seed.back();
    seed.pop_back();
    for (const auto& m : g.out[s])
      if (m.label == kTau && all.insert(m.to).second) seed.push_back(m.to);
  }
  StateSet out{{all.begin(), all.end()}, false};
  for (auto s : out.states) out.wild = out.wild || g.open[s];
  return out;
}

StateSet after(const Graph& g, const StateSet& from, int label) {
  std::vector<std::size_t> next;
  for (auto s : from.states)
    for (const auto& m : g.out[s])
      if (m.label == label) next.push_back(m.to);
  return closure(g, std::move(next));
}

std::set<int> visibleLabels(const Graph& g, const StateSet& a, const StateSet& b) {
  std::set<int> out;
  for (const auto* set : {&a, &b})
    for (auto s : set->states)
      for (const auto& m : g.out[s])
        if (m.label != kTau) out.insert(m.label);
  return out;
}

bool refuses(const StateSet& before, const StateSet& now) { return now.states.empty() && !before.wild; }

std::optional<Evidence> traceEvidence(const Graph& g, std::size_t limit = 200000) {
  struct Node {
    StateSet a, b;
    std::vector<int> path;
  };
  std::set<std::pair<StateSet, StateSet>> seen;
  std::deque<Node> work;
  Node start{closure(g, {0}), closure(g, {g.na}), {}};
  seen.insert({start.a, start.b});
  work.push_back(std::move(start));
  while (!work.empty() && seen.size() < limit) {
    Node node = std::move(work.front());
    work.pop_front();
    for (int l : visibleLabels(g, node.a, node.b)) {
      StateSet na = after(g, node.a, l);
      StateSet nb = after(g, node.b, l);
      const bool ra = refuses(node.a, na);
      const bool rb = refuses(node.b, nb);
      if (ra != rb) {
        Evidence e{"trace", {}, ra ? Side::A : Side::B, {}};
        for (int x : node.path) e.path.push_back(g.name(x));
        e.path.push_back(g.name(l));
        return e;
      }
      if (na.states.empty() || nb.states.empty()) continue;
      if (!seen.insert({na, nb}).second) continue;
      auto path = node.path;
      path.push_back(l);
      work.push_back({std::move(na), std::move(nb), std::move(path)});
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Strong-matching product game (truncated LTSs, and evidence for the exact case)

struct Game {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<bool> optimistic;
  std::vector<std::size_t> removedAt;  // 0 = still in the relation
  std::size_t layers = 0;
  std::size_t iterations = 0;
};

constexpr std::size_t kKept = 0;

Game playGame(const Graph& g, std::size_t depth) {
  Game game;
  std::vector<std::size_t> layer;
  auto intern = [&](std::size_t s, std::size_t t, std::size_t d) {
    auto [it, fresh] = game.index.try_emplace({s, t}, game.pairs.size());
    if (fresh) {
      game.pairs.push_back({s, t});
      layer.push_back(d);
    }
    return it->second;
  };
  intern(0, g.na, 0);
  for (std::size_t i = 0; i < game.pairs.size(); ++i) {
    if (layer[i] >= depth) continue;
    auto [s, t] = game.pairs[i];
    for (const auto& ms : g.out[s])
      for (const auto& mt : g.out[t])
        if (ms.label == mt.label) intern(ms.to, mt.to, layer[i] + 1);
  }
  for (auto d : layer) game.layers = std::max(game.layers, d);
  game.optimistic.resize(game.pairs.size());
  for (std::size_t i = 0; i < game.pairs.size(); ++i) {
    auto [s, t] = game.pairs[i];
    game.optimistic[i] = layer[i] >= depth || g.open[s] || g.open[t];
  }
  game.removedAt.assign(game.pairs.size(), kKept);

  auto matched = [&](std::size_t s, std::size_t t, bool attackerLeft) {
    const auto& atk = g.out[attackerLeft ? s : t];
    const auto& def = g.out[attackerLeft ? t : s];
    for (const auto& ma : atk) {
      bool ok = false;
      for (const auto& md : def) {
        if (md.label != ma.label) continue;
        auto key = attackerLeft ? std::make_pair(ma.to, md.to) : std::make_pair(md.to, ma.to);
        auto it = game.index.find(key);
        if (it != game.index.end() && game.removedAt[it->second] == kKept) {
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
    return true;
  };
  for (bool changed = true; changed;) {
    changed = false;
    ++game.iterations;
    std::vector<std::size_t> drop;
    for (std::size_t i = 0; i < game.pairs.size(); ++i) {
      if (game.removedAt[i] != kKept || game.optimistic[i]) continue;
      auto [s, t] = game.pairs[i];
      if (!matched(s, t, true) || !matched(s, t, false)) drop.push_back(i);
    }
    for (auto i : drop) game.removedAt[i] = game.iterations;
    changed = !drop.empty();
  }
  return game;
}

// Follows the attacker's winning moves from the root pair down to a move the
// defender cannot answer at all.
Evidence gameEvidence(const Graph& g, const Game& game) {
  Evidence e{"branching", {}, Side::B, {}};
  std::size_t cur = 0;
  for (std::size_t guard = 0; guard < game.pairs.size() + 1; ++guard) {
    const std::size_t round = game.removedAt[cur];
    if (round == kKept) break;
    auto [s, t] = game.pairs[cur];
    bool advanced = false;
    for (bool left : {true, false}) {
      for (const auto& ma : g.out[left ? s : t]) {
        std::optional<std::size_t> reply;
        bool answerable = false;
        for (const auto& md : g.out[left ? t : s]) {
          if (md.label != ma.label) continue;
          auto key = left ? std::make_pair(ma.to, md.to) : std::make_pair(md.to, ma.to);
          auto it = game.index.find(key);
          if (it == game.index.end()) continue;
          std::size_t r = game.removedAt[it->second];
          if (r == kKept || r >= round) {
            answerable = true;
            break;
          }
          if (!reply) reply = it->second;
        }
        if (answerable) continue;
        e.path.push_back(g.name(ma.label));
        e.attackers.push_back(left ? Side::A : Side::B);
        e.refusingSide = left ? Side::B : Side::A;
        advanced = true;
        if (!reply) return e;
        cur = *reply;
        break;
      }
      if (advanced) break;
    }
    if (!advanced) break;
  }
  return e;
}

bool alphabetsDiffer(const Lts& a, const Lts& b) {
  auto shape = [](const Lts& l) {
    int mask = 0;
    for (const auto& e : l.edges) mask |= e.label.kind == ActionKind::SyncComm ? 1 : 2;
    return mask;
  };
  int sa = shape(a), sb = shape(b);
  return sa != 0 && sb != 0 && sa != sb;
}

}  // namespace

BisimVerdict branchingBisim(const Lts& a, const Lts& b, std::size_t depth, const TauPolicy& tau) {
  depth = std::max<std::size_t>(1, depth);
  Graph g(a, b, tau);
  BisimVerdict v;
  if (alphabetsDiffer(a, b)) v.notes.push_back("label alphabets differ");

  if (!a.truncated && !b.truncated) {
    Partition p = refine(g);
    v.depthUsed = p.rounds;
    if (p.block[0] == p.block[g.na]) {
      v.result = BisimResult::Bisimilar;
      v.relation = witnessRelation(g, p);
      return v;
    }
    v.result = BisimResult::NotBisimilar;
    if (auto e = traceEvidence(g)) {
      v.evidence = std::move(e);
    } else if (tau.empty()) {
      v.evidence = gameEvidence(g, playGame(g, g.n * g.n + 1));
    } else {
      v.evidence = Evidence{"branching", {}, Side::B, {}};
      v.notes.push_back("the initial states are separated by partition refinement");
    }
    verifyEvidence(a, b, *v.evidence, tau);
    return v;
  }

  v.notes.push_back("state space truncated at the exploration limit");
  if (!tau.empty()) {
    v.result = BisimResult::InconclusiveDepthBound;
    v.notes.push_back("the bounded game does not support internal actions");
    return v;
  }
  Game game = playGame(g, depth);
  v.depthUsed = game.layers;
  if (game.removedAt[0] == kKept) {
    v.result = BisimResult::InconclusiveDepthBound;
    return v;
  }
  v.result = BisimResult::NotBisimilar;
  auto e = traceEvidence(g);
  v.evidence = e ? *e : gameEvidence(g, game);
  verifyEvidence(a, b, *v.evidence, tau);
  return v;
}

void verifyEvidence(const Lts& a, const Lts& b, const Evidence& e, const TauPolicy& tau) {
  Graph g(a, b, tau);
  auto fail = [](const std::string& why) { throw std::logic_error("bisimulation evidence rejected: " + why); };
  StateSet sa = closure(g, {0});
  StateSet sb = closure(g, {g.na});
  if (e.kind == "trace") {
    if (e.path.empty()) fail("empty trace");
    for (std::size_t i = 0; i < e.path.size(); ++i) {
      int l = g.idOf(e.path[i]);
      if (l == -2) fail("unknown label " + e.path[i]);
      StateSet na = after(g, sa, l), nb = after(g, sb, l);
      const bool last = i + 1 == e.path.size();
      const bool ra = refuses(sa, na), rb = refuses(sb, nb);
      if (!last && (na.states.empty() || nb.states.empty())) fail("prefix not shared");
      if (last && !((e.refusingSide == Side::A && ra && !nb.states.empty()) ||
                    (e.refusingSide == Side::B && rb && !na.states.empty())))
        fail("last label is not refused by exactly the claimed side");
      sa = std::move(na);
      sb = std::move(nb);
    }
    return;
  }
  if (e.kind != "branching") fail("unknown kind " + e.kind);
  if (e.path.size() != e.attackers.size()) fail("attacker sides do not match the path");
  for (std::size_t i = 0; i < e.path.size(); ++i) {
    int l = g.idOf(e.path[i]);
    StateSet& atk = e.attackers[i] == Side::A ? sa : sb;
    if (l == -2 || after(g, atk, l).states.empty()) fail("attacker cannot play " + e.path[i]);
    sa = after(g, sa, l);
    sb = after(g, sb, l);
  }
  if (!a.truncated && !b.truncated) {
    Partition p = refine(g);
    if (p.block[0] == p.block[g.na]) fail("initial states are bisimilar");
  }
}

// ---------------------------------------------------------------------------
// Kanellakis-Smolka splitting, used as an independent cross-check

bool strongBisimilar(const Lts& a, const Lts& b) {
  Graph g(a, b, TauPolicy{});
  std::vector<std::vector<std::size_t>> blocks(1);
  for (std::size_t s = 0; s < g.n; ++s) blocks[0].push_back(s);
  std::vector<std::size_t> owner(g.n, 0);
  const int labels = static_cast<int>(g.names.size());

  for (bool split = true; split;) {
    split = false;
    for (std::size_t bi = 0; bi < blocks.size() && !split; ++bi) {
      for (int l = 0; l < labels && !split; ++l) {
        for (std::size_t ci = 0; ci < blocks.size() && !split; ++ci) {
          std::vector<std::size_t> in, out;
          for (auto s : blocks[bi]) {
            bool hits = std::any_of(g.out[s].begin(), g.out[s].end(),
                                    [&](const Move& m) { return m.label == l && owner[m.to] == ci; });
            (hits ? in : out).push_back(s);
          }
          if (in.empty() || out.empty()) continue;
          blocks[bi] = std::move(in);
          blocks.push_back(std::move(out));
          for (auto s : blocks.back()) owner[s] = blocks.size() - 1;
          split = true;
        }
      }
    }
  }
  return owner[0] == owner[g.na];
}

// ---------------------------------------------------------------------------
// Bounded trace comparison

std::vector<TraceDifference> traceDiff(const Lts& a, const Lts& b, std::size_t maxLen) {
  Graph g(a, b, TauPolicy{});
  std::vector<TraceDifference> out;
  std::vector<std::string> trace;

  // Both sides still accept `trace` here.
  auto walk = [&](auto&& self, const StateSet& sa, const StateSet& sb) -> void {
    if (trace.size() >= maxLen || out.size() >= kTraceDiffCap) return;
    for (int l : visibleLabels(g, sa, sb)) {
      if (out.size() >= kTraceDiffCap) return;
      StateSet na = after(g, sa, l), nb = after(g, sb, l);
      trace.push_back(g.name(l));
      if (!na.states.empty() && !nb.states.empty()) {
        self(self, na, nb);
      } else {
        const Side side = na.states.empty() ? Side::B : Side::A;
        auto lone = [&](auto&& again, const StateSet& s) -> void {
          if (out.size() >= kTraceDiffCap) return;
          out.push_back({trace, side});
          if (trace.size() >= maxLen) return;
          StateSet none;
          for (int x : visibleLabels(g, s, none)) {
            trace.push_back(g.name(x));
            again(again, after(g, s, x));
            trace.pop_back();
          }
        };
        lone(lone, side == Side::A ? na : nb);
      }
      trace.pop_back();
    }
  };
  walk(walk, closure(g, {0}), closure(g, {g.na}));
  return out;
}

}  // namespace mpst
