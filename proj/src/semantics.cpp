#include "mpst/semantics.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace mpst {

bool bufferEmpty(const Buffer& b) noexcept {
  return std::visit(Overloaded{
                        [](const buffer::None&) { return true; },
                        [](const buffer::Fifo& f) { return f.queues.empty(); },
                        [](const buffer::Bag& m) { return m.counts.empty(); },
                    },
                    b);
}

CommModel modelOf(const Buffer& b) noexcept {
  switch (b.index()) {
    case 1: return CommModel::OrderedAsync;
    case 2: return CommModel::UnorderedAsync;
    default: return CommModel::Synchronous;
  }
}

std::string print(const ActionLabel& a) {
  switch (a.kind) {
    case ActionKind::SyncComm: return a.from.name + "→" + a.to.name + ":" + a.label.name;
    case ActionKind::Send: return a.from.name + a.to.name + "!" + a.label.name;
    case ActionKind::Recv: return a.from.name + a.to.name + "?" + a.label.name;
  }
  return {};
}

ActionLabel labelOf(const Intent& i) {
  if (i.dir == Direction::Send) return {ActionKind::Send, i.self, i.peer, i.label};
  return {ActionKind::Recv, i.peer, i.self, i.label};
}

std::string_view toString(StepErrorKind k) {
  return k == StepErrorKind::NotEnabled ? "NotEnabled" : "NondeterministicLabel";
}

std::string_view toString(Termination t) {
  switch (t) {
    case Termination::NotTerminal: return "notTerminal";
    case Termination::Clean: return "clean";
    case Termination::Stuck: return "stuck";
  }
  return {};
}

std::string Configuration::key() const {
  std::string out;
  for (const auto& [p, l] : locals) {
    out += p.name;
    out += '=';
    out += canonicalKey(l);
    if (auto it = envs.find(p); it != envs.end()) {
      out += '{';
      for (const auto& [x, b] : it->second) out += x.name + ':' + canonicalKey(b) + ';';
      out += '}';
    }
    out += '|';
  }
  std::visit(Overloaded{
                 [&](const buffer::None&) { out += 'N'; },
                 [&](const buffer::Fifo& f) {
                   out += 'F';
                   for (const auto& [pq, ls] : f.queues) {
                     out += pq.first.name + ',' + pq.second.name + '[';
                     for (const auto& l : ls) out += l.name + ' ';
                     out += ']';
                   }
                 },
                 [&](const buffer::Bag& m) {
                   out += 'B';
                   for (const auto& [t, n] : m.counts)
                     out += t.sender.name + ',' + t.receiver.name + ',' + t.label.name + '#' + std::to_string(n) + ' ';
                 },
             },
             buffer);
  return out;
}

// ---------------------------------------------------------------------------
// Local intents

namespace {

// `unfolding` holds the variables entered since the last action; meeting one
// again means an unguarded loop, which offers nothing.
void collect(const Local& l, const RecEnv& env, std::set<RecVar>& unfolding, std::vector<Intent>& out) {
  std::visit(Overloaded{
                 [](const local::Skip&) {},
                 [&](const local::Action& a) {
                   for (const auto& b : a.branches) out.push_back({a.dir, a.self, a.peer, b.label, b.cont, env});
                 },
                 [&](const local::Seq& s) {
                   std::vector<Intent> first;
                   collect(s.first, env, unfolding, first);
                   for (auto& i : first) {
                     i.next = sequence(i.next, s.second);
                     out.push_back(std::move(i));
                   }
                   std::set<RecVar> bound;
                   for (const auto& [x, _] : env) bound.insert(x);
                   if (terminated(s.first, bound)) collect(s.second, env, unfolding, out);
                 },
                 [&](const local::Par& p) {
                   std::vector<Intent> left, right;
                   collect(p.left, env, unfolding, left);
                   collect(p.right, env, unfolding, right);
                   for (auto& i : left) {
                     i.next = parallel(i.next, p.right);
                     out.push_back(std::move(i));
                   }
                   for (auto& i : right) {
                     i.next = parallel(p.left, i.next);
                     out.push_back(std::move(i));
                   }
                 },
                 [&](const local::Choice& c) {
                   collect(c.left, env, unfolding, out);
                   collect(c.right, env, unfolding, out);
                 },
                 [&](const local::Rec& r) {
                   if (!unfolding.insert(r.var).second) return;
                   RecEnv inner = env;
                   inner.insert_or_assign(r.var, l);
                   collect(r.body, inner, unfolding, out);
                   unfolding.erase(r.var);
                 },
                 [&](const local::Var& v) {
                   auto it = env.find(v.var);
                   if (it == env.end()) throw std::invalid_argument("unbound recursion variable " + v.var.name);
                   if (unfolding.contains(v.var)) return;
                   collect(it->second, env, unfolding, out);
                 },
                 [&](const local::Star& s) {
                   std::vector<Intent> body;
                   collect(s.body, env, unfolding, body);
                   for (auto& i : body) {
                     i.next = sequence(i.next, l);
                     out.push_back(std::move(i));
                   }
                 },
             },
             l.node().v);
}

Local unfoldHead(const Local& l, const RecEnv& env) {
  return std::visit(Overloaded{
                        [&](const local::Var& v) {
                          auto it = env.find(v.var);
                          return it == env.end() ? l : it->second;
                        },
                        [&](const local::Seq& s) {
                          if (const auto* inner = s.first.as<local::Seq>())
                            return unfoldHead(Local::seq(inner->first, sequence(inner->second, s.second)), env);
                          return sequence(unfoldHead(s.first, env), s.second);
                        },
                        [&](const local::Par& p) { return parallel(unfoldHead(p.left, env), unfoldHead(p.right, env)); },
                        [&](const local::Choice& c) {
                          return Local::choice(unfoldHead(c.left, env), unfoldHead(c.right, env));
                        },
                        [&](const auto&) { return l; },
                    },
                    l.node().v);
}

}  // namespace

std::vector<Intent> enabledLocal(const Local& l, const RecEnv& env) {
  std::vector<Intent> out;
  std::set<RecVar> unfolding;
  collect(l, env, unfolding, out);
  return out;
}

std::pair<Local, RecEnv> canonicalise(const Local& l, const RecEnv& env) {
  Local head = unfoldHead(l, env);
  RecEnv kept;
  const auto roots = freeVars(head);
  std::vector<RecVar> pending(roots.begin(), roots.end());
  while (!pending.empty()) {
    RecVar x = pending.back();
    pending.pop_back();
    if (kept.contains(x)) continue;
    auto it = env.find(x);
    if (it == env.end()) continue;
    kept.emplace(x, it->second);
    for (const auto& y : freeVars(it->second)) pending.push_back(y);
  }
  return {head, kept};
}

// ---------------------------------------------------------------------------
// Configurations

namespace {

void place(Configuration& cfg, const Participant& p, const Local& next, const RecEnv& env) {
  auto [l, e] = canonicalise(next, env);
  cfg.locals.insert_or_assign(p, l);
  if (e.empty())
    cfg.envs.erase(p);
  else
    cfg.envs.insert_or_assign(p, std::move(e));
}

const RecEnv& envOf(const Configuration& cfg, const Participant& p) {
  static const RecEnv kEmpty;
  auto it = cfg.envs.find(p);
  return it == cfg.envs.end() ? kEmpty : it->second;
}

struct Keyed {
  std::string printed;
  std::string key;
  Successor succ;
};

std::vector<Keyed> successors(const Configuration& cfg) {
  std::map<Participant, std::vector<Intent>> intents;
  for (const auto& [p, l] : cfg.locals) intents[p] = enabledLocal(l, envOf(cfg, p));

  std::vector<Keyed> out;
  auto emit = [&](ActionLabel label, Configuration next) {
    std::string key = next.key();
    out.push_back({print(label), std::move(key), {std::move(label), std::move(next)}});
  };

  const CommModel model = modelOf(cfg.buffer);
  for (const auto& [p, mine] : intents) {
    for (const auto& i : mine) {
      if (model == CommModel::Synchronous) {
        if (i.dir != Direction::Send) continue;
        auto peer = intents.find(i.peer);
        if (peer == intents.end() || i.peer == p) continue;
        for (const auto& j : peer->second) {
          if (j.dir != Direction::Recv || j.peer != p || j.label != i.label) continue;
          Configuration next = cfg;
          place(next, p, i.next, i.env);
          place(next, i.peer, j.next, j.env);
          emit({ActionKind::SyncComm, p, i.peer, i.label}, std::move(next));
        }
        continue;
      }
      Configuration next = cfg;
      const bool sending = i.dir == Direction::Send;
      const Participant sender = sending ? p : i.peer;
      const Participant receiver = sending ? i.peer : p;
      if (auto* fifo = std::get_if<buffer::Fifo>(&next.buffer)) {
        auto qk = std::make_pair(sender, receiver);
        if (sending) {
          fifo->queues[qk].push_back(i.label);
        } else {
          auto q = fifo->queues.find(qk);
          if (q == fifo->queues.end() || q->second.front() != i.label) continue;
          q->second.erase(q->second.begin());
          if (q->second.empty()) fifo->queues.erase(q);
        }
      } else if (auto* bag = std::get_if<buffer::Bag>(&next.buffer)) {
        CommTriple t{sender, receiver, i.label};
        if (sending) {
          ++bag->counts[t];
        } else {
          auto it = bag->counts.find(t);
          if (it == bag->counts.end()) continue;
          if (--it->second == 0) bag->counts.erase(it);
        }
      }
      place(next, p, i.next, i.env);
      emit(labelOf(Intent{i.dir, p, i.peer, i.label, {}, {}}), std::move(next));
    }
  }

  std::sort(out.begin(), out.end(), [](const Keyed& a, const Keyed& b) {
    return std::tie(a.printed, a.key) < std::tie(b.printed, b.key);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Keyed& a, const Keyed& b) { return a.printed == b.printed && a.key == b.key; }),
            out.end());
  return out;
}

void requireModel(const Configuration& cfg, const SemanticsConfig& c) {
  if (modelOf(cfg.buffer) != c.commModel)
    throw std::invalid_argument("configuration buffer does not match communication model " +
                                std::string(toString(c.commModel)));
}

}  // namespace

Configuration initial(const LocalsMap& locals, const SemanticsConfig& c) {
  Configuration cfg;
  for (const auto& [p, l] : locals) place(cfg, p, l, {});
  switch (c.commModel) {
    case CommModel::Synchronous: cfg.buffer = buffer::None{}; break;
    case CommModel::OrderedAsync: cfg.buffer = buffer::Fifo{}; break;
    case CommModel::UnorderedAsync: cfg.buffer = buffer::Bag{}; break;
  }
  return cfg;
}

std::vector<Successor> enabled(const Configuration& cfg, const SemanticsConfig& c) {
  requireModel(cfg, c);
  std::vector<Successor> out;
  for (auto& k : successors(cfg)) out.push_back(std::move(k.succ));
  return out;
}

namespace {

template <class Match>
Result<Configuration, StepError> pick(const Configuration& cfg, const std::string& printed, Match match) {
  std::vector<Keyed> matching;
  for (auto& k : successors(cfg))
    if (match(k)) matching.push_back(std::move(k));
  if (matching.empty())
    return StepError{StepErrorKind::NotEnabled, printed, "action " + printed + " is not enabled"};
  if (matching.size() > 1)
    return StepError{StepErrorKind::NondeterministicLabel, printed,
                     "action " + printed + " leads to " + std::to_string(matching.size()) + " distinct configurations"};
  return std::move(matching.front().succ.next);
}

}  // namespace

Result<Configuration, StepError> step(const Configuration& cfg, const ActionLabel& label, const SemanticsConfig& c) {
  requireModel(cfg, c);
  return pick(cfg, print(label), [&](const Keyed& k) { return k.succ.label == label; });
}

Result<Configuration, StepError> step(const Configuration& cfg, std::string_view label, const SemanticsConfig& c) {
  requireModel(cfg, c);
  std::string printed(label);
  return pick(cfg, printed, [&](const Keyed& k) { return k.printed == printed; });
}

Termination isTerminal(const Configuration& cfg) {
  if (!successors(cfg).empty()) return Termination::NotTerminal;
  if (!bufferEmpty(cfg.buffer)) return Termination::Stuck;
  for (const auto& [p, l] : cfg.locals) {
    std::set<RecVar> bound;
    for (const auto& [x, _] : envOf(cfg, p)) bound.insert(x);
    if (!terminated(l, bound)) return Termination::Stuck;
  }
  return Termination::Clean;
}

// ---------------------------------------------------------------------------
// Exploration

std::vector<const LtsEdge*> Lts::outgoing(std::size_t s) const {
  std::vector<const LtsEdge*> out;
  for (const auto& e : edges)
    if (e.from == s) out.push_back(&e);
  return out;
}

Lts buildLts(const LocalsMap& locals, const SemanticsConfig& c) {
  Lts lts;
  std::unordered_map<std::string, std::size_t> index;
  const std::size_t cap = std::max<std::size_t>(1, c.explorationMaxStates);

  Configuration init = initial(locals, c);
  index.emplace(init.key(), 0);
  lts.states.push_back(std::move(init));

  for (std::size_t s = 0; s < lts.states.size(); ++s) {
    auto succ = successors(lts.states[s]);
    bool open = false;
    for (std::size_t k = 0; k < succ.size(); ++k) {
      if (k > 0 && succ[k].printed == succ[k - 1].printed)
        lts.diagnostics.push_back("NondeterministicLabel: state " + std::to_string(s) + " has several successors for " +
                                  succ[k].printed);
      auto it = index.find(succ[k].key);
      if (it == index.end()) {
        if (lts.states.size() >= cap) {
          lts.truncated = true;
          open = true;
          continue;
        }
        it = index.emplace(succ[k].key, lts.states.size()).first;
        lts.states.push_back(std::move(succ[k].succ.next));
      }
      lts.edges.push_back({s, succ[k].succ.label, it->second});
    }
    if (open) lts.openStates.push_back(s);
  }
  lts.diagnostics.erase(std::unique(lts.diagnostics.begin(), lts.diagnostics.end()), lts.diagnostics.end());
  return lts;
}

LocalFsm exploreLocal(const Participant& owner, const Local& l, std::size_t maxStates) {
  LocalFsm fsm;
  fsm.owner = owner;
  auto keyOf = [](const LocalState& st) {
    std::string k = canonicalKey(st.local);
    for (const auto& [x, b] : st.env) k += '{' + x.name + ':' + canonicalKey(b) + '}';
    return k;
  };
  std::unordered_map<std::string, std::size_t> index;
  auto [l0, e0] = canonicalise(l, {});
  fsm.states.push_back({l0, e0});
  index.emplace(keyOf(fsm.states.front()), 0);

  for (std::size_t s = 0; s < fsm.states.size(); ++s) {
    auto intents = enabledLocal(fsm.states[s].local, fsm.states[s].env);
    std::vector<std::pair<std::string, LocalEdge>> edges;
    for (const auto& i : intents) {
      auto [nl, ne] = canonicalise(i.next, i.env);
      LocalState st{nl, ne};
      std::string k = keyOf(st);
      auto it = index.find(k);
      if (it == index.end()) {
        if (fsm.states.size() >= maxStates) {
          fsm.truncated = true;
          continue;
        }
        it = index.emplace(k, fsm.states.size()).first;
        fsm.states.push_back(std::move(st));
      }
      ActionLabel label = labelOf(Intent{i.dir, owner, i.peer, i.label, {}, {}});
      edges.push_back({print(label), {s, label, it->second}});
    }
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
      return std::tie(a.first, a.second.to) < std::tie(b.first, b.second.to);
    });
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first && a.second.to == b.second.to; }),
                edges.end());
    for (auto& [_, e] : edges) fsm.edges.push_back(e);
  }
  return fsm;
}

}  // namespace mpst
