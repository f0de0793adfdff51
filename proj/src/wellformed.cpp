#include "mpst/wellformed.hpp"

#include <algorithm>
#include <map>

#include "mpst/parser.hpp"

namespace mpst {

std::string_view toString(ViolationKind k) {
  switch (k) {
    case ViolationKind::SelfCommunication: return "SelfCommunication";
    case ViolationKind::DuplicateLabels: return "DuplicateLabels";
    case ViolationKind::UnguardedRecursion: return "UnguardedRecursion";
    case ViolationKind::UnboundVariable: return "UnboundVariable";
    case ViolationKind::ParallelForbidden: return "ParallelForbidden";
    case ViolationKind::FixedPointForbidden: return "FixedPointForbidden";
    case ViolationKind::KleeneStarForbidden: return "KleeneStarForbidden";
    case ViolationKind::NotWellChannelled: return "NotWellChannelled";
    case ViolationKind::NotWellBranched: return "NotWellBranched";
  }
  return "";
}

bool CheckReport::has(ViolationKind k) const noexcept {
  return std::any_of(violations.begin(), violations.end(), [k](const Violation& v) { return v.kind == k; });
}

namespace {

void normalise(CheckReport& r) {
  std::stable_sort(r.violations.begin(), r.violations.end(), [](const Violation& a, const Violation& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.location < b.location;
  });
  r.violations.erase(std::unique(r.violations.begin(), r.violations.end()), r.violations.end());
}

std::string listNames(const std::vector<Participant>& ps) {
  std::string out = "[";
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) out += ", ";
    out += ps[i].name;
  }
  return out + "]";
}

std::vector<Participant> sortedVector(const std::set<Participant>& s) { return {s.begin(), s.end()}; }

std::string triple(const CommTriple& t) {
  return "(" + t.sender.name + "," + t.receiver.name + "," + t.label.name + ")";
}

// True iff every way of completing `g` performs at least one communication.
bool mustAct(const Global& g) {
  return std::visit(Overloaded{
                        [](const global::Skip&) { return false; },
                        [](const global::Comm&) { return true; },
                        [](const global::Seq& s) { return mustAct(s.first) || mustAct(s.second); },
                        [](const global::Par& p) { return mustAct(p.left) || mustAct(p.right); },
                        [](const global::Choice& c) { return mustAct(c.left) && mustAct(c.right); },
                        [](const global::Rec& r) { return mustAct(r.body); },
                        [](const global::Var&) { return true; },
                        [](const global::Star&) { return false; },
                    },
                    g.node().v);
}

struct CoreChecker {
  CheckReport report;
  // For every recursion variable in scope: its binder, and whether an action
  // has already occurred on the current path since that binder.
  struct Scope {
    Global binder;
    bool guarded;
  };
  std::map<RecVar, Scope> scope;
  std::set<std::string> flaggedBinders;

  void add(ViolationKind k, std::vector<Participant> subjects, const Global& at, std::string message) {
    report.violations.push_back(Violation{k, std::move(subjects), printGlobal(at), std::move(message)});
  }

  void guardAll(std::map<RecVar, Scope>& s) {
    for (auto& [_, v] : s) v.guarded = true;
  }

  void visit(const Global& g) {
    std::visit(Overloaded{
                   [](const global::Skip&) {},
                   [&](const global::Comm& c) {
                     if (c.sender == c.receiver)
                       add(ViolationKind::SelfCommunication, {c.sender}, g,
                           "self-communication of " + c.sender.name + " in [" + printGlobal(g) + "]");
                     std::set<Label> seen;
                     std::set<Label> dups;
                     for (const auto& b : c.branches)
                       if (!seen.insert(b.label).second) dups.insert(b.label);
                     if (!dups.empty()) {
                       std::string names;
                       for (const auto& d : dups) names += (names.empty() ? "" : ", ") + d.name;
                       std::vector<Participant> subj{c.sender};
                       if (c.receiver != c.sender) subj.push_back(c.receiver);
                       std::sort(subj.begin(), subj.end());
                       add(ViolationKind::DuplicateLabels, subj, g,
                           "labels [" + names + "] are not pairwise distinct in [" + printGlobal(g) + "]");
                     }
                     auto saved = scope;
                     guardAll(scope);
                     for (const auto& b : c.branches) visit(b.cont);
                     scope = std::move(saved);
                   },
                   [&](const global::Seq& s) {
                     visit(s.first);
                     if (mustAct(s.first)) {
                       auto saved = scope;
                       guardAll(scope);
                       visit(s.second);
                       scope = std::move(saved);
                     } else {
                       visit(s.second);
                     }
                   },
                   [&](const global::Par& p) {
                     visit(p.left);
                     visit(p.right);
                   },
                   [&](const global::Choice& c) {
                     visit(c.left);
                     visit(c.right);
                   },
                   [&](const global::Rec& r) {
                     auto saved = scope;
                     scope.insert_or_assign(r.var, Scope{g, false});
                     visit(r.body);
                     scope = std::move(saved);
                   },
                   [&](const global::Var& v) {
                     auto it = scope.find(v.var);
                     if (it == scope.end()) {
                       add(ViolationKind::UnboundVariable, {}, g, "unbound recursion variable " + v.var.name);
                       return;
                     }
                     if (!it->second.guarded) {
                       auto where = printGlobal(it->second.binder);
                       if (flaggedBinders.insert(where).second)
                         add(ViolationKind::UnguardedRecursion, {}, it->second.binder,
                             "recursion variable " + v.var.name + " is reachable without a communication in [" +
                                 where + "]");
                     }
                   },
                   [&](const global::Star& s) {
                     if (comm(s.body).empty())
                       add(ViolationKind::UnguardedRecursion, {}, g,
                           "Kleene star body performs no communication in [" + printGlobal(g) + "]");
                     visit(s.body);
                   },
               },
               g.node().v);
  }
};

std::string gatingMessage(ViolationKind k, const std::vector<Participant>& subjects) {
  std::string what;
  switch (k) {
    case ViolationKind::ParallelForbidden: what = "Parallel Composition"; break;
    case ViolationKind::FixedPointForbidden: what = "Recursion Fixed Point"; break;
    case ViolationKind::KleeneStarForbidden: what = "Recursion Kleene Star"; break;
    default: break;
  }
  return what + " - present on participant " + listNames(subjects);
}

struct GlobalGate {
  const SemanticsConfig& config;
  CheckReport& out;
  std::set<RecVar> bound;

  void flag(ViolationKind k, const Global& at) {
    auto subjects = sortedVector(participants(at));
    out.violations.push_back(Violation{k, subjects, printGlobal(at), gatingMessage(k, subjects)});
  }

  void visit(const Global& g) {
    std::visit(Overloaded{
                   [](const global::Skip&) {},
                   [&](const global::Comm& c) {
                     for (const auto& b : c.branches) visit(b.cont);
                   },
                   [&](const global::Seq& s) {
                     visit(s.first);
                     visit(s.second);
                   },
                   [&](const global::Par& p) {
                     if (!config.allowParallel) flag(ViolationKind::ParallelForbidden, g);
                     visit(p.left);
                     visit(p.right);
                   },
                   [&](const global::Choice& c) {
                     visit(c.left);
                     visit(c.right);
                   },
                   [&](const global::Rec& r) {
                     if (!config.allowFixedPoint) flag(ViolationKind::FixedPointForbidden, g);
                     bool fresh = bound.insert(r.var).second;
                     visit(r.body);
                     if (fresh) bound.erase(r.var);
                   },
                   [&](const global::Var& v) {
                     if (!config.allowFixedPoint && !bound.contains(v.var)) flag(ViolationKind::FixedPointForbidden, g);
                   },
                   [&](const global::Star& s) {
                     if (!config.allowKleeneStar) flag(ViolationKind::KleeneStarForbidden, g);
                     visit(s.body);
                   },
               },
               g.node().v);
  }
};

struct LocalGate {
  const SemanticsConfig& config;
  CheckReport& out;
  std::vector<Participant> subjects;
  std::set<RecVar> bound;

  void flag(ViolationKind k, const Local& at) {
    out.violations.push_back(Violation{k, subjects, printLocal(at), gatingMessage(k, subjects)});
  }

  void visit(const Local& l) {
    std::visit(Overloaded{
                   [](const local::Skip&) {},
                   [&](const local::Action& a) {
                     for (const auto& b : a.branches) visit(b.cont);
                   },
                   [&](const local::Seq& s) {
                     visit(s.first);
                     visit(s.second);
                   },
                   [&](const local::Par& p) {
                     if (!config.allowParallel) flag(ViolationKind::ParallelForbidden, l);
                     visit(p.left);
                     visit(p.right);
                   },
                   [&](const local::Choice& c) {
                     visit(c.left);
                     visit(c.right);
                   },
                   [&](const local::Rec& r) {
                     if (!config.allowFixedPoint) flag(ViolationKind::FixedPointForbidden, l);
                     bool fresh = bound.insert(r.var).second;
                     visit(r.body);
                     if (fresh) bound.erase(r.var);
                   },
                   [&](const local::Var& v) {
                     if (!config.allowFixedPoint && !bound.contains(v.var)) flag(ViolationKind::FixedPointForbidden, l);
                   },
                   [&](const local::Star& s) {
                     if (!config.allowKleeneStar) flag(ViolationKind::KleeneStarForbidden, l);
                     visit(s.body);
                   },
               },
               l.node().v);
  }
};

std::optional<Participant> subjectOf(const Local& l) {
  return std::visit(Overloaded{
                        [](const local::Skip&) -> std::optional<Participant> { return std::nullopt; },
                        [](const local::Action& a) -> std::optional<Participant> { return a.self; },
                        [](const local::Seq& s) { auto x = subjectOf(s.first); return x ? x : subjectOf(s.second); },
                        [](const local::Par& s) { auto x = subjectOf(s.left); return x ? x : subjectOf(s.right); },
                        [](const local::Choice& s) { auto x = subjectOf(s.left); return x ? x : subjectOf(s.right); },
                        [](const local::Rec& r) { return subjectOf(r.body); },
                        [](const local::Var&) -> std::optional<Participant> { return std::nullopt; },
                        [](const local::Star& s) { return subjectOf(s.body); },
                    },
                    l.node().v);
}

void collectPars(const Global& g, std::vector<const Global*>& pars, std::vector<const Global*>& choices) {
  std::visit(Overloaded{
                 [](const global::Skip&) {},
                 [&](const global::Comm& c) {
                   for (const auto& b : c.branches) collectPars(b.cont, pars, choices);
                 },
                 [&](const global::Seq& s) {
                   collectPars(s.first, pars, choices);
                   collectPars(s.second, pars, choices);
                 },
                 [&](const global::Par& p) {
                   pars.push_back(&g);
                   collectPars(p.left, pars, choices);
                   collectPars(p.right, pars, choices);
                 },
                 [&](const global::Choice& c) {
                   choices.push_back(&g);
                   collectPars(c.left, pars, choices);
                   collectPars(c.right, pars, choices);
                 },
                 [&](const global::Rec& r) { collectPars(r.body, pars, choices); },
                 [](const global::Var&) {},
                 [&](const global::Star& s) { collectPars(s.body, pars, choices); },
             },
             g.node().v);
}

}  // namespace

void CheckReport::append(const CheckReport& other) {
  violations.insert(violations.end(), other.violations.begin(), other.violations.end());
  normalise(*this);
}

bool terminable(const Global& g) {
  return std::visit(Overloaded{
                        [](const global::Skip&) { return true; },
                        [](const global::Comm&) { return false; },
                        [](const global::Seq& s) { return terminable(s.first) && terminable(s.second); },
                        [](const global::Par& p) { return terminable(p.left) && terminable(p.right); },
                        [](const global::Choice& c) { return terminable(c.left) || terminable(c.right); },
                        [](const global::Rec& r) { return terminable(r.body); },
                        [](const global::Var&) { return false; },
                        [](const global::Star&) { return true; },
                    },
                    g.node().v);
}

std::set<CommTriple> firstComms(const Global& g) {
  return std::visit(Overloaded{
                        [](const global::Skip&) { return std::set<CommTriple>{}; },
                        [](const global::Comm& c) {
                          std::set<CommTriple> out;
                          for (const auto& b : c.branches) out.insert(CommTriple{c.sender, c.receiver, b.label});
                          return out;
                        },
                        [](const global::Seq& s) {
                          auto out = firstComms(s.first);
                          if (terminable(s.first)) out.merge(firstComms(s.second));
                          return out;
                        },
                        [](const global::Par& p) {
                          auto out = firstComms(p.left);
                          out.merge(firstComms(p.right));
                          return out;
                        },
                        [](const global::Choice& c) {
                          auto out = firstComms(c.left);
                          out.merge(firstComms(c.right));
                          return out;
                        },
                        [](const global::Rec& r) { return firstComms(r.body); },
                        [](const global::Var&) { return std::set<CommTriple>{}; },
                        [](const global::Star& s) { return firstComms(s.body); },
                    },
                    g.node().v);
}

CheckReport checkCore(const Global& g) {
  CoreChecker checker;
  checker.visit(g);
  normalise(checker.report);
  return std::move(checker.report);
}

CheckReport checkGatingGlobal(const Global& g, const SemanticsConfig& c) {
  CheckReport out;
  GlobalGate{c, out, {}}.visit(g);
  normalise(out);
  return out;
}

CheckReport checkGatingLocal(const Local& l, const SemanticsConfig& c, std::optional<Participant> owner) {
  if (!owner) owner = subjectOf(l);
  std::vector<Participant> subjects;
  if (owner) subjects.push_back(*owner);
  CheckReport out;
  LocalGate{c, out, std::move(subjects), {}}.visit(l);
  normalise(out);
  return out;
}

CheckReport checkWellChannelled(const Global& g) {
  std::vector<const Global*> pars, choices;
  collectPars(g, pars, choices);
  CheckReport out;
  for (const Global* p : pars) {
    const auto& node = *p->as<global::Par>();
    auto left = comm(node.left);
    auto right = comm(node.right);
    std::vector<CommTriple> shared;
    std::set_intersection(left.begin(), left.end(), right.begin(), right.end(), std::back_inserter(shared));
    if (shared.empty()) continue;
    std::set<Participant> subj;
    std::string list;
    for (const auto& t : shared) {
      subj.insert(t.sender);
      subj.insert(t.receiver);
      list += (list.empty() ? "" : ", ") + triple(t);
    }
    out.violations.push_back(Violation{ViolationKind::NotWellChannelled, sortedVector(subj), printGlobal(*p),
                                       "parallel branches share communications {" + list + "}"});
  }
  normalise(out);
  return out;
}

CheckReport checkWellBranched(const Global& g) {
  std::vector<const Global*> pars, choices;
  collectPars(g, pars, choices);
  CheckReport out;
  for (const Global* ch : choices) {
    const auto& node = *ch->as<global::Choice>();
    auto left = firstComms(node.left);
    auto right = firstComms(node.right);
    std::string reason;
    if (left.empty() || right.empty()) {
      reason = "a side of the choice starts with no communication";
    } else {
      std::set<std::pair<Participant, Participant>> channels;
      for (const auto& t : left) channels.insert({t.sender, t.receiver});
      for (const auto& t : right) channels.insert({t.sender, t.receiver});
      if (channels.size() != 1) {
        reason = "the sides of the choice do not start with the same sender and receiver";
      } else {
        std::set<Label> ll, rl;
        for (const auto& t : left) ll.insert(t.label);
        for (const auto& t : right) rl.insert(t.label);
        std::vector<Label> common;
        std::set_intersection(ll.begin(), ll.end(), rl.begin(), rl.end(), std::back_inserter(common));
        if (!common.empty()) reason = "the sides of the choice share the label " + common.front().name;
      }
    }
    if (reason.empty()) continue;
    std::set<Participant> subj;
    for (const auto& t : left) subj.insert({t.sender, t.receiver});
    for (const auto& t : right) subj.insert({t.sender, t.receiver});
    out.violations.push_back(
        Violation{ViolationKind::NotWellBranched, sortedVector(subj), printGlobal(*ch), "not well-branched: " + reason});
  }
  normalise(out);
  return out;
}

CheckReport checkAll(const Global& g, const SemanticsConfig& c) {
  CheckReport out = checkCore(g);
  out.append(checkGatingGlobal(g, c));
  if (c.requireWellChannelled) out.append(checkWellChannelled(g));
  if (c.requireWellBranched) out.append(checkWellBranched(g));
  return out;
}

}  // namespace mpst
