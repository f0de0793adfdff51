#include "mpst/projection.hpp"

#include <algorithm>

#include "mpst/parser.hpp"
#include "mpst/wellformed.hpp"

namespace mpst {

std::string_view toString(ProjectionErrorKind k) {
  return k == ProjectionErrorKind::MergeUndefined ? "MergeUndefined" : "KPViolation";
}

// ---------------------------------------------------------------------------
// Merge

namespace {

// Rotates sequences to the right and pushes a leading action's continuation
// into its branches, so that `p?t ; L` and `p?{t ; L}` coincide.
Local normaliseHead(const Local& l) {
  const auto* s = l.as<local::Seq>();
  if (!s) return l;
  if (s->first.is<local::Skip>()) return normaliseHead(s->second);
  if (const auto* inner = s->first.as<local::Seq>())
    return normaliseHead(Local::seq(inner->first, sequence(inner->second, s->second)));
  if (const auto* a = s->first.as<local::Action>()) {
    std::vector<local::Branch> branches;
    for (const auto& b : a->branches) branches.push_back({b.label, sequence(b.cont, s->second)});
    return Local::action(a->dir, a->self, a->peer, std::move(branches));
  }
  return l;
}

Local deepNormal(const Local& l) {
  Local h = normaliseHead(l);
  return std::visit(Overloaded{
                        [&](const local::Skip&) { return h; },
                        [&](const local::Action& a) {
                          std::vector<local::Branch> branches;
                          for (const auto& b : a.branches) branches.push_back({b.label, deepNormal(b.cont)});
                          return Local::action(a.dir, a.self, a.peer, std::move(branches));
                        },
                        [](const local::Seq& s) { return Local::seq(deepNormal(s.first), deepNormal(s.second)); },
                        [](const local::Par& p) { return Local::par(deepNormal(p.left), deepNormal(p.right)); },
                        [](const local::Choice& c) { return Local::choice(deepNormal(c.left), deepNormal(c.right)); },
                        [](const local::Rec& r) { return Local::rec(r.var, deepNormal(r.body)); },
                        [&](const local::Var&) { return h; },
                        [](const local::Star& s) { return Local::star(deepNormal(s.body)); },
                    },
                    h.node().v);
}

bool equalModuloShorthand(const Local& a, const Local& b) { return a == b || deepNormal(a) == deepNormal(b); }

std::optional<Local> fullMerge(const Local& a, const Local& b) {
  if (equalModuloShorthand(a, b)) return a;
  Local na = normaliseHead(a);
  Local nb = normaliseHead(b);
  const auto& va = na.node().v;
  const auto& vb = nb.node().v;
  if (va.index() != vb.index()) return std::nullopt;

  if (const auto* x = na.as<local::Action>()) {
    const auto& y = *nb.as<local::Action>();
    if (x->dir != Direction::Recv || y.dir != Direction::Recv || x->self != y.self || x->peer != y.peer)
      return std::nullopt;
    std::vector<local::Branch> branches = x->branches;
    for (const auto& yb : y.branches) {
      auto it = std::find_if(branches.begin(), branches.end(), [&](const auto& xb) { return xb.label == yb.label; });
      if (it == branches.end()) {
        branches.push_back(yb);
        continue;
      }
      auto merged = fullMerge(it->cont, yb.cont);
      if (!merged) return std::nullopt;
      it->cont = *merged;
    }
    return Local::recv(x->self, x->peer, std::move(branches));
  }
  auto both = [](const auto& l, const auto& r, auto build) -> std::optional<Local> {
    auto ml = fullMerge(l.first, r.first);
    if (!ml) return std::nullopt;
    auto mr = fullMerge(l.second, r.second);
    if (!mr) return std::nullopt;
    return build(*ml, *mr);
  };
  if (const auto* x = na.as<local::Seq>()) {
    const auto& y = *nb.as<local::Seq>();
    return both(*x, y, [](Local l, Local r) { return Local::seq(l, r); });
  }
  if (const auto* x = na.as<local::Par>()) {
    const auto& y = *nb.as<local::Par>();
    auto l = fullMerge(x->left, y.left);
    auto r = l ? fullMerge(x->right, y.right) : std::nullopt;
    if (!l || !r) return std::nullopt;
    return Local::par(*l, *r);
  }
  if (const auto* x = na.as<local::Choice>()) {
    const auto& y = *nb.as<local::Choice>();
    auto l = fullMerge(x->left, y.left);
    auto r = l ? fullMerge(x->right, y.right) : std::nullopt;
    if (!l || !r) return std::nullopt;
    return Local::choice(*l, *r);
  }
  if (const auto* x = na.as<local::Rec>()) {
    const auto& y = *nb.as<local::Rec>();
    if (x->var != y.var) return std::nullopt;
    auto body = fullMerge(x->body, y.body);
    if (!body) return std::nullopt;
    return Local::rec(x->var, *body);
  }
  if (const auto* x = na.as<local::Star>()) {
    auto body = fullMerge(x->body, nb.as<local::Star>()->body);
    if (!body) return std::nullopt;
    return Local::star(*body);
  }
  return std::nullopt;
}

}  // namespace

Result<Local, MergeError> merge(const std::vector<Local>& locals, MergeCriterion criterion) {
  if (locals.empty()) return Local::skip();
  Local acc = locals.front();
  for (std::size_t i = 1; i < locals.size(); ++i) {
    const Local& next = locals[i];
    if (criterion == MergeCriterion::Plain) {
      if (!equalModuloShorthand(acc, next)) return MergeError{printLocal(acc), printLocal(next)};
      continue;
    }
    auto merged = fullMerge(acc, next);
    if (!merged) return MergeError{printLocal(acc), printLocal(next)};
    acc = *merged;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// KP

namespace {

bool terminableFor(const Global& g, const Participant& r) {
  return std::visit(Overloaded{
                        [](const global::Skip&) { return true; },
                        [&](const global::Comm& c) {
                          if (c.sender == r || c.receiver == r) return false;
                          return std::all_of(c.branches.begin(), c.branches.end(),
                                             [&](const auto& b) { return terminableFor(b.cont, r); });
                        },
                        [&](const global::Seq& s) { return terminableFor(s.first, r) && terminableFor(s.second, r); },
                        [&](const global::Par& p) { return terminableFor(p.left, r) && terminableFor(p.right, r); },
                        [&](const global::Choice& c) { return terminableFor(c.left, r) || terminableFor(c.right, r); },
                        [&](const global::Rec& rec) { return terminableFor(rec.body, r); },
                        [](const global::Var&) { return false; },
                        [](const global::Star&) { return true; },
                    },
                    g.node().v);
}

Global seqOrSelf(const Global& a, const Global& b) {
  if (b.is<global::Skip>()) return a;
  if (a.is<global::Skip>()) return b;
  return Global::seq(a, b);
}

std::string describe(const FirstAction& a) {
  return a.peer.name + (a.dir == Direction::Send ? "!" : "?") + a.label.name;
}

}  // namespace

std::set<FirstAction> firstActions(const Global& g, const Participant& r) {
  return std::visit(Overloaded{
                        [](const global::Skip&) { return std::set<FirstAction>{}; },
                        [&](const global::Comm& c) {
                          std::set<FirstAction> out;
                          for (const auto& b : c.branches) {
                            if (c.sender == r)
                              out.insert({Direction::Send, c.receiver, b.label});
                            else if (c.receiver == r)
                              out.insert({Direction::Recv, c.sender, b.label});
                            else
                              out.merge(firstActions(b.cont, r));
                          }
                          return out;
                        },
                        [&](const global::Seq& s) {
                          auto out = firstActions(s.first, r);
                          if (terminableFor(s.first, r)) out.merge(firstActions(s.second, r));
                          return out;
                        },
                        [&](const global::Par& p) {
                          auto out = firstActions(p.left, r);
                          out.merge(firstActions(p.right, r));
                          return out;
                        },
                        [&](const global::Choice& c) {
                          auto out = firstActions(c.left, r);
                          out.merge(firstActions(c.right, r));
                          return out;
                        },
                        [&](const global::Rec& rec) { return firstActions(rec.body, r); },
                        [](const global::Var&) { return std::set<FirstAction>{}; },
                        [&](const global::Star& s) { return firstActions(s.body, r); },
                    },
                    g.node().v);
}

std::optional<Participant> loopDecider(const Global& starBody) {
  std::set<Participant> senders;
  for (const auto& t : firstComms(starBody)) senders.insert(t.sender);
  if (senders.size() != 1) return std::nullopt;
  return *senders.begin();
}

std::optional<KPViolation> kpCheckFor(const Global& starBody, const Global& continuation, const Participant& r) {
  auto inBody = participants(starBody);
  if (!inBody.contains(r)) return std::nullopt;
  if (loopDecider(starBody) == r) return std::nullopt;

  auto iterate = firstActions(starBody, r);
  auto proceed = participants(continuation).contains(r) ? firstActions(continuation, r) : std::set<FirstAction>{};
  auto fail = [&](std::string why) {
    return KPViolation{r, r.name + " cannot tell another iteration from the continuation: " + why};
  };
  if (iterate.empty()) return fail("it takes no first action inside the loop");

  std::vector<FirstAction> shared;
  std::set_intersection(iterate.begin(), iterate.end(), proceed.begin(), proceed.end(), std::back_inserter(shared));
  if (!shared.empty()) return fail("both start with " + describe(shared.front()));

  std::optional<Participant> peer;
  for (const auto* side : {&iterate, &proceed}) {
    for (const auto& a : *side) {
      if (a.dir == Direction::Send) return fail("it must send " + describe(a) + " without being told which way the loop went");
      if (peer && *peer != a.peer) return fail("its first receives come from different peers");
      peer = a.peer;
    }
  }
  return std::nullopt;
}

std::optional<KPViolation> kpCheck(const Global& starBody, const Global& continuation) {
  auto everyone = participants(starBody);
  everyone.merge(participants(continuation));
  for (const auto& r : everyone)
    if (auto v = kpCheckFor(starBody, continuation, r)) return v;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Projection

namespace {

struct Projector {
  const Participant& self;
  const SemanticsConfig& config;

  ProjectionError mergeFailure(const Global& at) const {
    auto term = printGlobal(at);
    return ProjectionError{ProjectionErrorKind::MergeUndefined, self, term, config.merge,
                           "[" + std::string(displayName(config.merge)) + " Merge] - projection undefined for [" +
                               self.name + "] in [" + term + "]"};
  }

  std::optional<ProjectionError> kpWalk(const Global& g, const Global& cont) const {
    return std::visit(Overloaded{
                          [](const global::Skip&) -> std::optional<ProjectionError> { return std::nullopt; },
                          [](const global::Var&) -> std::optional<ProjectionError> { return std::nullopt; },
                          [&](const global::Comm& c) -> std::optional<ProjectionError> {
                            for (const auto& b : c.branches)
                              if (auto e = kpWalk(b.cont, cont)) return e;
                            return std::nullopt;
                          },
                          [&](const global::Seq& s) {
                            auto e = kpWalk(s.first, seqOrSelf(s.second, cont));
                            return e ? e : kpWalk(s.second, cont);
                          },
                          [&](const global::Par& p) {
                            auto e = kpWalk(p.left, cont);
                            return e ? e : kpWalk(p.right, cont);
                          },
                          [&](const global::Choice& c) {
                            auto e = kpWalk(c.left, cont);
                            return e ? e : kpWalk(c.right, cont);
                          },
                          [&](const global::Rec& r) { return kpWalk(r.body, cont); },
                          [&](const global::Star& s) -> std::optional<ProjectionError> {
                            if (auto v = kpCheckFor(s.body, cont, self)) {
                              auto term = printGlobal(seqOrSelf(g, cont));
                              return ProjectionError{ProjectionErrorKind::KPViolation, self, term, config.merge,
                                                     "[Kleene Star KP] - projection undefined for [" + self.name +
                                                         "] in [" + term + "]: " + v->message};
                            }
                            return kpWalk(s.body, seqOrSelf(g, cont));
                          },
                      },
                      g.node().v);
  }

  // Sender and receiver of the channel both sides of a choice start on.
  std::set<Participant> deciders(const global::Choice& c) const {
    auto left = firstComms(c.left);
    auto right = firstComms(c.right);
    if (left.empty() || right.empty()) return {};
    std::set<std::pair<Participant, Participant>> channels;
    for (const auto& t : left) channels.insert({t.sender, t.receiver});
    for (const auto& t : right) channels.insert({t.sender, t.receiver});
    if (channels.size() != 1) return {};
    return {channels.begin()->first, channels.begin()->second};
  }

  Result<Local, ProjectionError> operator()(const Global& g) const {
    using R = Result<Local, ProjectionError>;
    return std::visit(
        Overloaded{
            [](const global::Skip&) -> R { return Local::skip(); },
            [](const global::Var& v) -> R { return Local::var(v.var); },
            [&](const global::Rec& r) -> R {
              if (!participants(r.body).contains(self)) return Local::skip();
              auto body = (*this)(r.body);
              if (!body) return body.error();
              return Local::rec(r.var, body.value());
            },
            [&](const global::Star& s) -> R {
              if (!participants(s.body).contains(self)) return Local::skip();
              auto body = (*this)(s.body);
              if (!body) return body.error();
              return Local::star(body.value());
            },
            [&](const global::Comm& c) -> R {
              std::vector<Local> conts;
              for (const auto& b : c.branches) {
                auto l = (*this)(b.cont);
                if (!l) return l.error();
                conts.push_back(l.value());
              }
              const bool sends = c.sender == self;
              const bool receives = c.receiver == self;
              if (sends != receives) {
                std::vector<local::Branch> branches;
                for (std::size_t i = 0; i < conts.size(); ++i) branches.push_back({c.branches[i].label, conts[i]});
                return sends ? Local::send(self, c.receiver, std::move(branches))
                             : Local::recv(self, c.sender, std::move(branches));
              }
              if (sends && receives) return mergeFailure(g);
              auto merged = merge(conts, config.merge);
              if (!merged) return mergeFailure(g);
              return merged.value();
            },
            [&](const global::Seq& s) -> R {
              auto a = (*this)(s.first);
              if (!a) return a.error();
              auto b = (*this)(s.second);
              if (!b) return b.error();
              return sequence(a.value(), b.value());
            },
            [&](const global::Par& p) -> R {
              auto a = (*this)(p.left);
              if (!a) return a.error();
              auto b = (*this)(p.right);
              if (!b) return b.error();
              return parallel(a.value(), b.value());
            },
            [&](const global::Choice& c) -> R {
              auto a = (*this)(c.left);
              if (!a) return a.error();
              auto b = (*this)(c.right);
              if (!b) return b.error();
              if (!deciders(c).contains(self) && !merge({a.value(), b.value()}, config.merge)) return mergeFailure(g);
              return alternative(a.value(), b.value());
            },
        },
        g.node().v);
  }
};

}  // namespace

Result<Local, ProjectionError> project(const Global& g, const Participant& r, const SemanticsConfig& c) {
  Projector p{r, c};
  if (auto kp = p.kpWalk(g, Global::skip())) return *kp;
  return p(g);
}

Result<LocalsMap, ProjectionError> projectAll(const Global& g, const SemanticsConfig& c) {
  LocalsMap out;
  for (const auto& r : participants(g)) {
    auto l = project(g, r, c);
    if (!l) return l.error();
    out.emplace(r, l.value());
  }
  return out;
}

}  // namespace mpst
