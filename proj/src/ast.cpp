#include "mpst/ast.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace mpst {

bool isIdentifier(std::string_view text) noexcept {
  if (text.empty()) return false;
  auto first = static_cast<unsigned char>(text.front());
  if (!(std::isalpha(first) || first == '_')) return false;
  return std::all_of(text.begin(), text.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
  });
}

// ---------------------------------------------------------------------------
// Construction

namespace {

template <class NodeT, class Alt>
std::shared_ptr<const NodeT> makeNode(Alt alt) {
  return std::make_shared<const NodeT>(NodeT{std::move(alt)});
}

const std::shared_ptr<const Global::Node>& globalSkipNode() {
  static const auto node = std::make_shared<const Global::Node>(Global::Node{global::Skip{}});
  return node;
}

const std::shared_ptr<const Local::Node>& localSkipNode() {
  static const auto node = std::make_shared<const Local::Node>(Local::Node{local::Skip{}});
  return node;
}

}  // namespace

Global::Global() : node_(globalSkipNode()) {}
Global Global::skip() { return Global(); }

Global Global::comm(Participant sender, Participant receiver, std::vector<global::Branch> branches) {
  return Global(makeNode<Node>(global::Comm{std::move(sender), std::move(receiver), std::move(branches)}));
}

Global Global::message(Participant sender, Participant receiver, Label label) {
  return comm(std::move(sender), std::move(receiver), {global::Branch{std::move(label), skip()}});
}

Global Global::seq(Global first, Global second) {
  return Global(makeNode<Node>(global::Seq{std::move(first), std::move(second)}));
}
Global Global::par(Global left, Global right) {
  return Global(makeNode<Node>(global::Par{std::move(left), std::move(right)}));
}
Global Global::choice(Global left, Global right) {
  return Global(makeNode<Node>(global::Choice{std::move(left), std::move(right)}));
}
Global Global::rec(RecVar var, Global body) {
  return Global(makeNode<Node>(global::Rec{std::move(var), std::move(body)}));
}
Global Global::var(RecVar var) { return Global(makeNode<Node>(global::Var{std::move(var)})); }
Global Global::star(Global body) { return Global(makeNode<Node>(global::Star{std::move(body)})); }

Local::Local() : node_(localSkipNode()) {}
Local Local::skip() { return Local(); }

Local Local::action(Direction dir, Participant self, Participant peer, std::vector<local::Branch> branches) {
  return Local(makeNode<Node>(local::Action{dir, std::move(self), std::move(peer), std::move(branches)}));
}
Local Local::send(Participant self, Participant peer, std::vector<local::Branch> branches) {
  return action(Direction::Send, std::move(self), std::move(peer), std::move(branches));
}
Local Local::recv(Participant self, Participant peer, std::vector<local::Branch> branches) {
  return action(Direction::Recv, std::move(self), std::move(peer), std::move(branches));
}
Local Local::seq(Local first, Local second) {
  return Local(makeNode<Node>(local::Seq{std::move(first), std::move(second)}));
}
Local Local::par(Local left, Local right) {
  return Local(makeNode<Node>(local::Par{std::move(left), std::move(right)}));
}
Local Local::choice(Local left, Local right) {
  return Local(makeNode<Node>(local::Choice{std::move(left), std::move(right)}));
}
Local Local::rec(RecVar var, Local body) {
  return Local(makeNode<Node>(local::Rec{std::move(var), std::move(body)}));
}
Local Local::var(RecVar var) { return Local(makeNode<Node>(local::Var{std::move(var)})); }
Local Local::star(Local body) { return Local(makeNode<Node>(local::Star{std::move(body)})); }

Local sequence(Local first, Local second) {
  if (first.is<local::Skip>()) return second;
  if (second.is<local::Skip>()) return first;
  return Local::seq(std::move(first), std::move(second));
}

Local parallel(Local left, Local right) {
  if (left.is<local::Skip>()) return right;
  if (right.is<local::Skip>()) return left;
  return Local::par(std::move(left), std::move(right));
}

Local alternative(Local left, Local right) {
  if (left == right) return left;
  return Local::choice(std::move(left), std::move(right));
}

// ---------------------------------------------------------------------------
// Equality

namespace {

template <class Branches>
bool sameBranchMap(const Branches& a, const Branches& b) {
  if (a.size() != b.size()) return false;
  for (const auto& x : a) {
    auto it = std::find_if(b.begin(), b.end(), [&](const auto& y) { return y.label == x.label; });
    if (it == b.end() || !(it->cont == x.cont)) return false;
  }
  // Duplicate labels on one side but not the other would slip through the
  // loop above when sizes agree, so check the label multisets too.
  std::vector<std::string> la, lb;
  for (const auto& x : a) la.push_back(x.label.name);
  for (const auto& y : b) lb.push_back(y.label.name);
  std::sort(la.begin(), la.end());
  std::sort(lb.begin(), lb.end());
  return la == lb;
}

}  // namespace

bool operator==(const Global& a, const Global& b) {
  if (a.node_ == b.node_) return true;
  const auto& va = a.node().v;
  const auto& vb = b.node().v;
  if (va.index() != vb.index()) return false;
  return std::visit(
      Overloaded{
          [](const global::Skip&) { return true; },
          [&](const global::Comm& x) {
            const auto& y = std::get<global::Comm>(vb);
            return x.sender == y.sender && x.receiver == y.receiver && sameBranchMap(x.branches, y.branches);
          },
          [&](const global::Seq& x) {
            const auto& y = std::get<global::Seq>(vb);
            return x.first == y.first && x.second == y.second;
          },
          [&](const global::Par& x) {
            const auto& y = std::get<global::Par>(vb);
            return x.left == y.left && x.right == y.right;
          },
          [&](const global::Choice& x) {
            const auto& y = std::get<global::Choice>(vb);
            return x.left == y.left && x.right == y.right;
          },
          [&](const global::Rec& x) {
            const auto& y = std::get<global::Rec>(vb);
            return x.var == y.var && x.body == y.body;
          },
          [&](const global::Var& x) { return x.var == std::get<global::Var>(vb).var; },
          [&](const global::Star& x) { return x.body == std::get<global::Star>(vb).body; },
      },
      va);
}

bool operator==(const Local& a, const Local& b) {
  if (a.node_ == b.node_) return true;
  const auto& va = a.node().v;
  const auto& vb = b.node().v;
  if (va.index() != vb.index()) return false;
  return std::visit(
      Overloaded{
          [](const local::Skip&) { return true; },
          [&](const local::Action& x) {
            const auto& y = std::get<local::Action>(vb);
            return x.dir == y.dir && x.self == y.self && x.peer == y.peer && sameBranchMap(x.branches, y.branches);
          },
          [&](const local::Seq& x) {
            const auto& y = std::get<local::Seq>(vb);
            return x.first == y.first && x.second == y.second;
          },
          [&](const local::Par& x) {
            const auto& y = std::get<local::Par>(vb);
            return x.left == y.left && x.right == y.right;
          },
          [&](const local::Choice& x) {
            const auto& y = std::get<local::Choice>(vb);
            return x.left == y.left && x.right == y.right;
          },
          [&](const local::Rec& x) {
            const auto& y = std::get<local::Rec>(vb);
            return x.var == y.var && x.body == y.body;
          },
          [&](const local::Var& x) { return x.var == std::get<local::Var>(vb).var; },
          [&](const local::Star& x) { return x.body == std::get<local::Star>(vb).body; },
      },
      va);
}

// ---------------------------------------------------------------------------
// Queries

namespace {

void collectParticipants(const Global& g, std::set<Participant>& out) {
  std::visit(Overloaded{
                 [](const global::Skip&) {},
                 [&](const global::Comm& c) {
                   out.insert(c.sender);
                   out.insert(c.receiver);
                   for (const auto& b : c.branches) collectParticipants(b.cont, out);
                 },
                 [&](const global::Seq& s) {
                   collectParticipants(s.first, out);
                   collectParticipants(s.second, out);
                 },
                 [&](const global::Par& p) {
                   collectParticipants(p.left, out);
                   collectParticipants(p.right, out);
                 },
                 [&](const global::Choice& c) {
                   collectParticipants(c.left, out);
                   collectParticipants(c.right, out);
                 },
                 [&](const global::Rec& r) { collectParticipants(r.body, out); },
                 [](const global::Var&) {},
                 [&](const global::Star& s) { collectParticipants(s.body, out); },
             },
             g.node().v);
}

void collectParticipants(const Local& l, std::set<Participant>& out) {
  std::visit(Overloaded{
                 [](const local::Skip&) {},
                 [&](const local::Action& a) {
                   out.insert(a.self);
                   out.insert(a.peer);
                   for (const auto& b : a.branches) collectParticipants(b.cont, out);
                 },
                 [&](const local::Seq& s) {
                   collectParticipants(s.first, out);
                   collectParticipants(s.second, out);
                 },
                 [&](const local::Par& p) {
                   collectParticipants(p.left, out);
                   collectParticipants(p.right, out);
                 },
                 [&](const local::Choice& c) {
                   collectParticipants(c.left, out);
                   collectParticipants(c.right, out);
                 },
                 [&](const local::Rec& r) { collectParticipants(r.body, out); },
                 [](const local::Var&) {},
                 [&](const local::Star& s) { collectParticipants(s.body, out); },
             },
             l.node().v);
}

void collectComms(const Global& g, std::set<CommTriple>& out) {
  std::visit(Overloaded{
                 [](const global::Skip&) {},
                 [&](const global::Comm& c) {
                   for (const auto& b : c.branches) {
                     out.insert(CommTriple{c.sender, c.receiver, b.label});
                     collectComms(b.cont, out);
                   }
                 },
                 [&](const global::Seq& s) {
                   collectComms(s.first, out);
                   collectComms(s.second, out);
                 },
                 [&](const global::Par& p) {
                   collectComms(p.left, out);
                   collectComms(p.right, out);
                 },
                 [&](const global::Choice& c) {
                   collectComms(c.left, out);
                   collectComms(c.right, out);
                 },
                 [&](const global::Rec& r) { collectComms(r.body, out); },
                 [](const global::Var&) {},
                 [&](const global::Star& s) { collectComms(s.body, out); },
             },
             g.node().v);
}

void collectFree(const Global& g, std::set<RecVar>& bound, std::set<RecVar>& out) {
  std::visit(Overloaded{
                 [](const global::Skip&) {},
                 [&](const global::Comm& c) {
                   for (const auto& b : c.branches) collectFree(b.cont, bound, out);
                 },
                 [&](const global::Seq& s) {
                   collectFree(s.first, bound, out);
                   collectFree(s.second, bound, out);
                 },
                 [&](const global::Par& p) {
                   collectFree(p.left, bound, out);
                   collectFree(p.right, bound, out);
                 },
                 [&](const global::Choice& c) {
                   collectFree(c.left, bound, out);
                   collectFree(c.right, bound, out);
                 },
                 [&](const global::Rec& r) {
                   bool fresh = bound.insert(r.var).second;
                   collectFree(r.body, bound, out);
                   if (fresh) bound.erase(r.var);
                 },
                 [&](const global::Var& v) {
                   if (!bound.contains(v.var)) out.insert(v.var);
                 },
                 [&](const global::Star& s) { collectFree(s.body, bound, out); },
             },
             g.node().v);
}

void collectFree(const Local& l, std::set<RecVar>& bound, std::set<RecVar>& out) {
  std::visit(Overloaded{
                 [](const local::Skip&) {},
                 [&](const local::Action& a) {
                   for (const auto& b : a.branches) collectFree(b.cont, bound, out);
                 },
                 [&](const local::Seq& s) {
                   collectFree(s.first, bound, out);
                   collectFree(s.second, bound, out);
                 },
                 [&](const local::Par& p) {
                   collectFree(p.left, bound, out);
                   collectFree(p.right, bound, out);
                 },
                 [&](const local::Choice& c) {
                   collectFree(c.left, bound, out);
                   collectFree(c.right, bound, out);
                 },
                 [&](const local::Rec& r) {
                   bool fresh = bound.insert(r.var).second;
                   collectFree(r.body, bound, out);
                   if (fresh) bound.erase(r.var);
                 },
                 [&](const local::Var& v) {
                   if (!bound.contains(v.var)) out.insert(v.var);
                 },
                 [&](const local::Star& s) { collectFree(s.body, bound, out); },
             },
             l.node().v);
}

bool terminatedImpl(const Local& l, std::set<RecVar>& bound) {
  return std::visit(Overloaded{
                        [](const local::Skip&) { return true; },
                        [](const local::Action&) { return false; },
                        [&](const local::Seq& s) {
                          // Both sides are visited so that unbound variables are always reported.
                          bool a = terminatedImpl(s.first, bound);
                          bool b = terminatedImpl(s.second, bound);
                          return a && b;
                        },
                        [&](const local::Par& p) {
                          bool a = terminatedImpl(p.left, bound);
                          bool b = terminatedImpl(p.right, bound);
                          return a && b;
                        },
                        [&](const local::Choice& c) {
                          bool a = terminatedImpl(c.left, bound);
                          bool b = terminatedImpl(c.right, bound);
                          return a || b;
                        },
                        [&](const local::Rec& r) {
                          bool fresh = bound.insert(r.var).second;
                          bool t = terminatedImpl(r.body, bound);
                          if (fresh) bound.erase(r.var);
                          return t;
                        },
                        [&](const local::Var& v) -> bool {
                          if (!bound.contains(v.var))
                            throw std::invalid_argument("unbound recursion variable '" + v.var.name + "'");
                          return false;
                        },
                        [&](const local::Star& s) {
                          std::set<RecVar> free;
                          collectFree(s.body, bound, free);
                          if (!free.empty())
                            throw std::invalid_argument("unbound recursion variable '" + free.begin()->name + "'");
                          return true;
                        },
                    },
                    l.node().v);
}

template <class Branches>
std::vector<const typename Branches::value_type*> sortedBranches(const Branches& bs) {
  std::vector<const typename Branches::value_type*> out;
  for (const auto& b : bs) out.push_back(&b);
  std::sort(out.begin(), out.end(), [](auto* x, auto* y) { return x->label < y->label; });
  return out;
}

void keyOf(const Global& g, std::string& out) {
  std::visit(Overloaded{
                 [&](const global::Skip&) { out += 'S'; },
                 [&](const global::Comm& c) {
                   out += "C(" + c.sender.name + ' ' + c.receiver.name;
                   for (auto* b : sortedBranches(c.branches)) {
                     out += ' ' + b->label.name + ':';
                     keyOf(b->cont, out);
                   }
                   out += ')';
                 },
                 [&](const global::Seq& s) {
                   out += "Q(";
                   keyOf(s.first, out);
                   out += ' ';
                   keyOf(s.second, out);
                   out += ')';
                 },
                 [&](const global::Par& p) {
                   out += "P(";
                   keyOf(p.left, out);
                   out += ' ';
                   keyOf(p.right, out);
                   out += ')';
                 },
                 [&](const global::Choice& c) {
                   out += "O(";
                   keyOf(c.left, out);
                   out += ' ';
                   keyOf(c.right, out);
                   out += ')';
                 },
                 [&](const global::Rec& r) {
                   out += "R(" + r.var.name + ' ';
                   keyOf(r.body, out);
                   out += ')';
                 },
                 [&](const global::Var& v) { out += "V(" + v.var.name + ')'; },
                 [&](const global::Star& s) {
                   out += "K(";
                   keyOf(s.body, out);
                   out += ')';
                 },
             },
             g.node().v);
}

void keyOf(const Local& l, std::string& out) {
  std::visit(Overloaded{
                 [&](const local::Skip&) { out += 'S'; },
                 [&](const local::Action& a) {
                   out += (a.dir == Direction::Send ? "!(" : "?(");
                   out += a.self.name + ' ' + a.peer.name;
                   for (auto* b : sortedBranches(a.branches)) {
                     out += ' ' + b->label.name + ':';
                     keyOf(b->cont, out);
                   }
                   out += ')';
                 },
                 [&](const local::Seq& s) {
                   out += "Q(";
                   keyOf(s.first, out);
                   out += ' ';
                   keyOf(s.second, out);
                   out += ')';
                 },
                 [&](const local::Par& p) {
                   out += "P(";
                   keyOf(p.left, out);
                   out += ' ';
                   keyOf(p.right, out);
                   out += ')';
                 },
                 [&](const local::Choice& c) {
                   out += "O(";
                   keyOf(c.left, out);
                   out += ' ';
                   keyOf(c.right, out);
                   out += ')';
                 },
                 [&](const local::Rec& r) {
                   out += "R(" + r.var.name + ' ';
                   keyOf(r.body, out);
                   out += ')';
                 },
                 [&](const local::Var& v) { out += "V(" + v.var.name + ')'; },
                 [&](const local::Star& s) {
                   out += "K(";
                   keyOf(s.body, out);
                   out += ')';
                 },
             },
             l.node().v);
}

}  // namespace

std::set<Participant> participants(const Global& g) {
  std::set<Participant> out;
  collectParticipants(g, out);
  return out;
}

std::set<Participant> participants(const Local& l) {
  std::set<Participant> out;
  collectParticipants(l, out);
  return out;
}

std::set<CommTriple> comm(const Global& g) {
  std::set<CommTriple> out;
  collectComms(g, out);
  return out;
}

std::set<RecVar> freeVars(const Global& g) {
  std::set<RecVar> bound, out;
  collectFree(g, bound, out);
  return out;
}

std::set<RecVar> freeVars(const Local& l) {
  std::set<RecVar> bound, out;
  collectFree(l, bound, out);
  return out;
}

bool terminated(const Local& l, const std::set<RecVar>& boundOutside) {
  std::set<RecVar> bound = boundOutside;
  return terminatedImpl(l, bound);
}

std::string canonicalKey(const Global& g) {
  std::string out;
  keyOf(g, out);
  return out;
}

std::string canonicalKey(const Local& l) {
  std::string out;
  keyOf(l, out);
  return out;
}

}  // namespace mpst
