#include "mpst/render.hpp"

#include <algorithm>
#include <sstream>

#include "mpst/parser.hpp"

namespace mpst {

namespace {

void collectParticipants(const Global& g, std::vector<Participant>& order) {
  auto note = [&](const Participant& p) {
    if (std::find(order.begin(), order.end(), p) == order.end()) order.push_back(p);
  };
  std::visit(Overloaded{
                 [](const global::Skip&) {},
                 [](const global::Var&) {},
                 [&](const global::Comm& c) {
                   note(c.sender);
                   note(c.receiver);
                   for (const auto& b : c.branches) collectParticipants(b.cont, order);
                 },
                 [&](const global::Seq& s) {
                   collectParticipants(s.first, order);
                   collectParticipants(s.second, order);
                 },
                 [&](const global::Par& p) {
                   collectParticipants(p.left, order);
                   collectParticipants(p.right, order);
                 },
                 [&](const global::Choice& c) {
                   collectParticipants(c.left, order);
                   collectParticipants(c.right, order);
                 },
                 [&](const global::Rec& r) { collectParticipants(r.body, order); },
                 [&](const global::Star& s) { collectParticipants(s.body, order); },
             },
             g.node().v);
}

class MscWriter {
 public:
  explicit MscWriter(std::ostringstream& out) : out_(out) {}

  void emit(const Global& g, int depth) {
    const std::string pad(static_cast<std::size_t>(depth) * 4, ' ');
    std::visit(Overloaded{
                   [](const global::Skip&) {},
                   [&](const global::Var& v) { out_ << pad << "%% continue " << v.var.name << "\n"; },
                   [&](const global::Comm& c) {
                     if (c.branches.size() == 1) {
                       arrow(pad, c, c.branches.front().label);
                       emit(c.branches.front().cont, depth);
                       return;
                     }
                     for (std::size_t i = 0; i < c.branches.size(); ++i) {
                       out_ << pad << (i == 0 ? "alt " : "else ") << c.branches[i].label.name << "\n";
                       arrow(pad + "    ", c, c.branches[i].label);
                       emit(c.branches[i].cont, depth + 1);
                     }
                     out_ << pad << "end\n";
                   },
                   [&](const global::Seq& s) {
                     emit(s.first, depth);
                     emit(s.second, depth);
                   },
                   [&](const global::Par& p) { block<global::Par>(pad, "par", "and", p.left, p.right, depth); },
                   [&](const global::Choice& c) { block<global::Choice>(pad, "alt", "else", c.left, c.right, depth); },
                   [&](const global::Rec& r) {
                     out_ << pad << "loop " << r.var.name << "\n";
                     emit(r.body, depth + 1);
                     out_ << pad << "end\n";
                   },
                   [&](const global::Star& s) {
                     out_ << pad << "loop zero or more times\n";
                     emit(s.body, depth + 1);
                     out_ << pad << "end\n";
                   },
               },
               g.node().v);
  }

 private:
  void arrow(const std::string& pad, const global::Comm& c, const Label& l) {
    out_ << pad << c.sender.name << "->>" << c.receiver.name << ": " << l.name << "\n";
  }

  // Flattens nested binary operators of the same kind into one block.
  template <class Node>
  void block(const std::string& pad, const char* open, const char* sep, const Global& left, const Global& right,
             int depth) {
    std::vector<Global> arms{left};
    Global rest = right;
    while (const auto* n = rest.as<Node>()) {
      arms.push_back(n->left);
      rest = n->right;
    }
    arms.push_back(rest);
    for (std::size_t i = 0; i < arms.size(); ++i) {
      out_ << pad << (i == 0 ? open : sep) << "\n";
      emit(arms[i], depth + 1);
    }
    out_ << pad << "end\n";
  }

  std::ostringstream& out_;
};

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

}  // namespace

std::string renderMsc(const Global& g) {
  std::ostringstream out;
  out << "sequenceDiagram\n";
  std::vector<Participant> order;
  collectParticipants(g, order);
  for (const auto& p : order) out << "    participant " << p.name << "\n";
  MscWriter(out).emit(g, 1);
  return out.str();
}

std::string renderLocalFsm(const LocalFsm& fsm) {
  std::ostringstream out;
  out << "digraph \"" << escape(fsm.owner.name) << "\" {\n";
  out << "  rankdir=LR;\n";
  out << "  __init [shape=point];\n";
  for (std::size_t s = 0; s < fsm.states.size(); ++s) {
    std::set<RecVar> bound;
    for (const auto& [x, _] : fsm.states[s].env) bound.insert(x);
    const bool done = enabledLocal(fsm.states[s].local, fsm.states[s].env).empty();
    const char* shape = !done ? "circle" : terminated(fsm.states[s].local, bound) ? "doublecircle" : "diamond";
    out << "  s" << s << " [label=\"" << s << "\", shape=" << shape << ", tooltip=\""
        << escape(printLocal(fsm.states[s].local)) << "\"];\n";
  }
  if (fsm.truncated) out << "  overflow [label=\"…\", style=dashed];\n";
  out << "  __init -> s0;\n";
  for (const auto& e : fsm.edges)
    out << "  s" << e.from << " -> s" << e.to << " [label=\"" << escape(print(e.label)) << "\"];\n";
  out << "}\n";
  return out.str();
}

std::string renderLocalFsm(const Participant& owner, const Local& l) { return renderLocalFsm(exploreLocal(owner, l)); }

std::string renderCompositionalFsm(const Lts& lts) {
  std::ostringstream out;
  out << "digraph lts {\n";
  out << "  rankdir=LR;\n";
  out << "  __init [shape=point];\n";
  std::vector<bool> open(lts.states.size(), false);
  for (auto s : lts.openStates) open[s] = true;
  std::vector<bool> hasEdge(lts.states.size(), false);
  for (const auto& e : lts.edges) hasEdge[e.from] = true;
  for (std::size_t s = 0; s < lts.states.size(); ++s) {
    const char* shape = "circle";
    if (!hasEdge[s] && !open[s]) shape = isTerminal(lts.states[s]) == Termination::Clean ? "doublecircle" : "diamond";
    out << "  s" << s << " [label=\"" << s << "\", shape=" << shape << "];\n";
  }
  if (lts.truncated) out << "  overflow [label=\"…\", style=dashed];\n";
  out << "  __init -> s0;\n";
  for (const auto& e : lts.edges)
    out << "  s" << e.from << " -> s" << e.to << " [label=\"" << escape(print(e.label)) << "\"];\n";
  for (auto s : lts.openStates) out << "  s" << s << " -> overflow [style=dashed];\n";
  out << "}\n";
  return out.str();
}

}  // namespace mpst
