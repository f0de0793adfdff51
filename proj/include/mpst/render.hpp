#pragma once

#include <string>

#include "mpst/ast.hpp"
#include "mpst/semantics.hpp"

namespace mpst {

/// Mermaid `sequenceDiagram` source. Participants are declared in order of
/// first appearance; names are kept verbatim.
std::string renderMsc(const Global& g);

/// Graphviz digraph of one participant's automaton.
std::string renderLocalFsm(const Participant& owner, const Local& l);
std::string renderLocalFsm(const LocalFsm& fsm);

/// Graphviz digraph of a composed LTS. Clean terminal states are double
/// circles, stuck ones diamonds; truncation adds a dashed overflow node.
std::string renderCompositionalFsm(const Lts& lts);

}  // namespace mpst
