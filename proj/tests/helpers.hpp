#pragma once

#include <doctest.h>

#include <string>

#include "mpst/catalog.hpp"
#include "mpst/parser.hpp"
#include "mpst/projection.hpp"

namespace testing {

inline mpst::Global parse(const std::string& text) {
  auto r = mpst::parseGlobal(text);
  REQUIRE_MESSAGE(r.ok(), (r.ok() ? "" : r.error().describe()));
  return r.value();
}

inline mpst::Global example(const std::string& name) {
  auto e = mpst::findExample(name);
  REQUIRE_MESSAGE(e.has_value(), "no bundled example " << name);
  return e->global;
}

inline mpst::LocalsMap locals(const mpst::Global& g, const mpst::SemanticsConfig& c) {
  auto r = mpst::projectAll(g, c);
  REQUIRE_MESSAGE(r.ok(), (r.ok() ? "" : r.error().message));
  return r.value();
}

inline mpst::Participant P(const char* n) { return mpst::Participant(n); }

inline const char* kWorkers =
    "controller->worker_A:Work ; controller->worker_B:Work ; (worker_A->controller:Done || worker_B->controller:Done)";
inline const char* kRecursive = "rec X . controller->worker:{Work ; worker->controller:Done ; X, Quit}";
inline const char* kParallel = "pA->pB:TaskA || pA->pB:TaskB";
inline const char* kBranching = "(pA->pB:TaskA ; pB->pC:TaskA) + (pA->pB:TaskB ; pB->pC:TaskB)";
inline const char* kKleene = "(c->w:Work ; w->c:Done)*";

}  // namespace testing
