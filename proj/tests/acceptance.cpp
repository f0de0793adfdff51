// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "generators.hpp"
#include "mpst/catalog.hpp"
#include "mpst/equivalence.hpp"
#include "mpst/parser.hpp"
#include "mpst/projection.hpp"
#include "mpst/render.hpp"
#include "mpst/semantics.hpp"
#include "mpst/wellformed.hpp"
#include "oracle.hpp"

using namespace mpst;

namespace {

// Pinned bounds.
constexpr std::size_t kOracleDepth = 8;
constexpr std::size_t kExpectedDepthBound = 100;
constexpr int kRoundTrips = 1000;
constexpr int kGenerated = 500;
constexpr std::size_t kRecursiveStates = 3;

struct Failure {
  std::string why;
};

void expect(bool cond, const std::string& why) {
  if (!cond) throw Failure{why};
}

Global parse(const std::string& text) {
  auto r = parseGlobal(text);
  if (!r) throw Failure{"parse error in " + text + ": " + r.error().describe()};
  return r.value();
}

LocalsMap project(const Global& g, const SemanticsConfig& c) {
  auto r = projectAll(g, c);
  if (!r) throw Failure{"projection failed: " + r.error().message};
  return r.value();
}

Participant P(const char* n) { return Participant(n); }

Local renameSelf(const Local& l, const Participant& to) {
  auto again = [&](const Local& x) { return renameSelf(x, to); };
  if (const auto* a = l.as<local::Action>()) {
    std::vector<local::Branch> bs;
    for (const auto& b : a->branches) bs.push_back({b.label, again(b.cont)});
    return Local::action(a->dir, to, a->peer, bs);
  }
  if (const auto* s = l.as<local::Seq>()) return Local::seq(again(s->first), again(s->second));
  if (const auto* p = l.as<local::Par>()) return Local::par(again(p->left), again(p->right));
  if (const auto* c = l.as<local::Choice>()) return Local::choice(again(c->left), again(c->right));
  if (const auto* r = l.as<local::Rec>()) return Local::rec(r->var, again(r->body));
  if (const auto* s = l.as<local::Star>()) return Local::star(again(s->body));
  return l;
}

bool ownedBy(const Local& l, const Participant& self) {
  if (const auto* a = l.as<local::Action>()) {
    if (a->self != self) return false;
    return std::all_of(a->branches.begin(), a->branches.end(), [&](const auto& b) { return ownedBy(b.cont, self); });
  }
  if (const auto* s = l.as<local::Seq>()) return ownedBy(s->first, self) && ownedBy(s->second, self);
  if (const auto* p = l.as<local::Par>()) return ownedBy(p->left, self) && ownedBy(p->right, self);
  if (const auto* c = l.as<local::Choice>()) return ownedBy(c->left, self) && ownedBy(c->right, self);
  if (const auto* r = l.as<local::Rec>()) return ownedBy(r->body, self);
  if (const auto* s = l.as<local::Star>()) return ownedBy(s->body, self);
  return true;
}

SemanticsConfig withModel(CommModel m) {
  SemanticsConfig c;
  c.commModel = m;
  return c;
}

const char* kWorkers =
    "controller->worker_A:Work ; controller->worker_B:Work ; (worker_A->controller:Done || worker_B->controller:Done)";
const char* kRecursive = "rec X . controller->worker:{Work ; worker->controller:Done ; X, Quit}";
const char* kBranching = "(pA->pB:TaskA ; pB->pC:TaskA) + (pA->pB:TaskB ; pB->pC:TaskB)";
const char* kKleene = "(c->w:Work ; w->c:Done)*";
const char* kParallel = "pA->pB:TaskA || pA->pB:TaskB";

std::string criterion1() {
  auto ls = project(parse(kWorkers), SemanticsConfig{});
  expect(ls.size() == 3, "expected three locals");
  expect(printLocal(ls.at(P("controller"))) == "worker_A!Work ; worker_B!Work ; (worker_A?Done || worker_B?Done)",
         "controller local differs");
  expect(printLocal(ls.at(P("worker_A"))) == "controller?Work ; controller!Done", "worker_A local differs");
  expect(renameSelf(ls.at(P("worker_A")), P("w")) == renameSelf(ls.at(P("worker_B")), P("w")),
         "worker_A and worker_B are not the same shape");
  auto rec = project(parse(kRecursive), SemanticsConfig{});
  expect(printLocal(rec.at(P("controller"))) == "rec X . worker!{Work ; worker?Done ; X, Quit}",
         "recursive controller differs");
  expect(printLocal(rec.at(P("worker"))) == "rec X . controller?{Work ; controller!Done ; X, Quit}",
         "recursive worker differs");
  return "controller/worker_A/worker_B and recursive controller/worker match";
}

std::string criterion2() {
  SemanticsConfig plain;
  plain.merge = MergeCriterion::Plain;
  auto p = projectAll(parse(kBranching), plain);
  expect(!p.ok(), "plain merge unexpectedly succeeded");
  expect(p.error().participant == P("pC"), "plain merge failed on the wrong participant");
  expect(p.error().message.find("[Plain Merge] - projection undefined for [pC]") != std::string::npos,
         "message: " + p.error().message);
  SemanticsConfig full;
  full.merge = MergeCriterion::Full;
  auto f = project(parse(kBranching), full);
  expect(f.size() == 3, "full merge: expected three locals");
  expect(printLocal(f.at(P("pC"))) == "(pB?TaskA + pB?TaskB)", "pC prints as " + printLocal(f.at(P("pC"))));
  return "plain fails for pC, full gives (pB?TaskA + pB?TaskB)";
}

std::string criterion3() {
  auto g = parse(kKleene);
  auto c = preset(PresetId::VeryGentleIntroMPST);
  auto r = checkAll(g, c);
  expect(r.has(ViolationKind::KleeneStarForbidden), "no KleeneStarForbidden violation");
  bool namesC = false;
  for (const auto& v : r.violations)
    if (v.kind == ViolationKind::KleeneStarForbidden)
      namesC = namesC || std::find(v.subjects.begin(), v.subjects.end(), P("c")) != v.subjects.end();
  expect(namesC, "violation does not name c");
  c.allowKleeneStar = true;
  expect(!checkAll(g, c).has(ViolationKind::KleeneStarForbidden), "violation persists with Kleene star enabled");
  return "KleeneStarForbidden names c; enabling the star clears it";
}

std::string criterion4() {
  auto build = [](PresetId id) {
    auto c = preset(id);
    return buildLts(project(parse(kParallel), c), c);
  };
  for (auto id : kAllPresets) expect(preset(id).bisimDepthBound == kExpectedDepthBound, "depth bound is not 100");
  auto api = build(PresetId::APIGenInScala3);
  auto st = build(PresetId::ST4MP);
  auto un = build(PresetId::UnorderedChoreo);
  auto depth = preset(PresetId::APIGenInScala3).bisimDepthBound;
  auto same = branchingBisim(api, st, depth);
  expect(same.result == BisimResult::Bisimilar, "APIGenInScala3 vs ST4MP not bisimilar");
  expect(strongBisimilar(api, st), "cross-check disagrees on APIGenInScala3 vs ST4MP");
  auto diff = branchingBisim(api, un, depth);
  expect(diff.result == BisimResult::NotBisimilar, "APIGenInScala3 vs UnorderedChoreo not refuted");
  expect(diff.evidence.has_value(), "no evidence");
  verifyEvidence(api, un, *diff.evidence);
  // Replay against the reference traces of both sides.
  oracle::Trace path(diff.evidence->path.begin(), diff.evidence->path.end());
  auto ta = oracle::traces(api, path.size());
  auto tu = oracle::traces(un, path.size());
  const bool inA = ta.count(path) > 0, inU = tu.count(path) > 0;
  expect(inA != inU, "evidence path is not a trace of exactly one side");
  expect(diff.evidence->refusingSide == (inA ? Side::B : Side::A), "refusing side is wrong");
  expect(!strongBisimilar(api, un), "cross-check disagrees on APIGenInScala3 vs UnorderedChoreo");
  std::string printed;
  for (const auto& l : path) printed += (printed.empty() ? "" : " ") + l;
  return "bisimilar; notBisimilar with evidence [" + printed + "]; depth bound 100";
}

std::string criterion5() {
  auto bad = projectAll(parse("(a->b:m ; b->c:mP)* ; c->d:mPP"), SemanticsConfig{});
  expect(!bad.ok(), "ambiguous loop projected");
  expect(bad.error().kind == ProjectionErrorKind::KPViolation, "error is not a KP violation");
  expect(bad.error().participant == P("c"), "KP violation does not name c");
  auto good = projectAll(parse(kKleene), SemanticsConfig{});
  expect(good.ok(), "kleene controller-worker does not project");
  return "KP violation for c; (c->w:Work ; w->c:Done)* projects";
}

std::string criterion6() {
  int compared = 0;
  for (const auto& e : bundledExamples()) {
    auto r = projectAll(e.global, SemanticsConfig{});
    if (!r.ok()) continue;  // not a runnable session (KP or merge failure)
    std::set<oracle::Trace> ordered, unordered;
    for (auto m : {CommModel::Synchronous, CommModel::OrderedAsync, CommModel::UnorderedAsync}) {
      auto lts = buildLts(r.value(), withModel(m));
      expect(!lts.truncated, e.name + ": truncated");
      auto got = oracle::traces(lts, kOracleDepth);
      auto want = oracle::traces(r.value(), m, kOracleDepth);
      expect(got == want, e.name + ": traces differ under " + std::string(toString(m)));
      if (m == CommModel::OrderedAsync) ordered = got;
      if (m == CommModel::UnorderedAsync) unordered = got;
      ++compared;
    }
    expect(std::includes(unordered.begin(), unordered.end(), ordered.begin(), ordered.end()),
           e.name + ": ordered traces not included in unordered");
  }
  expect(compared > 0, "nothing compared");
  return std::to_string(compared) + " example/model pairs agree to depth 8; ordered included in unordered";
}

std::string criterion7() {
  std::mt19937 rng(1234);
  for (int i = 0; i < kRoundTrips; ++i) {
    Global g = i % 2 ? gen::anyGlobal(rng) : gen::protocolGlobal(rng);
    auto text = printGlobal(g);
    auto back = parseGlobal(text);
    expect(back.ok() && back.value() == g, "round-trip failed for " + text);
  }
  int projected = 0;
  for (int i = 0; i < kGenerated; ++i) {
    Global g = gen::protocolGlobal(rng);
    if (!checkCore(g).ok()) continue;
    SemanticsConfig plain;
    plain.merge = MergeCriterion::Plain;
    auto p = projectAll(g, plain);
    auto f = projectAll(g, SemanticsConfig{});
    if (p.ok()) {
      expect(f.ok(), "plain defined but full undefined for " + printGlobal(g));
      for (const auto& [r, l] : p.value()) expect(f.value().at(r) == l, "plain and full differ on " + printGlobal(g));
    }
    if (f.ok()) {
      ++projected;
      for (const auto& [r, l] : f.value()) expect(ownedBy(l, r), "foreign action in projection of " + printGlobal(g));
    }
  }
  for (int i = 0; i < kGenerated; ++i) {
    Local l = gen::anyLocal(rng, P("p0"), 3);
    Local m = gen::anyLocal(rng, P("p0"), 3);
    for (const auto& ls : {std::vector{l, l}, std::vector{l, m}}) {
      auto p = merge(ls, MergeCriterion::Plain);
      if (!p.ok()) continue;
      auto f = merge(ls, MergeCriterion::Full);
      expect(f.ok() && f.value() == p.value(), "plain merge defined, full merge not equal");
    }
  }
  std::vector<Lts> ltss;
  for (const auto& e : bundledExamples()) {
    auto r = projectAll(e.global, SemanticsConfig{});
    if (!r.ok()) continue;
    for (auto m : {CommModel::Synchronous, CommModel::OrderedAsync, CommModel::UnorderedAsync})
      ltss.push_back(buildLts(r.value(), withModel(m)));
    std::string first = renderMsc(e.global), second = renderMsc(e.global);
    expect(first == second, e.name + ": sequence diagram differs between runs");
    expect(renderCompositionalFsm(buildLts(r.value(), {})) == renderCompositionalFsm(buildLts(r.value(), {})),
           e.name + ": LTS render differs between runs");
    for (const auto& [p, l] : r.value())
      expect(renderLocalFsm(p, l) == renderLocalFsm(p, l), e.name + ": local automaton render differs");
  }
  for (const auto& x : ltss) {
    expect(branchingBisim(x, x).result == BisimResult::Bisimilar, "bisimulation not reflexive");
    for (const auto& y : ltss)
      expect(branchingBisim(x, y).result == branchingBisim(y, x).result, "bisimulation not symmetric");
  }
  return std::to_string(kRoundTrips) + " round-trips, " + std::to_string(projected) + " generated projections, " +
         std::to_string(ltss.size()) + " bundled LTSs";
}

std::string criterion8() {
  auto c = withModel(CommModel::Synchronous);
  auto ls = project(parse(kRecursive), c);
  auto lts = buildLts(ls, c);
  expect(lts.states.size() == kRecursiveStates, std::to_string(lts.states.size()) + " states");
  bool loops = false;
  for (const auto& e : lts.edges)
    if (e.label.label == Label("Done")) loops = loops || e.to == 0;
  expect(loops, "the Done edge does not return to the initial state");
  expect(oracle::traces(lts, kOracleDepth) == oracle::traces(ls, CommModel::Synchronous, kOracleDepth),
         "traces differ from the reference interpreter");
  return "3 states, Done returns to state 0, traces agree to depth 8";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<std::string()>>> criteria = {
      {"projection of the worker protocols", criterion1},
      {"plain and full merge on a branching session", criterion2},
      {"Kleene star gating", criterion3},
      {"parallel sends under three presets", criterion4},
      {"Kleene star projectability", criterion5},
      {"semantics against the reference interpreter", criterion6},
      {"property suites", criterion7},
      {"finite state space for tail recursion", criterion8},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, run] = criteria[i];
    std::string detail;
    bool pass = false;
    try {
      detail = run();
      pass = true;
    } catch (const Failure& f) {
      detail = f.why;
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    failed += pass ? 0 : 1;
    std::cout << (pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << name << ": " << detail << "\n";
  }
  return failed == 0 ? 0 : 1;
}
