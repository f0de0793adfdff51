#include <random>

#include "generators.hpp"
#include "helpers.hpp"
#include "mpst/equivalence.hpp"
#include "mpst/render.hpp"
#include "mpst/wellformed.hpp"

using namespace mpst;
using namespace testing;

namespace {

constexpr int kRoundTrips = 1500;
constexpr int kProjections = 600;
constexpr int kMerges = 1000;

// Every action in `l` is performed by `self`.
bool ownedBy(const Local& l, const Participant& self) {
  auto all = [&](auto&&... ls) { return (ownedBy(ls, self) && ...); };
  if (const auto* a = l.as<local::Action>()) {
    if (a->self != self) return false;
    for (const auto& b : a->branches)
      if (!ownedBy(b.cont, self)) return false;
    return true;
  }
  if (const auto* s = l.as<local::Seq>()) return all(s->first, s->second);
  if (const auto* p = l.as<local::Par>()) return all(p->left, p->right);
  if (const auto* c = l.as<local::Choice>()) return all(c->left, c->right);
  if (const auto* r = l.as<local::Rec>()) return all(r->body);
  if (const auto* s = l.as<local::Star>()) return all(s->body);
  return true;
}

// Rewrites some single-branch actions `p?{t ; L}` into the shorthand `p?t ; L`.
Local reshape(const Local& l, std::mt19937& rng) {
  auto again = [&](const Local& x) { return reshape(x, rng); };
  if (const auto* a = l.as<local::Action>()) {
    if (a->branches.size() == 1 && !a->branches[0].cont.is<local::Skip>() && rng() % 2)
      return Local::seq(Local::action(a->dir, a->self, a->peer, {{a->branches[0].label, Local::skip()}}),
                        again(a->branches[0].cont));
    std::vector<local::Branch> bs;
    for (const auto& b : a->branches) bs.push_back({b.label, again(b.cont)});
    return Local::action(a->dir, a->self, a->peer, bs);
  }
  if (const auto* s = l.as<local::Seq>()) return Local::seq(again(s->first), again(s->second));
  if (const auto* p = l.as<local::Par>()) return Local::par(again(p->left), again(p->right));
  if (const auto* c = l.as<local::Choice>()) return Local::choice(again(c->left), again(c->right));
  if (const auto* r = l.as<local::Rec>()) return Local::rec(r->var, again(r->body));
  if (const auto* s = l.as<local::Star>()) return Local::star(again(s->body));
  return l;
}

void plainImpliesFull(const std::vector<Local>& ls) {
  auto plain = merge(ls, MergeCriterion::Plain);
  if (!plain.ok()) return;
  auto full = merge(ls, MergeCriterion::Full);
  REQUIRE(full.ok());
  CHECK(printLocal(full.value(), LocalStyle::Explicit) == printLocal(plain.value(), LocalStyle::Explicit));
}

std::vector<Lts> bundledLtss() {
  std::vector<Lts> out;
  for (const auto& e : bundledExamples()) {
    auto r = projectAll(e.global, {});
    if (!r.ok()) continue;
    for (auto m : {CommModel::Synchronous, CommModel::OrderedAsync, CommModel::UnorderedAsync}) {
      SemanticsConfig c;
      c.commModel = m;
      out.push_back(buildLts(r.value(), c));
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("parser round-trip on generated syntax") {
    std::mt19937 rng(20240601);
    int checked = 0;
    for (int i = 0; i < kRoundTrips; ++i) {
      Global g = i % 2 ? gen::anyGlobal(rng) : gen::protocolGlobal(rng);
      auto text = printGlobal(g);
      auto back = parseGlobal(text);
      REQUIRE_MESSAGE(back.ok(), text);
      CHECK_MESSAGE(back.value() == g, text);
      CHECK(printGlobal(back.value()) == text);
      ++checked;
    }
    CHECK(checked >= 1000);
  }

  TEST_CASE("projection is performed by its own participant") {
    std::mt19937 rng(99);
    int defined = 0;
    for (int i = 0; i < kProjections; ++i) {
      Global g = gen::protocolGlobal(rng);
      if (!checkCore(g).ok()) continue;
      for (auto crit : {MergeCriterion::Plain, MergeCriterion::Full}) {
        SemanticsConfig c;
        c.merge = crit;
        auto r = projectAll(g, c);
        if (!r.ok()) continue;
        ++defined;
        CHECK(r.value().size() == participants(g).size());
        for (const auto& [p, l] : r.value()) CHECK_MESSAGE(ownedBy(l, p), printGlobal(g));
        CHECK(terminated(project(g, Participant("outsider"), c).value()));
      }
    }
    for (const auto& e : bundledExamples()) {
      auto r = projectAll(e.global, {});
      if (!r.ok()) continue;
      for (const auto& [p, l] : r.value()) CHECK(ownedBy(l, p));
    }
    CHECK(defined > 100);
  }

  TEST_CASE("plain merge defined implies full merge defined and equal") {
    std::mt19937 rng(5);
    const Participant self("p0");
    for (int i = 0; i < kMerges; ++i) {
      Local l = gen::anyLocal(rng, self, 3);
      plainImpliesFull({l, l});
      plainImpliesFull({l, reshape(l, rng)});
      plainImpliesFull({l, gen::anyLocal(rng, self, 2)});
      plainImpliesFull({l, l, reshape(l, rng)});
    }
    // The same property at the level of whole projections.
    for (int i = 0; i < kProjections; ++i) {
      Global g = gen::protocolGlobal(rng);
      if (!checkCore(g).ok()) continue;
      SemanticsConfig plain;
      plain.merge = MergeCriterion::Plain;
      auto p = projectAll(g, plain);
      if (!p.ok()) continue;
      auto f = projectAll(g, SemanticsConfig{});
      REQUIRE_MESSAGE(f.ok(), printGlobal(g));
      for (const auto& [r, l] : p.value()) CHECK(f.value().at(r) == l);
    }
  }

  TEST_CASE("bisimulation is reflexive and symmetric on bundled systems") {
    auto ltss = bundledLtss();
    REQUIRE_FALSE(ltss.empty());
    for (std::size_t i = 0; i < ltss.size(); ++i) {
      CHECK(branchingBisim(ltss[i], ltss[i]).result == BisimResult::Bisimilar);
      for (std::size_t j = 0; j < ltss.size(); ++j) {
        auto ab = branchingBisim(ltss[i], ltss[j]);
        auto ba = branchingBisim(ltss[j], ltss[i]);
        CHECK(ab.result == ba.result);
        CHECK((ab.result == BisimResult::Bisimilar) == strongBisimilar(ltss[i], ltss[j]));
      }
    }
  }

  TEST_CASE("renders are deterministic") {
    std::mt19937 rng(3);
    for (int i = 0; i < 200; ++i) {
      Global g = gen::protocolGlobal(rng);
      CHECK(renderMsc(g) == renderMsc(Global(g)));
    }
    for (const auto& e : bundledExamples()) {
      auto r = projectAll(e.global, {});
      if (!r.ok()) continue;
      CHECK(renderCompositionalFsm(buildLts(r.value(), {})) == renderCompositionalFsm(buildLts(r.value(), {})));
    }
  }
}
