#include "helpers.hpp"
#include "mpst/wellformed.hpp"

using namespace mpst;
using namespace testing;

namespace {

std::vector<ViolationKind> kinds(const CheckReport& r) {
  std::vector<ViolationKind> out;
  for (const auto& v : r.violations) out.push_back(v.kind);
  return out;
}

using VK = ViolationKind;

}  // namespace

TEST_SUITE("wellformed") {
  TEST_CASE("core checks") {
    CHECK(kinds(checkCore(parse("a->a:m"))) == std::vector{VK::SelfCommunication});
    CHECK(kinds(checkCore(parse("a->b:{m;skip, m;skip}"))) == std::vector{VK::DuplicateLabels});
    CHECK(kinds(checkCore(parse("rec X . X"))) == std::vector{VK::UnguardedRecursion});
    CHECK(kinds(checkCore(parse("a->b:m ; X"))) == std::vector{VK::UnboundVariable});
    CHECK(kinds(checkCore(parse("rec X . (a->b:m)* ; X"))) == std::vector{VK::UnguardedRecursion});
    CHECK(kinds(checkCore(parse("(skip)*"))) == std::vector{VK::UnguardedRecursion});
    CHECK(checkCore(parse(kRecursive)).ok());
    CHECK(checkCore(parse(kWorkers)).ok());
    CHECK(checkCore(parse("rec X . a->b:m ; X")).ok());
    CHECK(checkCore(parse("rec X . a->b:{m ; X, n}")).ok());
  }

  TEST_CASE("violations aggregate and sort by kind") {
    auto r = checkCore(parse("a->a:m ; b->c:{x, x} ; Y"));
    CHECK(kinds(r) == std::vector{VK::SelfCommunication, VK::DuplicateLabels, VK::UnboundVariable});
  }

  TEST_CASE("gating names every participant of the construct") {
    auto r = checkGatingGlobal(parse(kKleene), preset(PresetId::VeryGentleIntroMPST));
    REQUIRE(r.violations.size() == 1);
    CHECK((r.violations[0].kind == VK::KleeneStarForbidden));
    CHECK(r.violations[0].subjects == std::vector{P("c"), P("w")});
    CHECK(r.violations[0].message == "Recursion Kleene Star - present on participant [c, w]");

    auto par = checkGatingGlobal(parse(kWorkers), preset(PresetId::GentleIntroMPAsyncST));
    CHECK(kinds(par) == std::vector{VK::ParallelForbidden});
    CHECK(checkGatingGlobal(parse(kRecursive), preset(PresetId::ST4MP)).ok());
    auto rec = checkGatingGlobal(parse(kRecursive), preset(PresetId::APIGenInScala3));
    CHECK(kinds(rec) == std::vector{VK::FixedPointForbidden});
  }

  TEST_CASE("local gating") {
    SemanticsConfig noStar;
    noStar.allowKleeneStar = false;
    auto ls = locals(parse(kKleene), SemanticsConfig{});
    auto r = checkGatingLocal(ls.at(P("c")), noStar);
    REQUIRE(r.violations.size() == 1);
    CHECK((r.violations[0].kind == VK::KleeneStarForbidden));
    CHECK(r.violations[0].subjects == std::vector{P("c")});
    CHECK(r.violations[0].message == "Recursion Kleene Star - present on participant [c]");

    CHECK(checkGatingLocal(Local::skip(), preset(PresetId::APIGenInScala3)).ok());

    SemanticsConfig noRec;
    noRec.allowFixedPoint = false;
    auto ex = locals(parse(kRecursive), SemanticsConfig{});
    auto fp = checkGatingLocal(ex.at(P("controller")), noRec);
    REQUIRE(fp.violations.size() == 1);
    CHECK((fp.violations[0].kind == VK::FixedPointForbidden));
    CHECK(fp.violations[0].subjects == std::vector{P("controller")});
  }

  TEST_CASE("well-channelled") {
    auto r = checkWellChannelled(parse("a->b:m || a->b:m"));
    REQUIRE(r.violations.size() == 1);
    CHECK((r.violations[0].kind == VK::NotWellChannelled));
    CHECK(r.violations[0].message.find("(a,b,m)") != std::string::npos);
    CHECK(checkWellChannelled(parse(kWorkers)).ok());
    CHECK(checkWellChannelled(parse(kParallel)).ok());
  }

  TEST_CASE("well-branched") {
    CHECK(checkWellBranched(parse(kBranching)).ok());
    CHECK(kinds(checkWellBranched(parse("(a->b:m ; skip) + (c->d:m ; skip)"))) == std::vector{VK::NotWellBranched});
    CHECK(kinds(checkWellBranched(parse("(a->b:m) + (a->b:m)"))) == std::vector{VK::NotWellBranched});
    CHECK(kinds(checkWellBranched(parse("skip + a->b:m"))) == std::vector{VK::NotWellBranched});
  }

  TEST_CASE("checkAll applies requirements from the configuration") {
    auto g = parse("(a->b:m || a->b:m) + c->d:n");
    SemanticsConfig c;
    CHECK(checkAll(g, c).ok());
    c.requireWellChannelled = true;
    c.requireWellBranched = true;
    CHECK(kinds(checkAll(g, c)) == std::vector{VK::NotWellChannelled, VK::NotWellBranched});
    c.allowParallel = false;
    CHECK(kinds(checkAll(g, c)) == std::vector{VK::ParallelForbidden, VK::NotWellChannelled, VK::NotWellBranched});
  }

  TEST_CASE("firstComms and terminable") {
    auto g = parse("(a->b:m)* ; c->d:n");
    CHECK(firstComms(g) == std::set<CommTriple>{{P("a"), P("b"), Label("m")}, {P("c"), P("d"), Label("n")}});
    CHECK(terminable(parse("(a->b:m)*")));
    CHECK_FALSE(terminable(parse("a->b:m")));
  }
}
