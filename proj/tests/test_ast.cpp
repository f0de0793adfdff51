#include <stdexcept>

#include "helpers.hpp"
#include "mpst/ast.hpp"

using namespace mpst;
using namespace testing;

TEST_SUITE("ast") {
  TEST_CASE("participants of the controller examples") {
    CHECK(participants(Global::skip()).empty());
    CHECK(participants(parse(kRecursive)) == std::set{P("controller"), P("worker")});
    CHECK(participants(parse(kWorkers)) == std::set{P("controller"), P("worker_A"), P("worker_B")});
  }

  TEST_CASE("comm collects one triple per branch") {
    CHECK(comm(Global::skip()).empty());
    auto g = parse("c->wA:Work ; c->wB:Work ; (wA->c:Done || wB->c:Done)");
    std::set<CommTriple> expected{{P("c"), P("wA"), Label("Work")},
                                  {P("c"), P("wB"), Label("Work")},
                                  {P("wA"), P("c"), Label("Done")},
                                  {P("wB"), P("c"), Label("Done")}};
    CHECK(comm(g) == expected);
    CHECK(comm(parse("a->b:{x;skip, y;skip}")) ==
          std::set<CommTriple>{{P("a"), P("b"), Label("x")}, {P("a"), P("b"), Label("y")}});
  }

  TEST_CASE("terminated") {
    auto send = Local::send(P("c"), P("w"), {{Label("Work"), Local::skip()}});
    auto recv = Local::recv(P("w"), P("c"), {{Label("Work"), Local::skip()}});
    CHECK(terminated(Local::skip()));
    CHECK(terminated(Local::star(send)));
    CHECK_FALSE(terminated(Local::seq(Local::skip(), recv)));
    CHECK(terminated(Local::choice(send, Local::skip())));
    CHECK_FALSE(terminated(Local::par(send, Local::skip())));
    CHECK_FALSE(terminated(Local::rec(RecVar("X"), Local::seq(send, Local::var(RecVar("X"))))));
    CHECK(terminated(Local::rec(RecVar("X"), Local::choice(Local::var(RecVar("X")), Local::skip()))));
    CHECK_THROWS_AS(terminated(Local::var(RecVar("Y"))), std::invalid_argument);
    CHECK_FALSE(terminated(Local::var(RecVar("Y")), {RecVar("Y")}));
  }

  TEST_CASE("local participants") {
    CHECK(participants(Local::skip()).empty());
    auto send = Local::send(P("c"), P("w"), {{Label("Work"), Local::skip()}});
    CHECK(participants(send) == std::set{P("c"), P("w")});
  }

  TEST_CASE("branch order does not affect equality or keys") {
    auto a = parse("a->b:{x ; c->d:m, y}");
    auto b = parse("a->b:{y, x ; c->d:m}");
    CHECK(a == b);
    CHECK(canonicalKey(a) == canonicalKey(b));
    CHECK_FALSE(a == parse("a->b:{x, y}"));
    CHECK(canonicalKey(a) != canonicalKey(parse("a->b:{x, y}")));
  }

  TEST_CASE("skip-identity constructors") {
    auto send = Local::send(P("c"), P("w"), {{Label("Work"), Local::skip()}});
    CHECK(sequence(Local::skip(), send) == send);
    CHECK(sequence(send, Local::skip()) == send);
    CHECK(parallel(Local::skip(), send) == send);
    CHECK(alternative(send, send) == send);
    CHECK(alternative(send, Local::skip()).is<local::Choice>());
  }

  TEST_CASE("free variables") {
    CHECK(freeVars(parse("rec X . a->b:m ; X")).empty());
    CHECK(freeVars(parse("a->b:m ; Y")) == std::set{RecVar("Y")});
  }

  TEST_CASE("identifiers") {
    CHECK(isIdentifier("worker_A"));
    CHECK(isIdentifier("_x1"));
    CHECK_FALSE(isIdentifier("1x"));
    CHECK_FALSE(isIdentifier(""));
    CHECK_FALSE(isIdentifier("a-b"));
  }
}
