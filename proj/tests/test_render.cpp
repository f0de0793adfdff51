#include "helpers.hpp"
#include "mpst/render.hpp"

using namespace mpst;
using namespace testing;

TEST_SUITE("render") {
  TEST_CASE("sequence diagram with a parallel block") {
    CHECK(renderMsc(parse(kWorkers)) ==
          "sequenceDiagram\n"
          "    participant controller\n"
          "    participant worker_A\n"
          "    participant worker_B\n"
          "    controller->>worker_A: Work\n"
          "    controller->>worker_B: Work\n"
          "    par\n"
          "        worker_A->>controller: Done\n"
          "    and\n"
          "        worker_B->>controller: Done\n"
          "    end\n");
  }

  TEST_CASE("branches, loops and stars") {
    CHECK(renderMsc(parse("rec X . c->w:{Work ; w->c:Done ; X, Quit}")) ==
          "sequenceDiagram\n"
          "    participant c\n"
          "    participant w\n"
          "    loop X\n"
          "        alt Work\n"
          "            c->>w: Work\n"
          "            w->>c: Done\n"
          "            %% continue X\n"
          "        else Quit\n"
          "            c->>w: Quit\n"
          "        end\n"
          "    end\n");
    CHECK(renderMsc(parse("(c->w:Work)* ; c->w:Bye")) ==
          "sequenceDiagram\n"
          "    participant c\n"
          "    participant w\n"
          "    loop zero or more times\n"
          "        c->>w: Work\n"
          "    end\n"
          "    c->>w: Bye\n");
    auto choice = renderMsc(parse(kBranching));
    CHECK(choice.find("    alt\n        pA->>pB: TaskA\n        pB->>pC: TaskA\n    else\n") != std::string::npos);
    CHECK(renderMsc(parse("skip")) == "sequenceDiagram\n");
  }

  TEST_CASE("participants in order of first appearance") {
    auto doc = renderMsc(parse("z->a:m ; a->m:n"));
    CHECK(doc.rfind("sequenceDiagram\n    participant z\n    participant a\n    participant m\n", 0) == 0);
  }

  TEST_CASE("composed automaton") {
    SemanticsConfig c;
    auto lts = buildLts(locals(parse("rec X . c->w:{Work ; w->c:Done ; X, Quit}"), c), c);
    CHECK(renderCompositionalFsm(lts) ==
          "digraph lts {\n"
          "  rankdir=LR;\n"
          "  __init [shape=point];\n"
          "  s0 [label=\"0\", shape=circle];\n"
          "  s1 [label=\"1\", shape=doublecircle];\n"
          "  s2 [label=\"2\", shape=circle];\n"
          "  __init -> s0;\n"
          "  s0 -> s1 [label=\"c→w:Quit\"];\n"
          "  s0 -> s2 [label=\"c→w:Work\"];\n"
          "  s2 -> s0 [label=\"w→c:Done\"];\n"
          "}\n");
  }

  TEST_CASE("stuck states and truncation") {
    LocalsMap waiting{{P("a"), Local::recv(P("a"), P("b"), {{Label("m"), Local::skip()}})}};
    SemanticsConfig c;
    CHECK(renderCompositionalFsm(buildLts(waiting, c)).find("s0 [label=\"0\", shape=diamond];") != std::string::npos);

    c.commModel = CommModel::OrderedAsync;
    c.explorationMaxStates = 3;
    LocalsMap producer{{P("a"), locals(parse("rec X . a->b:m ; X"), c).at(P("a"))}};
    auto dot = renderCompositionalFsm(buildLts(producer, c));
    CHECK(dot.find("overflow [label=\"…\", style=dashed];") != std::string::npos);
    CHECK(dot.find("-> overflow [style=dashed];") != std::string::npos);
  }

  TEST_CASE("local automata") {
    auto w = locals(parse(kRecursive), {}).at(P("worker"));
    auto dot = renderLocalFsm(P("worker"), w);
    CHECK(dot.rfind("digraph \"worker\" {\n  rankdir=LR;\n  __init [shape=point];\n", 0) == 0);
    CHECK(dot.find("tooltip=") != std::string::npos);
    CHECK(dot.find("[label=\"controllerworker?Work\"]") != std::string::npos);
    CHECK(dot == renderLocalFsm(exploreLocal(P("worker"), w)));
  }

  TEST_CASE("renders are byte-identical across runs") {
    for (const auto& e : bundledExamples()) {
      CAPTURE(e.name);
      CHECK(renderMsc(e.global) == renderMsc(e.global));
      auto r = projectAll(e.global, {});
      if (!r.ok()) continue;
      auto l1 = buildLts(r.value(), {});
      auto l2 = buildLts(r.value(), {});
      CHECK(renderCompositionalFsm(l1) == renderCompositionalFsm(l2));
      for (const auto& [p, l] : r.value()) CHECK(renderLocalFsm(p, l) == renderLocalFsm(p, l));
    }
  }
}
