#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "helpers.hpp"

using namespace testing;

namespace {

struct Run {
  int code;
  std::string out;
};

// Shell-quotes with single quotes.
std::string quote(const std::string& s) {
  std::string q = "'";
  for (char ch : s) q += ch == '\'' ? std::string("'\\''") : std::string(1, ch);
  return q + "'";
}

Run cli(const std::string& args, const std::string& input = {}) {
  std::string cmd = quote(MPST_CLI) + " " + args + " 2>&1";
  if (!input.empty()) {
    std::ofstream("cli-input.txt") << input;
    cmd += " < cli-input.txt";
  }
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (auto n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string sessionFile(const std::string& name, const std::string& text) {
  std::ofstream(name) << text << "\n";
  return name;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("check") {
    auto f = sessionFile("kleene.mpst", kKleene);
    auto bad = cli("check " + f + " --preset VeryGentleIntroMPST");
    CHECK(bad.code == 1);
    CHECK(bad.out.find("KleeneStarForbidden") != std::string::npos);
    CHECK(cli("check " + f + " --preset VeryGentleIntroMPST --allow-star").code == 0);
    CHECK(cli("check missing-file.mpst").code == 2);
    CHECK(cli("check").code == 2);
    auto parseErr = cli("check " + sessionFile("broken.mpst", "a->b:"));
    CHECK(parseErr.code == 2);
  }

  TEST_CASE("project") {
    auto ok = cli("project --example \"controller-workers\"");
    CHECK(ok.code == 0);
    CHECK(ok.out ==
          "controller: worker_A!Work ; worker_B!Work ; (worker_A?Done || worker_B?Done)\n"
          "worker_A: controller?Work ; controller!Done\n"
          "worker_B: controller?Work ; controller!Done\n");
    auto plain = cli("project --example \"simple branching\" --merge plain");
    CHECK(plain.code == 1);
    CHECK(plain.out.find("[Plain Merge] - projection undefined for [pC]") != std::string::npos);
    CHECK(cli("project --example nope").code == 2);
  }

  TEST_CASE("run") {
    auto args = "run --example \"recursive controller-worker (short names)\" --preset GentleIntroMPAsyncST";
    auto clean = cli(std::string(args) + " --trace cw!Quit,cw?Quit");
    CHECK(clean.code == 0);
    CHECK(clean.out.find("terminal: clean") != std::string::npos);
    CHECK(cli(std::string(args) + " --trace cw?Quit").code == 1);
    auto interactive = cli(std::string(args) + " --interactive", "1\n");
    CHECK(interactive.code == 0);
  }

  TEST_CASE("lts, msc and local automata") {
    auto lts = cli("lts --example \"parallel task delegation\" --preset APIGenInScala3");
    CHECK(lts.code == 0);
    CHECK(lts.out == "10 states, 12 edges\n");
    auto dot = cli("lts --example \"parallel task delegation\" --dot -");
    CHECK(dot.out.rfind("digraph lts {", 0) == 0);
    auto msc = cli("msc --example \"kleene controller-worker\"");
    CHECK(msc.code == 0);
    CHECK(msc.out.rfind("sequenceDiagram\n", 0) == 0);
    auto fsm = cli("locals-fsm --example \"recursive controller-worker\" --dot-dir fsm-out");
    CHECK(fsm.code == 0);
    CHECK(std::ifstream("fsm-out/worker.dot").good());
  }

  TEST_CASE("bisim") {
    auto f = "--example \"parallel task delegation\"";
    auto same = cli(std::string("bisim ") + f + " --a APIGenInScala3 --b ST4MP");
    CHECK(same.code == 0);
    CHECK(same.out.find("bisimilar") != std::string::npos);
    auto diff = cli(std::string("bisim ") + f + " --a APIGenInScala3 --b UnorderedChoreo");
    CHECK(diff.code == 1);
    CHECK(diff.out.find("notBisimilar") != std::string::npos);
    auto json = cli(std::string("bisim ") + f + " --a APIGenInScala3 --b UnorderedChoreo --json");
    auto j = nlohmann::json::parse(json.out);
    CHECK(j["payload"]["result"] == "notBisimilar");
    CHECK(cli(std::string("bisim ") + f + " --a Nope --b ST4MP").code == 2);
    CHECK(cli(std::string("bisim ") + f + " --a ST4MP:commModel=unorderedAsync --b UnorderedChoreo").code == 0);
  }

  TEST_CASE("bridge over standard input") {
    auto r = cli("bridge", "{\"op\":\"presets\"}\n{bad\n");
    CHECK(r.code == 0);
    auto nl = r.out.find('\n');
    REQUIRE(nl != std::string::npos);
    CHECK(nlohmann::json::parse(r.out.substr(0, nl))["ok"] == true);
    CHECK(nlohmann::json::parse(r.out.substr(nl + 1))["error"]["kind"] == "MalformedRequest");
  }

  TEST_CASE("examples") {
    auto list = cli("examples");
    CHECK(list.code == 0);
    CHECK(list.out.find("kleene ambiguity\n") != std::string::npos);
    CHECK(cli("examples --show \"simple branching\"").code == 0);
    CHECK(cli("--help").code == 0);
    CHECK(cli("frobnicate").code == 2);
  }
}
