// mpst: command-line front end for checking, projecting, executing and
// comparing multiparty session protocols.

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mpst/bridge.hpp"
#include "mpst/catalog.hpp"
#include "mpst/equivalence.hpp"
#include "mpst/parser.hpp"
#include "mpst/projection.hpp"
#include "mpst/render.hpp"
#include "mpst/semantics.hpp"
#include "mpst/server.hpp"
#include "mpst/wellformed.hpp"

namespace {

using namespace mpst;
using bridge::json;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

// Raised for missing files, parse errors and bad settings.
struct UsageError {
  std::string message;
  std::string kind = "BadRequest";
  int line = 0;
  int column = 0;
};

struct SessionArgs {
  std::string file;
  std::string example;
};

struct ConfigArgs {
  std::string preset;
  std::string merge;
  std::string comm;
  std::optional<bool> allowPar, allowRec, allowStar;
  bool wellBranched = false;
  bool wellChannelled = false;
  std::optional<std::size_t> maxStates, depth;
};

struct Loaded {
  std::string text;  // what the bridge is given in --json mode
  std::string name;  // selects an entry of a multi-example file
  Global global;
};

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError{"cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Loaded load(const SessionArgs& s) {
  if (s.file.empty() && s.example.empty()) throw UsageError{"give a session file or --example NAME"};
  Loaded out;
  out.text = s.file.empty() ? bundledSource() : readFile(s.file);
  auto parsed = parseSessionFile(out.text);
  if (!parsed) {
    const std::string where = s.file.empty() ? "bundled examples" : s.file;
    const auto& e = parsed.error();
    throw UsageError{where + ":" + e.describe(), "ParseError", e.line, e.column};
  }
  const auto& sessions = parsed.value();
  if (sessions.empty()) return out;
  if (s.example.empty()) {
    out.global = sessions.front().global;
    if (sessions.size() > 1) out.name = sessions.front().name;
    return out;
  }
  for (const auto& e : sessions)
    if (e.name == s.example) {
      out.name = e.name;
      out.global = e.global;
      return out;
    }
  throw UsageError{"no example named \"" + s.example + "\""};
}

SemanticsConfig presetOrDefault(const std::string& name) {
  if (name.empty()) return SemanticsConfig{};
  auto id = presetByName(name);
  if (!id) throw UsageError{"unknown preset " + name};
  return preset(*id);
}

void setMerge(SemanticsConfig& c, const std::string& v) {
  auto m = mergeFromString(v);
  if (!m) throw UsageError{"merge must be plain or full, not " + v};
  c.merge = *m;
}

void setComm(SemanticsConfig& c, const std::string& v) {
  auto m = commModelFromString(v);
  if (!m) throw UsageError{"communication model must be sync, ordered or unordered, not " + v};
  c.commModel = *m;
}

SemanticsConfig resolve(const ConfigArgs& a) {
  SemanticsConfig c = presetOrDefault(a.preset);
  if (!a.merge.empty()) setMerge(c, a.merge);
  if (!a.comm.empty()) setComm(c, a.comm);
  if (a.allowPar) c.allowParallel = *a.allowPar;
  if (a.allowRec) c.allowFixedPoint = *a.allowRec;
  if (a.allowStar) c.allowKleeneStar = *a.allowStar;
  if (a.wellBranched) c.requireWellBranched = true;
  if (a.wellChannelled) c.requireWellChannelled = true;
  if (a.maxStates) c.explorationMaxStates = *a.maxStates;
  if (a.depth) c.bisimDepthBound = *a.depth;
  return c;
}

bool parseBool(const std::string& v) {
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw UsageError{"expected a boolean, got " + v};
}

std::size_t parseCount(const std::string& v) {
  try {
    std::size_t used = 0;
    auto n = std::stoul(v, &used);
    if (used == v.size() && n > 0) return n;
  } catch (const std::exception&) {
  }
  throw UsageError{"expected a positive integer, got " + v};
}

// "PRESET[:field=value,...]"; an empty preset means the defaults.
SemanticsConfig parseSpec(const std::string& spec) {
  auto colon = spec.find(':');
  SemanticsConfig c = presetOrDefault(spec.substr(0, colon));
  if (colon == std::string::npos) return c;
  std::stringstream fields(spec.substr(colon + 1));
  std::string item;
  while (std::getline(fields, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError{"expected field=value in " + spec};
    auto key = item.substr(0, eq), value = item.substr(eq + 1);
    if (key == "merge") setMerge(c, value);
    else if (key == "comm" || key == "commModel") setComm(c, value);
    else if (key == "par" || key == "allowParallel") c.allowParallel = parseBool(value);
    else if (key == "rec" || key == "allowFixedPoint") c.allowFixedPoint = parseBool(value);
    else if (key == "star" || key == "allowKleeneStar") c.allowKleeneStar = parseBool(value);
    else if (key == "wellBranched" || key == "requireWellBranched") c.requireWellBranched = parseBool(value);
    else if (key == "wellChannelled" || key == "requireWellChannelled") c.requireWellChannelled = parseBool(value);
    else if (key == "maxStates" || key == "explorationMaxStates") c.explorationMaxStates = parseCount(value);
    else if (key == "depth" || key == "bisimDepthBound") c.bisimDepthBound = parseCount(value);
    else throw UsageError{"unknown field " + key + " in " + spec};
  }
  return c;
}

json request(const std::string& op, const Loaded& s) {
  json r{{"op", op}, {"session", s.text}};
  if (!s.name.empty()) r["example"] = s.name;
  return r;
}

// Prints a bridge response and maps it onto the exit status.
int emit(const json& response) {
  std::cout << response.dump(2) << "\n";
  if (response.at("ok").get<bool>()) return kOk;
  auto kind = response.at("error").at("kind").get<std::string>();
  return kind == "ParseError" || kind == "BadRequest" || kind == "MalformedRequest" ? kUsage : kFailed;
}

void printReport(const CheckReport& r) {
  for (const auto& v : r.violations) std::cout << toString(v.kind) << ": " << v.message << "\n";
}

std::optional<LocalsMap> projectOrReport(const Global& g, const SemanticsConfig& c, const std::string& indent = "") {
  auto core = checkCore(g);
  if (!core.ok()) {
    printReport(core);
    return std::nullopt;
  }
  auto r = projectAll(g, c);
  if (!r) {
    std::cout << indent << r.error().message << "\n";
    return std::nullopt;
  }
  return r.value();
}

// "-" writes to standard output.
void writeFile(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError{"cannot write " + path};
  out << text;
}

std::string plural(std::size_t n, const char* word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

// ---------------------------------------------------------------------------
// Commands

int cmdCheck(const SessionArgs& s, const ConfigArgs& a, bool asJson) {
  Loaded l = load(s);
  SemanticsConfig c = resolve(a);
  if (asJson) {
    json r = request("check", l);
    r["configA"] = bridge::toJson(c);
    return emit(bridge::handle(r));
  }
  for (const auto& w : validateConfig(c)) std::cerr << "warning: " << w.message << "\n";
  auto report = checkAll(l.global, c);
  if (report.ok()) {
    std::cout << "ok\n";
    return kOk;
  }
  printReport(report);
  return kFailed;
}

int cmdProject(const SessionArgs& s, const ConfigArgs& a, bool asJson) {
  Loaded l = load(s);
  SemanticsConfig c = resolve(a);
  if (asJson) {
    json r = request("project", l);
    r["configA"] = bridge::toJson(c);
    return emit(bridge::handle(r));
  }
  auto locals = projectOrReport(l.global, c);
  if (!locals) return kFailed;
  for (const auto& [p, local] : *locals) std::cout << p.name << ": " << printLocal(local) << "\n";
  return kOk;
}

void printStatus(const Configuration& cfg) {
  auto t = isTerminal(cfg);
  if (t != Termination::NotTerminal) std::cout << "terminal: " << toString(t) << "\n";
}

int cmdRun(const SessionArgs& s, const ConfigArgs& a, const std::vector<std::string>& trace, bool interactive) {
  Loaded l = load(s);
  SemanticsConfig c = resolve(a);
  auto locals = projectOrReport(l.global, c);
  if (!locals) return kFailed;
  Configuration cfg = initial(*locals, c);

  if (!interactive) {
    for (const auto& label : trace) {
      auto next = step(cfg, label, c);
      if (!next) {
        std::cout << toString(next.error().kind) << ": " << next.error().message << "\n";
        return kFailed;
      }
      cfg = next.value();
      std::cout << label << "\n";
    }
    printStatus(cfg);
    return kOk;
  }

  while (true) {
    auto options = enabled(cfg, c);
    if (options.empty()) {
      printStatus(cfg);
      return kOk;
    }
    for (std::size_t i = 0; i < options.size(); ++i) std::cout << "  " << i + 1 << ") " << print(options[i].label) << "\n";
    std::cout << "> " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line)) {
      std::cout << "\n";
      return kOk;
    }
    std::optional<std::size_t> chosen;
    try {
      std::size_t used = 0;
      auto n = std::stoul(line, &used);
      if (used == line.size() && n >= 1 && n <= options.size()) chosen = n - 1;
    } catch (const std::exception&) {
    }
    if (!chosen) {
      auto next = step(cfg, line, c);
      if (!next) {
        std::cout << next.error().message << "\n";
        continue;
      }
      cfg = next.value();
      std::cout << line << "\n";
      continue;
    }
    auto next = step(cfg, options[*chosen].label, c);
    if (!next) {
      std::cout << next.error().message << "\n";
      continue;
    }
    std::cout << print(options[*chosen].label) << "\n";
    cfg = next.value();
  }
}

int cmdLts(const SessionArgs& s, const ConfigArgs& a, const std::string& dotOut, bool asJson) {
  Loaded l = load(s);
  SemanticsConfig c = resolve(a);
  if (asJson) {
    json r = request("lts", l);
    r["configA"] = bridge::toJson(c);
    json resp = bridge::handle(r);
    if (!dotOut.empty() && resp.at("ok").get<bool>()) writeFile(dotOut, resp["payload"]["dot"].get<std::string>());
    return emit(resp);
  }
  auto locals = projectOrReport(l.global, c);
  if (!locals) return kFailed;
  Lts lts = buildLts(*locals, c);
  if (dotOut == "-") {
    writeFile(dotOut, renderCompositionalFsm(lts));
    return kOk;
  }
  std::cout << plural(lts.states.size(), "state") << ", " << plural(lts.edges.size(), "edge");
  if (lts.truncated) std::cout << " (truncated at " << c.explorationMaxStates << ")";
  std::cout << "\n";
  for (const auto& d : lts.diagnostics) std::cout << d << "\n";
  if (!dotOut.empty()) writeFile(dotOut, renderCompositionalFsm(lts));
  return kOk;
}

int cmdMsc(const SessionArgs& s, const std::string& mmdOut, bool asJson) {
  Loaded l = load(s);
  if (asJson) {
    json resp = bridge::handle(request("msc", l));
    if (!mmdOut.empty() && resp.at("ok").get<bool>()) writeFile(mmdOut, resp["payload"]["mermaid"].get<std::string>());
    return emit(resp);
  }
  auto core = checkCore(l.global);
  if (!core.ok()) {
    printReport(core);
    return kFailed;
  }
  auto doc = renderMsc(l.global);
  if (mmdOut.empty())
    std::cout << doc;
  else
    writeFile(mmdOut, doc);
  return kOk;
}

int cmdLocalsFsm(const SessionArgs& s, const ConfigArgs& a, const std::string& dir, bool asJson) {
  Loaded l = load(s);
  SemanticsConfig c = resolve(a);
  if (!dir.empty()) std::filesystem::create_directories(dir);
  if (asJson) {
    json r = request("localsFsm", l);
    r["configA"] = bridge::toJson(c);
    json resp = bridge::handle(r);
    if (!dir.empty() && resp.at("ok").get<bool>())
      for (const auto& [p, dot] : resp["payload"]["fsms"].items()) writeFile(dir + "/" + p + ".dot", dot.get<std::string>());
    return emit(resp);
  }
  auto locals = projectOrReport(l.global, c);
  if (!locals) return kFailed;
  for (const auto& [p, local] : *locals) {
    auto fsm = exploreLocal(p, local, c.explorationMaxStates);
    std::cout << p.name << ": " << plural(fsm.states.size(), "state") << ", " << plural(fsm.edges.size(), "edge") << "\n";
    if (!dir.empty()) writeFile(dir + "/" + p.name + ".dot", renderLocalFsm(fsm));
  }
  return kOk;
}

int cmdBisim(const SessionArgs& s, const std::string& specA, const std::string& specB, std::optional<std::size_t> depth,
             bool asJson) {
  Loaded l = load(s);
  SemanticsConfig ca = parseSpec(specA), cb = parseSpec(specB);
  const std::size_t bound = depth.value_or(ca.bisimDepthBound);
  if (asJson) {
    json r = request("bisim", l);
    r["configA"] = bridge::toJson(ca);
    r["configB"] = bridge::toJson(cb);
    r["depth"] = bound;
    return emit(bridge::handle(r));
  }
  auto core = checkCore(l.global);
  if (!core.ok()) {
    printReport(core);
    return kFailed;
  }
  std::optional<LocalsMap> sides[2];
  const SemanticsConfig* configs[2] = {&ca, &cb};
  const std::string specs[2] = {specA, specB};
  for (int i = 0; i < 2; ++i) {
    std::cout << "Semantics " << (i == 0 ? "A" : "B") << " (" << (specs[i].empty() ? "defaults" : specs[i])
              << "): Locals\n";
    auto r = projectAll(l.global, *configs[i]);
    if (!r) {
      std::cout << "  " << r.error().message << "\n";
      continue;
    }
    sides[i] = r.value();
    for (const auto& [p, local] : r.value()) std::cout << "  " << p.name << ": " << printLocal(local) << "\n";
  }
  if (!sides[0] || !sides[1]) {
    std::cout << "Bisimulation: not computed, projection failed\n";
    return kFailed;
  }
  auto v = branchingBisim(buildLts(*sides[0], ca), buildLts(*sides[1], cb), bound);
  std::cout << "Bisimulation: " << toString(v.result) << " (depth " << v.depthUsed << " of " << bound << ")\n";
  if (v.evidence) {
    std::cout << "Evidence (" << v.evidence->kind << ", refused by " << toString(v.evidence->refusingSide) << "):";
    for (const auto& label : v.evidence->path) std::cout << " " << label;
    std::cout << "\n";
  }
  for (const auto& n : v.notes) std::cout << "Note: " << n << "\n";
  return v.result == BisimResult::Bisimilar ? kOk : kFailed;
}

BridgeServer* activeServer = nullptr;

int cmdServe(const std::string& host, int port, const std::string& uiDir) {
  BridgeServer server(uiDir);
  if (!server.bind(host, port)) {
    std::cerr << "cannot listen on " << host << ":" << port << " (port in use?)\n";
    return kUsage;
  }
  activeServer = &server;
  std::signal(SIGINT, [](int) {
    if (activeServer) activeServer->stop();
  });
  std::cout << "serving on http://" << host << ":" << server.port() << "\n" << std::flush;
  server.run();
  activeServer = nullptr;
  return kOk;
}

// One request per input line, one response per output line.
int cmdBridge() {
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::cout << bridge::handleText(line) << "\n" << std::flush;
  }
  return kOk;
}

int cmdExamples(const std::string& show, bool asJson) {
  if (asJson) return emit(bridge::handle(json{{"op", "examples"}}));
  if (!show.empty()) {
    auto e = findExample(show);
    if (!e) throw UsageError{"no example named \"" + show + "\""};
    std::cout << printGlobal(e->global) << "\n";
    return kOk;
  }
  for (const auto& e : bundledExamples()) std::cout << e.name << "\n";
  return kOk;
}

void addSession(CLI::App* cmd, SessionArgs& s) {
  cmd->add_option("file", s.file, "Session file (.mpst)");
  cmd->add_option("--example", s.example, "Bundled example, or entry of a multi-example file");
}

void addConfig(CLI::App* cmd, ConfigArgs& a) {
  cmd->add_option("--preset", a.preset, "Start from a preset; later flags override it");
  cmd->add_option("--merge", a.merge, "plain | full");
  cmd->add_option("--comm", a.comm, "sync | ordered | unordered");
  cmd->add_flag("--allow-par,!--no-allow-par", a.allowPar, "Allow parallel composition");
  cmd->add_flag("--allow-rec,!--no-allow-rec", a.allowRec, "Allow fixed-point recursion");
  cmd->add_flag("--allow-star,!--no-allow-star", a.allowStar, "Allow Kleene star");
  cmd->add_flag("--require-well-branched", a.wellBranched, "Require well-branched choices");
  cmd->add_flag("--require-well-channelled", a.wellChannelled, "Require well-channelled parallel branches");
  cmd->add_option("--max-states", a.maxStates, "State exploration limit")->check(CLI::PositiveNumber);
  cmd->add_option("--depth", a.depth, "Bisimulation depth bound")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Check, project, run and compare multiparty session protocols"};
  app.require_subcommand(1);
  bool asJson = false;
  app.add_flag("--json", asJson, "Print the bridge JSON response instead of text");

  SessionArgs session;
  ConfigArgs config;
  std::vector<std::string> trace;
  bool interactive = false;
  std::string out, specA, specB, uiDir, host = "127.0.0.1", show;
  std::optional<std::size_t> depth;
  int port = 8080;

  auto* check = app.add_subcommand("check", "Well-formedness, construct gating and extra requirements");
  auto* project = app.add_subcommand("project", "Print every participant's local type");
  auto* run = app.add_subcommand("run", "Execute the projected session step by step");
  auto* lts = app.add_subcommand("lts", "Build the composed state space");
  auto* msc = app.add_subcommand("msc", "Mermaid sequence diagram of the protocol");
  auto* fsm = app.add_subcommand("locals-fsm", "Per-participant automata");
  auto* bisim = app.add_subcommand("bisim", "Compare two semantics by branching bisimulation");
  auto* serve = app.add_subcommand("serve", "Serve the bridge API over HTTP");
  auto* bridgeCmd = app.add_subcommand("bridge", "Answer JSON requests from standard input, one per line");
  auto* examples = app.add_subcommand("examples", "List the bundled examples");

  for (auto* cmd : {check, project, run, lts, msc, fsm, bisim}) {
    addSession(cmd, session);
    cmd->add_flag("--json", asJson, "Print the bridge JSON response instead of text");
  }
  for (auto* cmd : {check, project, run, lts, fsm}) addConfig(cmd, config);

  auto* traceOpt = run->add_option("--trace", trace, "Labels to replay, e.g. cw!Quit cw?Quit")->delimiter(',');
  run->add_flag("--interactive", interactive, "Choose enabled actions from standard input")->excludes(traceOpt);
  lts->add_option("--dot", out, "Write the DOT document here (- for stdout)");
  msc->add_option("--mmd", out, "Write the Mermaid document here (- for stdout)");
  fsm->add_option("--dot-dir", out, "Write <participant>.dot files into this directory");
  bisim->add_option("--a", specA, "Semantics A: PRESET[:field=value,...]");
  bisim->add_option("--b", specB, "Semantics B: PRESET[:field=value,...]");
  bisim->add_option("--depth", depth, "Depth bound (default: semantics A's bound)")->check(CLI::PositiveNumber);
  serve->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Interface to bind");
  serve->add_option("--ui-dir", uiDir, "Static files to serve at /");
  examples->add_option("--show", show, "Print one example");
  examples->add_flag("--json", asJson, "Print the bridge JSON response instead of text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*check) return cmdCheck(session, config, asJson);
    if (*project) return cmdProject(session, config, asJson);
    if (*run) return cmdRun(session, config, trace, interactive || trace.empty());
    if (*lts) return cmdLts(session, config, out, asJson);
    if (*msc) return cmdMsc(session, out, asJson);
    if (*fsm) return cmdLocalsFsm(session, config, out, asJson);
    if (*bisim) return cmdBisim(session, specA, specB, depth, asJson);
    if (*serve) return cmdServe(host, port, uiDir);
    if (*bridgeCmd) return cmdBridge();
    if (*examples) return cmdExamples(show, asJson);
  } catch (const UsageError& e) {
    if (asJson) {
      json err{{"kind", e.kind}, {"message", e.message}};
      if (e.line > 0) {
        err["line"] = e.line;
        err["column"] = e.column;
      }
      std::cout << json{{"ok", false}, {"error", err}}.dump(2) << "\n";
    } else {
      std::cerr << "error: " << e.message << "\n";
    }
    return kUsage;
  }
  return kUsage;
}
