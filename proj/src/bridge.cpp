#include "mpst/bridge.hpp"

#include <stdexcept>

#include "mpst/catalog.hpp"
#include "mpst/parser.hpp"
#include "mpst/projection.hpp"
#include "mpst/render.hpp"

namespace mpst::bridge {

namespace {

// Raised while decoding a request; becomes an ok=false response.
struct RequestError {
  std::string kind;
  std::string message;
  json payload = nullptr;
  int line = 0;
  int column = 0;
};

json failure(const RequestError& e) {
  json err{{"kind", e.kind}, {"message", e.message}};
  if (e.line > 0) {
    err["line"] = e.line;
    err["column"] = e.column;
  }
  json out{{"ok", false}, {"error", err}};
  if (!e.payload.is_null()) out["payload"] = e.payload;
  return out;
}

json success(json payload) { return json{{"ok", true}, {"payload", std::move(payload)}}; }

const json& field(const json& req, const char* name) {
  if (!req.contains(name)) throw RequestError{"BadRequest", std::string("missing field '") + name + "'"};
  return req.at(name);
}

std::string stringField(const json& req, const char* name) {
  const json& v = field(req, name);
  if (!v.is_string()) throw RequestError{"BadRequest", std::string("field '") + name + "' must be a string"};
  return v.get<std::string>();
}

Global sessionOf(const json& req) {
  auto text = stringField(req, "session");
  auto parsed = parseSessionFile(text);
  if (!parsed) {
    const auto& e = parsed.error();
    throw RequestError{"ParseError", e.describe(), nullptr, e.line, e.column};
  }
  const auto& sessions = parsed.value();
  if (sessions.empty()) return Global::skip();
  if (req.contains("example")) {
    auto name = req.at("example").get<std::string>();
    for (const auto& s : sessions)
      if (s.name == name) return s.global;
    throw RequestError{"BadRequest", "no example named '" + name + "' in session text"};
  }
  return sessions.front().global;
}

SemanticsConfig configField(const json& req, const char* name) {
  if (!req.contains(name)) return SemanticsConfig{};
  try {
    return configFromJson(req.at(name));
  } catch (const std::invalid_argument& e) {
    throw RequestError{"BadRequest", std::string(name) + ": " + e.what()};
  }
}

void requireCore(const Global& g) {
  auto core = checkCore(g);
  if (!core.ok()) throw RequestError{"CheckViolations", core.violations.front().message, toJson(core)};
}

json projectionErrorJson(const ProjectionError& e) {
  return json{{"kind", std::string(toString(e.kind))},
              {"participant", e.participant.name},
              {"offending", e.offending},
              {"mergeCriterion", std::string(toString(e.mergeCriterion))},
              {"message", e.message}};
}

LocalsMap projected(const Global& g, const SemanticsConfig& c) {
  requireCore(g);
  auto r = projectAll(g, c);
  if (!r) throw RequestError{"ProjectionError", r.error().message, projectionErrorJson(r.error())};
  return r.value();
}

json localsJson(const LocalsMap& locals) {
  json out = json::object();
  for (const auto& [p, l] : locals) out[p.name] = printLocal(l);
  return out;
}

Configuration stateOf(const json& req, const SemanticsConfig& c) {
  if (req.contains("state")) {
    Configuration cfg;
    try {
      cfg = configurationFromJson(req.at("state"));
    } catch (const std::exception& e) {
      throw RequestError{"InvalidState", e.what()};
    }
    if (modelOf(cfg.buffer) != c.commModel)
      throw RequestError{"InvalidState", "state buffer does not match communication model " +
                                             std::string(toString(c.commModel))};
    return cfg;
  }
  return initial(projected(sessionOf(req), c), c);
}

json stateView(const Configuration& cfg) {
  return json{{"state", toJson(cfg)}, {"termination", std::string(toString(isTerminal(cfg)))}};
}

// ---------------------------------------------------------------------------
// Operations

json opParse(const json& req) {
  Global g = sessionOf(req);
  json parts = json::array();
  for (const auto& p : participants(g)) parts.push_back(p.name);
  return json{{"global", printGlobal(g)}, {"participants", parts}};
}

json opCheck(const json& req) {
  Global g = sessionOf(req);
  SemanticsConfig c = configField(req, "configA");
  CheckReport report = checkAll(g, c);
  json payload = toJson(report);
  json warnings = json::array();
  for (const auto& w : validateConfig(c)) warnings.push_back(w.message);
  payload["warnings"] = warnings;
  if (!report.ok()) throw RequestError{"CheckViolations", report.violations.front().message, payload};
  return payload;
}

json opProject(const json& req) {
  return json{{"locals", localsJson(projected(sessionOf(req), configField(req, "configA")))}};
}

json opMsc(const json& req) {
  Global g = sessionOf(req);
  requireCore(g);
  return json{{"mermaid", renderMsc(g)}};
}

json opLocalsFsm(const json& req) {
  json fsms = json::object();
  for (const auto& [p, l] : projected(sessionOf(req), configField(req, "configA")))
    fsms[p.name] = renderLocalFsm(p, l);
  return json{{"fsms", fsms}};
}

json opLts(const json& req) {
  SemanticsConfig c = configField(req, "configA");
  Lts lts = buildLts(projected(sessionOf(req), c), c);
  json out = ltsSummary(lts);
  out["dot"] = renderCompositionalFsm(lts);
  return out;
}

json opEnabled(const json& req) {
  SemanticsConfig c = configField(req, "configA");
  Configuration cfg = stateOf(req, c);
  json labels = json::array();
  json successors = json::array();
  for (const auto& s : enabled(cfg, c)) {
    labels.push_back(print(s.label));
    successors.push_back(json{{"label", print(s.label)}, {"state", toJson(s.next)}});
  }
  json out = stateView(cfg);
  out["labels"] = labels;
  out["successors"] = successors;
  return out;
}

json opStep(const json& req) {
  SemanticsConfig c = configField(req, "configA");
  Configuration cfg = stateOf(req, c);
  auto label = stringField(req, "label");
  auto next = step(cfg, label, c);
  if (!next) throw RequestError{std::string(toString(next.error().kind)), next.error().message};
  json out = stateView(next.value());
  out["label"] = label;
  return out;
}

json opBisim(const json& req) {
  Global g = sessionOf(req);
  SemanticsConfig ca = configField(req, "configA");
  SemanticsConfig cb = configField(req, "configB");
  requireCore(g);
  std::size_t depth = ca.bisimDepthBound;
  if (req.contains("depth")) depth = req.at("depth").get<std::size_t>();

  json sides = json::object();
  std::optional<LocalsMap> la, lb;
  for (auto [name, cfg, slot] : {std::tuple{"A", &ca, &la}, std::tuple{"B", &cb, &lb}}) {
    auto r = projectAll(g, *cfg);
    if (r) {
      *slot = r.value();
      sides[name] = json{{"locals", localsJson(r.value())}};
    } else {
      sides[name] = json{{"error", projectionErrorJson(r.error())}};
    }
  }
  if (!la || !lb) {
    const auto& side = la ? sides["B"] : sides["A"];
    throw RequestError{"ProjectionError", side["error"]["message"].get<std::string>(), json{{"sides", sides}}};
  }
  BisimVerdict v = branchingBisim(buildLts(*la, ca), buildLts(*lb, cb), depth);
  json out = toJson(v);
  out["sides"] = sides;
  return out;
}

json opExamples(const json&) {
  json list = json::array();
  for (const auto& e : bundledExamples()) list.push_back(json{{"name", e.name}, {"session", printGlobal(e.global)}});
  return json{{"examples", list}};
}

json opPresets(const json&) {
  json list = json::array();
  for (auto id : kAllPresets) {
    json warnings = json::array();
    for (const auto& w : validateConfig(preset(id))) warnings.push_back(w.message);
    list.push_back(json{{"name", std::string(presetName(id))}, {"config", toJson(preset(id))}, {"warnings", warnings}});
  }
  return json{{"presets", list}};
}

using Op = json (*)(const json&);

const std::map<std::string, Op>& ops() {
  static const std::map<std::string, Op> table = {
      {"parse", opParse},   {"check", opCheck},     {"project", opProject}, {"msc", opMsc},
      {"localsFsm", opLocalsFsm}, {"lts", opLts}, {"enabled", opEnabled}, {"step", opStep},
      {"bisim", opBisim},   {"examples", opExamples}, {"presets", opPresets},
  };
  return table;
}

}  // namespace

json handle(const json& request) {
  try {
    if (!request.is_object()) throw RequestError{"BadRequest", "request must be a JSON object"};
    auto op = stringField(request, "op");
    auto it = ops().find(op);
    if (it == ops().end()) throw RequestError{"BadRequest", "unknown op '" + op + "'"};
    return success(it->second(request));
  } catch (const RequestError& e) {
    return failure(e);
  } catch (const json::exception& e) {
    return failure({"BadRequest", e.what()});
  } catch (const std::invalid_argument& e) {
    return failure({"BadRequest", e.what()});
  }
}

std::string handleText(std::string_view body) {
  json request;
  try {
    request = json::parse(body);
  } catch (const json::parse_error& e) {
    return failure({"MalformedRequest", e.what(), nullptr, 1, static_cast<int>(e.byte)}).dump();
  }
  return handle(request).dump();
}

bool isRequestError(const json& response) {
  if (response.value("ok", false)) return false;
  auto kind = response.at("error").value("kind", "");
  return kind == "MalformedRequest" || kind == "BadRequest";
}

// ---------------------------------------------------------------------------
// Conversions

json toJson(const SemanticsConfig& c) {
  return json{{"merge", std::string(toString(c.merge))},
              {"commModel", std::string(toString(c.commModel))},
              {"allowParallel", c.allowParallel},
              {"allowFixedPoint", c.allowFixedPoint},
              {"allowKleeneStar", c.allowKleeneStar},
              {"requireWellBranched", c.requireWellBranched},
              {"requireWellChannelled", c.requireWellChannelled},
              {"explorationMaxStates", c.explorationMaxStates},
              {"bisimDepthBound", c.bisimDepthBound}};
}

SemanticsConfig configFromJson(const json& in) {
  const json j = in.is_string() ? json{{"preset", in}} : in;
  if (!j.is_object()) throw std::invalid_argument("configuration must be an object or a preset name");
  SemanticsConfig c;
  if (j.contains("preset")) {
    auto id = presetByName(j.at("preset").get<std::string>());
    if (!id) throw std::invalid_argument("unknown preset '" + j.at("preset").get<std::string>() + "'");
    c = preset(*id);
  }
  auto flag = [&](const char* name, bool& slot) {
    if (!j.contains(name)) return;
    if (!j.at(name).is_boolean()) throw std::invalid_argument(std::string(name) + " must be a boolean");
    slot = j.at(name).get<bool>();
  };
  auto count = [&](const char* name, std::size_t& slot) {
    if (!j.contains(name)) return;
    if (!j.at(name).is_number_unsigned() || j.at(name).get<std::size_t>() == 0)
      throw std::invalid_argument(std::string(name) + " must be a positive integer");
    slot = j.at(name).get<std::size_t>();
  };
  for (const auto& [key, _] : j.items()) {
    static const std::set<std::string> known = {"preset",          "merge",           "commModel",
                                                "allowParallel",   "allowFixedPoint", "allowKleeneStar",
                                                "requireWellBranched", "requireWellChannelled",
                                                "explorationMaxStates", "bisimDepthBound"};
    if (!known.contains(key)) throw std::invalid_argument("unknown configuration field '" + key + "'");
  }
  if (j.contains("merge")) {
    auto m = mergeFromString(j.at("merge").get<std::string>());
    if (!m) throw std::invalid_argument("merge must be \"plain\" or \"full\"");
    c.merge = *m;
  }
  if (j.contains("commModel")) {
    auto m = commModelFromString(j.at("commModel").get<std::string>());
    if (!m) throw std::invalid_argument("commModel must be \"sync\", \"orderedAsync\" or \"unorderedAsync\"");
    c.commModel = *m;
  }
  flag("allowParallel", c.allowParallel);
  flag("allowFixedPoint", c.allowFixedPoint);
  flag("allowKleeneStar", c.allowKleeneStar);
  flag("requireWellBranched", c.requireWellBranched);
  flag("requireWellChannelled", c.requireWellChannelled);
  count("explorationMaxStates", c.explorationMaxStates);
  count("bisimDepthBound", c.bisimDepthBound);
  return c;
}

json toJson(const CheckReport& r) {
  json list = json::array();
  for (const auto& v : r.violations) {
    json subjects = json::array();
    for (const auto& p : v.subjects) subjects.push_back(p.name);
    list.push_back(json{{"kind", std::string(toString(v.kind))},
                        {"subjects", subjects},
                        {"location", v.location},
                        {"message", v.message}});
  }
  return json{{"ok", r.ok()}, {"violations", list}};
}

json toJson(const Local& l) {
  return std::visit(
      Overloaded{
          [](const local::Skip&) { return json{{"t", "skip"}}; },
          [](const local::Action& a) {
            json branches = json::array();
            for (const auto& b : a.branches) branches.push_back(json{{"label", b.label.name}, {"cont", toJson(b.cont)}});
            return json{{"t", a.dir == Direction::Send ? "send" : "recv"},
                        {"self", a.self.name},
                        {"peer", a.peer.name},
                        {"branches", branches}};
          },
          [](const local::Seq& s) { return json{{"t", "seq"}, {"first", toJson(s.first)}, {"second", toJson(s.second)}}; },
          [](const local::Par& p) { return json{{"t", "par"}, {"left", toJson(p.left)}, {"right", toJson(p.right)}}; },
          [](const local::Choice& c) {
            return json{{"t", "choice"}, {"left", toJson(c.left)}, {"right", toJson(c.right)}};
          },
          [](const local::Rec& r) { return json{{"t", "rec"}, {"var", r.var.name}, {"body", toJson(r.body)}}; },
          [](const local::Var& v) { return json{{"t", "var"}, {"var", v.var.name}}; },
          [](const local::Star& s) { return json{{"t", "star"}, {"body", toJson(s.body)}}; },
      },
      l.node().v);
}

namespace {

std::string identifier(const json& j, const char* name) {
  auto s = j.at(name).get<std::string>();
  if (!isIdentifier(s)) throw std::invalid_argument("'" + s + "' is not an identifier");
  return s;
}

}  // namespace

Local localFromJson(const json& j) {
  auto t = j.at("t").get<std::string>();
  if (t == "skip") return Local::skip();
  if (t == "send" || t == "recv") {
    std::vector<local::Branch> branches;
    for (const auto& b : j.at("branches")) branches.push_back({Label(identifier(b, "label")), localFromJson(b.at("cont"))});
    if (branches.empty()) throw std::invalid_argument("an action needs at least one branch");
    return Local::action(t == "send" ? Direction::Send : Direction::Recv, Participant(identifier(j, "self")),
                         Participant(identifier(j, "peer")), std::move(branches));
  }
  if (t == "seq") return Local::seq(localFromJson(j.at("first")), localFromJson(j.at("second")));
  if (t == "par") return Local::par(localFromJson(j.at("left")), localFromJson(j.at("right")));
  if (t == "choice") return Local::choice(localFromJson(j.at("left")), localFromJson(j.at("right")));
  if (t == "rec") return Local::rec(RecVar(identifier(j, "var")), localFromJson(j.at("body")));
  if (t == "var") return Local::var(RecVar(identifier(j, "var")));
  if (t == "star") return Local::star(localFromJson(j.at("body")));
  throw std::invalid_argument("unknown local node '" + t + "'");
}

json toJson(const Configuration& cfg) {
  json locals = json::object();
  json terms = json::object();
  for (const auto& [p, l] : cfg.locals) {
    locals[p.name] = printLocal(l);
    terms[p.name] = toJson(l);
  }
  json envs = json::object();
  for (const auto& [p, env] : cfg.envs) {
    json e = json::object();
    for (const auto& [x, b] : env) e[x.name] = toJson(b);
    envs[p.name] = e;
  }
  json buf = std::visit(Overloaded{
                            [](const buffer::None&) { return json{{"kind", "none"}}; },
                            [](const buffer::Fifo& f) {
                              json queues = json::array();
                              for (const auto& [pq, ls] : f.queues) {
                                json labels = json::array();
                                for (const auto& l : ls) labels.push_back(l.name);
                                queues.push_back(json{{"from", pq.first.name}, {"to", pq.second.name}, {"labels", labels}});
                              }
                              return json{{"kind", "fifo"}, {"queues", queues}};
                            },
                            [](const buffer::Bag& b) {
                              json msgs = json::array();
                              for (const auto& [t, n] : b.counts)
                                msgs.push_back(json{{"from", t.sender.name},
                                                    {"to", t.receiver.name},
                                                    {"label", t.label.name},
                                                    {"count", n}});
                              return json{{"kind", "bag"}, {"messages", msgs}};
                            },
                        },
                        cfg.buffer);
  return json{{"locals", locals}, {"buffer", buf}, {"terms", terms}, {"envs", envs}};
}

Configuration configurationFromJson(const json& j) {
  Configuration cfg;
  for (const auto& [p, term] : j.at("terms").items()) {
    if (!isIdentifier(p)) throw std::invalid_argument("'" + p + "' is not a participant name");
    cfg.locals.emplace(Participant(p), localFromJson(term));
  }
  if (j.contains("envs")) {
    for (const auto& [p, env] : j.at("envs").items()) {
      RecEnv e;
      for (const auto& [x, b] : env.items()) e.emplace(RecVar(x), localFromJson(b));
      if (!e.empty()) cfg.envs.emplace(Participant(p), std::move(e));
    }
  }
  const json& b = j.at("buffer");
  auto kind = b.at("kind").get<std::string>();
  if (kind == "none") {
    cfg.buffer = buffer::None{};
  } else if (kind == "fifo") {
    buffer::Fifo f;
    for (const auto& q : b.at("queues")) {
      std::vector<Label> labels;
      for (const auto& l : q.at("labels")) labels.emplace_back(l.get<std::string>());
      if (!labels.empty())
        f.queues[{Participant(identifier(q, "from")), Participant(identifier(q, "to"))}] = std::move(labels);
    }
    cfg.buffer = std::move(f);
  } else if (kind == "bag") {
    buffer::Bag bag;
    for (const auto& m : b.at("messages")) {
      auto n = m.at("count").get<std::size_t>();
      if (n > 0)
        bag.counts[{Participant(identifier(m, "from")), Participant(identifier(m, "to")), Label(identifier(m, "label"))}] = n;
    }
    cfg.buffer = std::move(bag);
  } else {
    throw std::invalid_argument("unknown buffer kind '" + kind + "'");
  }
  return cfg;
}

json toJson(const BisimVerdict& v) {
  json out{{"result", std::string(toString(v.result))}, {"depthUsed", v.depthUsed}};
  json evidence = json::array();
  if (v.evidence) {
    for (const auto& l : v.evidence->path) evidence.push_back(l);
    out["evidenceKind"] = v.evidence->kind;
    out["refusingSide"] = std::string(toString(v.evidence->refusingSide));
  }
  out["evidence"] = evidence;
  std::string note;
  for (const auto& n : v.notes) note += (note.empty() ? "" : "; ") + n;
  out["note"] = note;
  json relation = json::array();
  for (auto [s, t] : v.relation) relation.push_back(json::array({s, t}));
  out["relation"] = relation;
  return out;
}

json ltsSummary(const Lts& lts) {
  json edges = json::array();
  for (const auto& e : lts.edges) edges.push_back(json{{"from", e.from}, {"label", print(e.label)}, {"to", e.to}});
  json terminals = json::object();
  std::vector<bool> busy(lts.states.size(), false);
  for (const auto& e : lts.edges) busy[e.from] = true;
  for (auto s : lts.openStates) busy[s] = true;
  for (std::size_t s = 0; s < lts.states.size(); ++s)
    if (!busy[s]) terminals[std::to_string(s)] = std::string(toString(isTerminal(lts.states[s])));
  return json{{"states", lts.states.size()},
              {"edges", lts.edges.size()},
              {"truncated", lts.truncated},
              {"edgeList", edges},
              {"terminals", terminals},
              {"openStates", lts.openStates},
              {"diagnostics", lts.diagnostics}};
}

}  // namespace mpst::bridge
