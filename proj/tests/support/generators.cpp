#include "generators.hpp"

#include <algorithm>
#include <string>

namespace gen {

using namespace mpst;

namespace {

int pick(std::mt19937& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

Participant participant(std::mt19937& rng, const Options& o) { return Participant("p" + std::to_string(pick(rng, o.participants))); }

Label label(int i) { return Label("m" + std::to_string(i)); }

std::vector<int> distinctLabels(std::mt19937& rng, const Options& o) {
  std::vector<int> all(static_cast<std::size_t>(o.labels));
  for (int i = 0; i < o.labels; ++i) all[static_cast<std::size_t>(i)] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(static_cast<std::size_t>(1 + pick(rng, o.labels)));
  return all;
}

struct Builder {
  std::mt19937& rng;
  const Options& o;
  bool protocol;
  std::vector<RecVar> scope;  // bound variables
  std::vector<RecVar> usable;  // bound and guarded
  int nextVar = 0;

  Global comm(int depth) {
    Participant s = participant(rng, o), r = participant(rng, o);
    if (protocol)
      while (r == s) r = participant(rng, o);
    std::vector<global::Branch> branches;
    if (protocol) {
      auto saved = usable;
      usable = scope;
      for (int l : distinctLabels(rng, o)) branches.push_back({label(l), pick(rng, 3) == 0 ? Global::skip() : go(depth - 1)});
      usable = saved;
    } else {
      for (int l : distinctLabels(rng, o)) branches.push_back({label(l), pick(rng, 2) ? Global::skip() : go(depth - 1)});
    }
    return Global::comm(s, r, std::move(branches));
  }

  Global go(int depth) {
    if (depth <= 0) {
      const auto& vars = protocol ? usable : scope;
      if (!vars.empty() && pick(rng, 3) == 0) return Global::var(vars[static_cast<std::size_t>(pick(rng, static_cast<int>(vars.size())))]);
      if (!protocol && pick(rng, 4) == 0) return Global::skip();
      Participant from = participant(rng, o), to = participant(rng, o);
      if (protocol)
        while (to == from) to = participant(rng, o);
      return Global::message(from, to, label(pick(rng, o.labels)));
    }
    switch (pick(rng, 9)) {
      case 0:
      case 1:
      case 2: return comm(depth);
      case 3: {
        Global a = go(depth - 1);
        auto saved = usable;
        if (protocol) usable = scope;  // `a` acts before `b` in protocol mode
        Global b = go(depth - 1);
        usable = saved;
        return Global::seq(a, b);
      }
      case 4:
        if (o.allowPar) {
          auto savedScope = scope;
          auto savedUsable = usable;
          if (protocol) scope.clear(), usable.clear();
          Global a = go(depth - 1), b = go(depth - 1);
          scope = savedScope;
          usable = savedUsable;
          return Global::par(a, b);
        }
        return comm(depth);
      case 5:
        if (o.allowChoice) return Global::choice(go(depth - 1), go(depth - 1));
        return comm(depth);
      case 6:
        if (o.allowRec) {
          RecVar x("X" + std::to_string(nextVar++));
          scope.push_back(x);
          auto saved = usable;
          Global body = protocol ? comm(depth - 1) : go(depth - 1);
          usable = saved;
          scope.pop_back();
          return Global::rec(x, body);
        }
        return comm(depth);
      case 7:
        if (o.allowStar) {
          auto savedScope = scope;
          auto savedUsable = usable;
          if (protocol) scope.clear(), usable.clear();
          Global body = protocol ? comm(depth - 1) : go(depth - 1);
          scope = savedScope;
          usable = savedUsable;
          return Global::star(body);
        }
        return comm(depth);
      default:
        if (!protocol && pick(rng, 2)) return Global::skip();
        return comm(depth);
    }
  }
};

}  // namespace

Global anyGlobal(std::mt19937& rng, const Options& o) { return Builder{rng, o, false, {}, {}, 0}.go(1 + pick(rng, o.maxDepth)); }

Global protocolGlobal(std::mt19937& rng, const Options& o) {
  return Builder{rng, o, true, {}, {}, 0}.go(1 + pick(rng, o.maxDepth));
}

Local anyLocal(std::mt19937& rng, const Participant& self, int depth, const Options& o) {
  auto peer = [&] {
    Participant p = participant(rng, o);
    while (p == self) p = participant(rng, o);
    return p;
  };
  if (depth <= 0 || pick(rng, 4) == 0) {
    if (pick(rng, 3) == 0) return Local::skip();
    return Local::action(pick(rng, 2) ? Direction::Send : Direction::Recv, self, peer(), {{label(pick(rng, o.labels)), Local::skip()}});
  }
  switch (pick(rng, 5)) {
    case 0: {
      std::vector<local::Branch> bs;
      for (int l : distinctLabels(rng, o)) bs.push_back({label(l), anyLocal(rng, self, depth - 1, o)});
      return Local::action(pick(rng, 2) ? Direction::Send : Direction::Recv, self, peer(), std::move(bs));
    }
    case 1: return Local::seq(anyLocal(rng, self, depth - 1, o), anyLocal(rng, self, depth - 1, o));
    case 2: return Local::par(anyLocal(rng, self, depth - 1, o), anyLocal(rng, self, depth - 1, o));
    case 3: return Local::choice(anyLocal(rng, self, depth - 1, o), anyLocal(rng, self, depth - 1, o));
    default: return Local::star(anyLocal(rng, self, depth - 1, o));
  }
}

}  // namespace gen
