#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mpst/ast.hpp"
#include "mpst/config.hpp"
#include "mpst/projection.hpp"
#include "mpst/result.hpp"

namespace mpst {

using RecEnv = std::map<RecVar, Local>;

namespace buffer {
struct None {
  friend bool operator==(const None&, const None&) = default;
};
/// One FIFO queue per (sender, receiver); empty queues are not stored.
struct Fifo {
  std::map<std::pair<Participant, Participant>, std::vector<Label>> queues;
  friend bool operator==(const Fifo&, const Fifo&) = default;
};
/// Pending messages as a multiset; zero counts are not stored.
struct Bag {
  std::map<CommTriple, std::size_t> counts;
  friend bool operator==(const Bag&, const Bag&) = default;
};
}  // namespace buffer

using Buffer = std::variant<buffer::None, buffer::Fifo, buffer::Bag>;

bool bufferEmpty(const Buffer& b) noexcept;
CommModel modelOf(const Buffer& b) noexcept;

struct Configuration {
  LocalsMap locals;
  std::map<Participant, RecEnv> envs;  // participants with an empty env are absent
  Buffer buffer;

  /// Deterministic text identity: equal keys iff equal configurations.
  std::string key() const;

  friend bool operator==(const Configuration& a, const Configuration& b) { return a.key() == b.key(); }
};

enum class ActionKind { SyncComm, Send, Recv };

/// `from` is always the sender and `to` the receiver, whatever the kind.
struct ActionLabel {
  ActionKind kind;
  Participant from;
  Participant to;
  Label label;

  friend auto operator<=>(const ActionLabel&, const ActionLabel&) = default;
  friend bool operator==(const ActionLabel&, const ActionLabel&) = default;
};

/// "p→q:t", "pq!t" or "pq?t".
std::string print(const ActionLabel& a);

/// What one participant can do next, in isolation.
struct Intent {
  Direction dir;
  Participant self;
  Participant peer;
  Label label;
  Local next;
  RecEnv env;
};

/// Intents offered by `l` under `env`. Throws std::invalid_argument on an
/// unbound variable.
std::vector<Intent> enabledLocal(const Local& l, const RecEnv& env);

/// Puts a local back into the form used for state identity: head variables
/// are unfolded to their binder, sequences are right-nested, skips collapse,
/// and the environment keeps only bindings still reachable.
std::pair<Local, RecEnv> canonicalise(const Local& l, const RecEnv& env);

Configuration initial(const LocalsMap& locals, const SemanticsConfig& c);

struct Successor {
  ActionLabel label;
  Configuration next;
};

/// Sorted by printed label, then successor key; exact duplicates removed.
/// Two entries may share a label when the configuration is nondeterministic.
std::vector<Successor> enabled(const Configuration& cfg, const SemanticsConfig& c);

enum class StepErrorKind { NotEnabled, NondeterministicLabel };
std::string_view toString(StepErrorKind k);

struct StepError {
  StepErrorKind kind;
  std::string label;
  std::string message;
};

Result<Configuration, StepError> step(const Configuration& cfg, const ActionLabel& label, const SemanticsConfig& c);
/// Same, with the label given in printed form.
Result<Configuration, StepError> step(const Configuration& cfg, std::string_view label, const SemanticsConfig& c);

enum class Termination { NotTerminal, Clean, Stuck };
std::string_view toString(Termination t);

Termination isTerminal(const Configuration& cfg);

struct LtsEdge {
  std::size_t from;
  ActionLabel label;
  std::size_t to;
};

struct Lts {
  std::vector<Configuration> states;  // index 0 is the initial state
  std::vector<LtsEdge> edges;
  bool truncated = false;
  std::vector<std::size_t> openStates;  // discovered but not expanded
  std::vector<std::string> diagnostics;

  std::vector<const LtsEdge*> outgoing(std::size_t s) const;
};

/// Breadth-first closure of `enabled`, at most c.explorationMaxStates states.
Lts buildLts(const LocalsMap& locals, const SemanticsConfig& c);

struct LocalState {
  Local local;
  RecEnv env;
};

struct LocalEdge {
  std::size_t from;
  ActionLabel label;
  std::size_t to;
};

struct LocalFsm {
  Participant owner;
  std::vector<LocalState> states;
  std::vector<LocalEdge> edges;
  bool truncated = false;
};

/// The single-participant automaton of `l` under enabledLocal.
LocalFsm exploreLocal(const Participant& owner, const Local& l, std::size_t maxStates = 10000);

/// The intent of a participant printed as an action label.
ActionLabel labelOf(const Intent& i);

}  // namespace mpst
