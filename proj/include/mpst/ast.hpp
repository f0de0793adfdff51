#pragma once

#include <compare>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace mpst {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

/// Letters, digits and underscore; must not start with a digit.
bool isIdentifier(std::string_view text) noexcept;

template <class Tag>
struct Identifier {
  std::string name;

  Identifier() = default;
  explicit Identifier(std::string n) : name(std::move(n)) {}

  friend auto operator<=>(const Identifier&, const Identifier&) = default;
  friend bool operator==(const Identifier&, const Identifier&) = default;
};

using Participant = Identifier<struct ParticipantTag>;
using Label = Identifier<struct LabelTag>;
using RecVar = Identifier<struct RecVarTag>;

struct CommTriple {
  Participant sender;
  Participant receiver;
  Label label;

  friend auto operator<=>(const CommTriple&, const CommTriple&) = default;
  friend bool operator==(const CommTriple&, const CommTriple&) = default;
};

// ---------------------------------------------------------------------------
// Global types

class Global;

namespace global {
struct Branch;
struct Skip {};
struct Comm;
struct Seq;
struct Par;
struct Choice;
struct Rec;
struct Var;
struct Star;
}  // namespace global

/// Immutable handle to a global-type node. Copies share structure.
class Global {
 public:
  struct Node;

  Global();  // skip

  static Global skip();
  static Global comm(Participant sender, Participant receiver, std::vector<global::Branch> branches);
  /// Single-branch communication `p->q:t` followed by skip.
  static Global message(Participant sender, Participant receiver, Label label);
  static Global seq(Global first, Global second);
  static Global par(Global left, Global right);
  static Global choice(Global left, Global right);
  static Global rec(RecVar var, Global body);
  static Global var(RecVar var);
  static Global star(Global body);

  const Node& node() const noexcept { return *node_; }

  template <class T>
  const T* as() const noexcept;

  template <class T>
  bool is() const noexcept { return as<T>() != nullptr; }

  /// Structural equality; branch lists compare as label-keyed maps.
  friend bool operator==(const Global& a, const Global& b);

 private:
  explicit Global(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

namespace global {
struct Branch {
  Label label;
  Global cont;
};
struct Comm {
  Participant sender;
  Participant receiver;
  std::vector<Branch> branches;
};
struct Seq {
  Global first;
  Global second;
};
struct Par {
  Global left;
  Global right;
};
struct Choice {
  Global left;
  Global right;
};
struct Rec {
  RecVar var;
  Global body;
};
struct Var {
  RecVar var;
};
struct Star {
  Global body;
};
using Variant = std::variant<Skip, Comm, Seq, Par, Choice, Rec, Var, Star>;
}  // namespace global

struct Global::Node {
  global::Variant v;
};

template <class T>
const T* Global::as() const noexcept {
  return std::get_if<T>(&node_->v);
}

// ---------------------------------------------------------------------------
// Local types

class Local;

enum class Direction { Send, Recv };

namespace local {
struct Branch;
struct Skip {};
struct Action;
struct Seq;
struct Par;
struct Choice;
struct Rec;
struct Var;
struct Star;
}  // namespace local

class Local {
 public:
  struct Node;

  Local();  // skip

  static Local skip();
  static Local action(Direction dir, Participant self, Participant peer, std::vector<local::Branch> branches);
  static Local send(Participant self, Participant peer, std::vector<local::Branch> branches);
  static Local recv(Participant self, Participant peer, std::vector<local::Branch> branches);
  static Local seq(Local first, Local second);
  static Local par(Local left, Local right);
  static Local choice(Local left, Local right);
  static Local rec(RecVar var, Local body);
  static Local var(RecVar var);
  static Local star(Local body);

  const Node& node() const noexcept { return *node_; }

  template <class T>
  const T* as() const noexcept;

  template <class T>
  bool is() const noexcept { return as<T>() != nullptr; }

  friend bool operator==(const Local& a, const Local& b);

 private:
  explicit Local(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

namespace local {
struct Branch {
  Label label;
  Local cont;
};
/// `self peer!{...}` when dir is Send, `self peer?{...}` (receive from peer) when Recv.
struct Action {
  Direction dir;
  Participant self;
  Participant peer;
  std::vector<Branch> branches;
};
struct Seq {
  Local first;
  Local second;
};
struct Par {
  Local left;
  Local right;
};
struct Choice {
  Local left;
  Local right;
};
struct Rec {
  RecVar var;
  Local body;
};
struct Var {
  RecVar var;
};
struct Star {
  Local body;
};
using Variant = std::variant<Skip, Action, Seq, Par, Choice, Rec, Var, Star>;
}  // namespace local

struct Local::Node {
  local::Variant v;
};

template <class T>
const T* Local::as() const noexcept {
  return std::get_if<T>(&node_->v);
}

// Skip-identity constructors: `skip ; L`, `L ; skip`, `skip || L` and
// `L || skip` collapse to `L`; a choice between equal sides collapses too.
Local sequence(Local first, Local second);
Local parallel(Local left, Local right);
Local alternative(Local left, Local right);

// ---------------------------------------------------------------------------
// Structural queries

std::set<Participant> participants(const Global& g);
std::set<Participant> participants(const Local& l);
std::set<CommTriple> comm(const Global& g);

std::set<RecVar> freeVars(const Global& g);
std::set<RecVar> freeVars(const Local& l);

/// True iff `l` can complete without performing an action. Variables in
/// `boundOutside` are treated as bound (and non-terminated); any other free
/// variable throws std::invalid_argument.
bool terminated(const Local& l, const std::set<RecVar>& boundOutside = {});

/// Order-insensitive (per branch list) structural key: equal keys iff the
/// terms compare equal.
std::string canonicalKey(const Global& g);
std::string canonicalKey(const Local& l);

}  // namespace mpst
