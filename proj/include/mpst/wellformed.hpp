#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mpst/ast.hpp"
#include "mpst/config.hpp"

namespace mpst {

enum class ViolationKind {
  SelfCommunication,
  DuplicateLabels,
  UnguardedRecursion,
  UnboundVariable,
  ParallelForbidden,
  FixedPointForbidden,
  KleeneStarForbidden,
  NotWellChannelled,
  NotWellBranched,
};

std::string_view toString(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::vector<Participant> subjects;
  std::string location;  // printed offending sub-term
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Empty iff every requested check passes. Violations are kept sorted by
/// kind, then location.
struct CheckReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationKind k) const noexcept;
  void append(const CheckReport& other);
};

CheckReport checkCore(const Global& g);
CheckReport checkGatingGlobal(const Global& g, const SemanticsConfig& c);
/// Subject is the local's owner: the subject of its actions, or `owner` when given.
CheckReport checkGatingLocal(const Local& l, const SemanticsConfig& c, std::optional<Participant> owner = std::nullopt);
CheckReport checkWellChannelled(const Global& g);
CheckReport checkWellBranched(const Global& g);

/// Core checks, construct gating, then the extra requirements enabled in `c`.
CheckReport checkAll(const Global& g, const SemanticsConfig& c);

/// Communications that can happen first in `g`.
std::set<CommTriple> firstComms(const Global& g);

/// True iff `g` can complete without any communication (skip, star, ...).
bool terminable(const Global& g);

}  // namespace mpst
