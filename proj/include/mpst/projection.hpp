#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mpst/ast.hpp"
#include "mpst/config.hpp"
#include "mpst/result.hpp"

namespace mpst {

enum class ProjectionErrorKind { MergeUndefined, KPViolation };

std::string_view toString(ProjectionErrorKind k);

struct ProjectionError {
  ProjectionErrorKind kind;
  Participant participant;
  std::string offending;  // printed global sub-term
  MergeCriterion mergeCriterion;
  std::string message;  // "[<Criterion> Merge] - projection undefined for [<p>] in [<term>]" for merges
};

struct MergeError {
  std::string left;
  std::string right;
};

using LocalsMap = std::map<Participant, Local>;

/// Partial merge of local types owned by one participant. Plain requires all
/// inputs to be equal; Full additionally unites receive branches from the
/// same peer. `p?t ; L` is read as `p?{t ; L}` before comparing.
Result<Local, MergeError> merge(const std::vector<Local>& locals, MergeCriterion criterion);

/// Projection of `g` onto `r`. Precondition: checkCore(g) is empty.
Result<Local, ProjectionError> project(const Global& g, const Participant& r, const SemanticsConfig& c);

/// Projection onto every participant; the first failure in participant-name
/// order is returned.
Result<LocalsMap, ProjectionError> projectAll(const Global& g, const SemanticsConfig& c);

// ---------------------------------------------------------------------------
// Kleene-star projectability

struct FirstAction {
  Direction dir;
  Participant peer;
  Label label;

  friend auto operator<=>(const FirstAction&, const FirstAction&) = default;
  friend bool operator==(const FirstAction&, const FirstAction&) = default;
};

/// The actions `r` may perform first in `g`, read directly off the global type.
std::set<FirstAction> firstActions(const Global& g, const Participant& r);

/// The participant that picks between iterating `starBody` and leaving it:
/// the unique sender of its first communications, if there is one.
std::optional<Participant> loopDecider(const Global& starBody);

struct KPViolation {
  Participant participant;
  std::string message;
};

/// Every participant of `(starBody)* ; continuation`, except the loop
/// decider, must be able to tell an iteration from the continuation by the
/// first message it receives: its first actions in the body and in the
/// continuation are receives from one peer with disjoint labels (or it is
/// absent from the continuation). skip as continuation means the protocol ends.
std::optional<KPViolation> kpCheck(const Global& starBody, const Global& continuation);
std::optional<KPViolation> kpCheckFor(const Global& starBody, const Global& continuation, const Participant& r);

}  // namespace mpst
