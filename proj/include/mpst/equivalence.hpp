#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mpst/semantics.hpp"

namespace mpst {

/// Labels treated as internal moves. Empty by default: every label is visible,
/// and branching bisimulation then coincides with strong bisimulation.
struct TauPolicy {
  std::vector<std::function<bool(const ActionLabel&)>> predicates;

  bool empty() const noexcept { return predicates.empty(); }
  bool isTau(const ActionLabel& a) const;

  /// Hides exactly the given printed labels.
  static TauPolicy hiding(std::set<std::string> printed);
};

enum class BisimResult { Bisimilar, NotBisimilar, InconclusiveDepthBound };
std::string_view toString(BisimResult r);  // "bisimilar", "notBisimilar", "inconclusiveDepthBound"

enum class Side { A, B };
std::string_view toString(Side s);

struct Evidence {
  /// "trace": `path` replays on the side opposite to `refusingSide`, and its
  /// last label is refused by every state `refusingSide` can reach with the
  /// rest of the path.
  /// "branching": the traces agree; `path` is a line of play in which the
  /// attacker, moving on `attackers[i]`, always reaches a state the defender
  /// cannot match.
  std::string kind;
  std::vector<std::string> path;
  Side refusingSide = Side::B;
  std::vector<Side> attackers;
};

struct BisimVerdict {
  BisimResult result = BisimResult::Bisimilar;
  std::size_t depthUsed = 0;
  std::optional<Evidence> evidence;
  std::vector<std::pair<std::size_t, std::size_t>> relation;  // (state of a, state of b), on Bisimilar
  std::vector<std::string> notes;
};

/// Exact partition refinement when neither LTS is truncated; otherwise a
/// product game bounded to `depth` layers that can refute but never confirm.
BisimVerdict branchingBisim(const Lts& a, const Lts& b, std::size_t depth = 100, const TauPolicy& tau = {});

/// Independent check used by tests: Kanellakis-Smolka strong bisimilarity of
/// the two initial states (ignores truncation).
bool strongBisimilar(const Lts& a, const Lts& b);

/// Re-derives a NotBisimilar evidence from scratch. Throws std::logic_error
/// if it does not hold up.
void verifyEvidence(const Lts& a, const Lts& b, const Evidence& e, const TauPolicy& tau = {});

struct TraceDifference {
  std::vector<std::string> trace;
  Side acceptedBy;
};

/// Traces of length <= maxLen accepted by exactly one side, in lexicographic
/// order, at most 20.
std::vector<TraceDifference> traceDiff(const Lts& a, const Lts& b, std::size_t maxLen);

inline constexpr std::size_t kTraceDiffCap = 20;

}  // namespace mpst
