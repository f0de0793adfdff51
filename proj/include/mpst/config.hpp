#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mpst {

enum class MergeCriterion { Plain, Full };
enum class CommModel { Synchronous, OrderedAsync, UnorderedAsync };

/// One selection of features defining a base semantics.
struct SemanticsConfig {
  MergeCriterion merge = MergeCriterion::Full;
  CommModel commModel = CommModel::Synchronous;
  bool allowParallel = true;
  bool allowFixedPoint = true;
  bool allowKleeneStar = true;
  bool requireWellBranched = false;
  bool requireWellChannelled = false;
  std::size_t explorationMaxStates = 10000;
  std::size_t bisimDepthBound = 100;

  friend bool operator==(const SemanticsConfig&, const SemanticsConfig&) = default;
};

enum class PresetId { VeryGentleIntroMPST, GentleIntroMPAsyncST, APIGenInScala3, ST4MP, UnorderedChoreo };

inline constexpr std::array<PresetId, 5> kAllPresets = {
    PresetId::VeryGentleIntroMPST, PresetId::GentleIntroMPAsyncST, PresetId::APIGenInScala3, PresetId::ST4MP,
    PresetId::UnorderedChoreo};

SemanticsConfig preset(PresetId id);
std::string_view presetName(PresetId id);
std::optional<PresetId> presetByName(std::string_view name);

struct ConfigWarning {
  std::string message;
};

/// Odd but legal feature combinations.
std::vector<ConfigWarning> validateConfig(const SemanticsConfig& c);

// Wire names: "plain"|"full", "sync"|"orderedAsync"|"unorderedAsync".
std::string_view toString(MergeCriterion m);
std::string_view toString(CommModel m);
std::optional<MergeCriterion> mergeFromString(std::string_view s);
/// Accepts the wire names and the short CLI aliases "ordered"/"unordered".
std::optional<CommModel> commModelFromString(std::string_view s);

/// "Plain" / "Full", as used in projection error messages.
std::string_view displayName(MergeCriterion m);

}  // namespace mpst
