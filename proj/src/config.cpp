#include "mpst/config.hpp"

namespace mpst {

SemanticsConfig preset(PresetId id) {
  SemanticsConfig c;
  switch (id) {
    case PresetId::VeryGentleIntroMPST:
      c.merge = MergeCriterion::Full;
      c.commModel = CommModel::Synchronous;
      c.allowParallel = false;
      c.allowFixedPoint = true;
      c.allowKleeneStar = false;
      break;
    case PresetId::GentleIntroMPAsyncST:
      c.merge = MergeCriterion::Plain;
      c.commModel = CommModel::OrderedAsync;
      c.allowParallel = false;
      c.allowFixedPoint = true;
      c.allowKleeneStar = false;
      break;
    case PresetId::APIGenInScala3:
      c.merge = MergeCriterion::Plain;
      c.commModel = CommModel::OrderedAsync;
      c.allowParallel = true;
      c.allowFixedPoint = false;
      c.allowKleeneStar = false;
      c.requireWellChannelled = true;
      break;
    case PresetId::ST4MP:
      c.merge = MergeCriterion::Plain;
      c.commModel = CommModel::OrderedAsync;
      c.allowParallel = true;
      c.allowFixedPoint = true;
      c.allowKleeneStar = true;
      c.requireWellChannelled = true;
      break;
    case PresetId::UnorderedChoreo:
      // Merge, parallel and recursion are unspecified for this source; the
      // most permissive choice is used.
      c.merge = MergeCriterion::Full;
      c.commModel = CommModel::UnorderedAsync;
      c.allowParallel = true;
      c.allowFixedPoint = true;
      c.allowKleeneStar = true;
      break;
  }
  return c;
}

std::string_view presetName(PresetId id) {
  switch (id) {
    case PresetId::VeryGentleIntroMPST: return "VeryGentleIntroMPST";
    case PresetId::GentleIntroMPAsyncST: return "GentleIntroMPAsyncST";
    case PresetId::APIGenInScala3: return "APIGenInScala3";
    case PresetId::ST4MP: return "ST4MP";
    case PresetId::UnorderedChoreo: return "UnorderedChoreo";
  }
  return "";
}

std::optional<PresetId> presetByName(std::string_view name) {
  for (auto id : kAllPresets)
    if (presetName(id) == name) return id;
  return std::nullopt;
}

std::vector<ConfigWarning> validateConfig(const SemanticsConfig& c) {
  std::vector<ConfigWarning> out;
  if (!c.allowFixedPoint && !c.allowKleeneStar) out.push_back({"no recursion scheme enabled"});
  if (c.requireWellChannelled && !c.allowParallel)
    out.push_back({"well-channelled requirement has no effect without parallel composition"});
  if (c == preset(PresetId::UnorderedChoreo)) out.push_back({"preset fields marked N/S in source"});
  return out;
}

std::string_view toString(MergeCriterion m) { return m == MergeCriterion::Plain ? "plain" : "full"; }

std::string_view toString(CommModel m) {
  switch (m) {
    case CommModel::Synchronous: return "sync";
    case CommModel::OrderedAsync: return "orderedAsync";
    case CommModel::UnorderedAsync: return "unorderedAsync";
  }
  return "";
}

std::optional<MergeCriterion> mergeFromString(std::string_view s) {
  if (s == "plain") return MergeCriterion::Plain;
  if (s == "full") return MergeCriterion::Full;
  return std::nullopt;
}

std::optional<CommModel> commModelFromString(std::string_view s) {
  if (s == "sync" || s == "synchronous") return CommModel::Synchronous;
  if (s == "orderedAsync" || s == "ordered") return CommModel::OrderedAsync;
  if (s == "unorderedAsync" || s == "unordered") return CommModel::UnorderedAsync;
  return std::nullopt;
}

std::string_view displayName(MergeCriterion m) { return m == MergeCriterion::Plain ? "Plain" : "Full"; }

}  // namespace mpst
