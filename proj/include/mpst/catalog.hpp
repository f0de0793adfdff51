#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpst/parser.hpp"

namespace mpst {

/// Source text of the bundled example file.
const std::string& bundledSource();

/// The bundled examples, parsed; in file order.
const std::vector<NamedSession>& bundledExamples();

std::optional<NamedSession> findExample(const std::string& name);

}  // namespace mpst
