#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mpst/ast.hpp"
#include "mpst/result.hpp"

namespace mpst {

struct ParseError {
  int line = 1;  // 1-based
  int column = 1;  // 1-based
  std::string message;
  std::vector<std::string> expected;

  /// "line:column: message (expected ...)"
  std::string describe() const;
};

/// Protocol grammar (postfix `*` binds tightest, then `;`, `||`, `+`; all
/// binary operators are right-associative; `rec X . G` extends as far right
/// as possible):
///
///   G      ::= p "->" q ":" label | p "->" q ":" "{" branch ("," branch)* "}"
///            | G ";" G | G "||" G | G "+" G | "rec" X "." G | X
///            | "(" G ")" "*" | "(" G ")" | "skip"
///   branch ::= label (";" G)?
///
/// `//` starts a line comment. Re-binding a recursion variable that is
/// already in scope is rejected.
Result<Global, ParseError> parseGlobal(std::string_view source);

struct NamedSession {
  std::string name;
  Global global;
};

/// A `.mpst` file is either a single protocol or a sequence of
/// `example "<name>": <G>` entries. A bare protocol is returned under
/// `defaultName`.
Result<std::vector<NamedSession>, ParseError> parseSessionFile(std::string_view source,
                                                                const std::string& defaultName = "session");

/// Canonical text; parseGlobal(printGlobal(g)) == g.
std::string printGlobal(const Global& g);

enum class LocalStyle {
  Auto,  // `peer!label` when every action has the same subject, explicit otherwise
  Explicit,  // always `self!peer:label` / `self?peer:label`
};

std::string printLocal(const Local& l, LocalStyle style = LocalStyle::Auto);

}  // namespace mpst
