#include "mpst/parser.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>

namespace mpst {

std::string ParseError::describe() const {
  std::ostringstream out;
  out << line << ':' << column << ": " << message;
  if (!expected.empty()) {
    out << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) out << (i + 1 == expected.size() ? " or " : ", ");
      out << expected[i];
    }
    out << ')';
  }
  return out.str();
}

namespace {

enum class Tok { Ident, String, Arrow, Colon, LBrace, RBrace, Comma, Semi, Bars, Plus, Dot, LParen, RParen, Star, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::string describe(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::String: return "string";
    case Tok::Arrow: return "'->'";
    case Tok::Colon: return "':'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Bars: return "'||'";
    case Tok::Plus: return "'+'";
    case Tok::Dot: return "'.'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Star: return "'*'";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct LexFailure {
  ParseError error;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    int tl = line, tc = col;
    auto punct = [&](Tok k, std::size_t n) {
      out.push_back(Token{k, std::string(src.substr(i, n)), tl, tc});
      advance(n);
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      punct(Tok::Ident, j - i);
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"')
        throw LexFailure{ParseError{tl, tc, "unterminated string literal", {"'\"'"}}};
      out.push_back(Token{Tok::String, std::string(src.substr(i + 1, j - i - 1)), tl, tc});
      advance(j - i + 1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      punct(Tok::Arrow, 2);
      continue;
    }
    if (c == '|' && i + 1 < src.size() && src[i + 1] == '|') {
      punct(Tok::Bars, 2);
      continue;
    }
    switch (c) {
      case ':': punct(Tok::Colon, 1); continue;
      case '{': punct(Tok::LBrace, 1); continue;
      case '}': punct(Tok::RBrace, 1); continue;
      case ',': punct(Tok::Comma, 1); continue;
      case ';': punct(Tok::Semi, 1); continue;
      case '+': punct(Tok::Plus, 1); continue;
      case '.': punct(Tok::Dot, 1); continue;
      case '(': punct(Tok::LParen, 1); continue;
      case ')': punct(Tok::RParen, 1); continue;
      case '*': punct(Tok::Star, 1); continue;
      default: break;
    }
    throw LexFailure{ParseError{tl, tc, std::string("unexpected character '") + c + "'", {}}};
  }
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

bool isKeyword(const std::string& s) { return s == "rec" || s == "skip"; }

struct Failure {
  ParseError error;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Global protocol() { return choice(); }

  bool at(Tok k) const { return peek().kind == k; }
  bool atWord(std::string_view w, std::size_t ahead = 0) const {
    const auto& t = peek(ahead);
    return t.kind == Tok::Ident && t.text == w;
  }
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }

  Token expect(Tok k) {
    if (!at(k)) fail("unexpected " + shown(peek()), {describe(k)});
    return toks_[pos_++];
  }

  [[noreturn]] void fail(std::string message, std::vector<std::string> expected) const {
    const auto& t = peek();
    throw Failure{ParseError{t.line, t.column, std::move(message), std::move(expected)}};
  }

  static std::string shown(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    if (t.kind == Tok::String) return "string \"" + t.text + "\"";
    return "'" + t.text + "'";
  }

  void resetScope() { bound_.clear(); }

 private:
  Global choice() {
    Global left = parallel();
    if (at(Tok::Plus)) {
      ++pos_;
      return Global::choice(std::move(left), choice());
    }
    return left;
  }

  Global parallel() {
    Global left = sequence();
    if (at(Tok::Bars)) {
      ++pos_;
      return Global::par(std::move(left), parallel());
    }
    return left;
  }

  Global sequence() {
    Global left = primary();
    if (at(Tok::Semi)) {
      ++pos_;
      return Global::seq(std::move(left), sequence());
    }
    return left;
  }

  std::string name(const char* what) {
    if (!at(Tok::Ident)) fail("unexpected " + shown(peek()), {what});
    if (isKeyword(peek().text)) fail("reserved word '" + peek().text + "' cannot be used as " + what, {what});
    return toks_[pos_++].text;
  }

  Global primary() {
    if (atWord("rec")) {
      ++pos_;
      const Token& at_var = peek();
      std::string var = name("recursion variable");
      if (std::find(bound_.begin(), bound_.end(), var) != bound_.end())
        throw Failure{ParseError{at_var.line, at_var.column, "recursion variable '" + var + "' shadows an enclosing binder", {}}};
      expect(Tok::Dot);
      bound_.push_back(var);
      Global body = choice();
      bound_.pop_back();
      return Global::rec(RecVar{var}, std::move(body));
    }
    if (atWord("skip")) {
      ++pos_;
      return Global::skip();
    }
    if (at(Tok::LParen)) {
      ++pos_;
      Global inner = choice();
      expect(Tok::RParen);
      if (at(Tok::Star)) {
        ++pos_;
        return Global::star(std::move(inner));
      }
      return inner;
    }
    if (at(Tok::Ident)) {
      std::string first = name("participant");
      if (!at(Tok::Arrow)) return Global::var(RecVar{first});
      ++pos_;
      std::string second = name("participant");
      expect(Tok::Colon);
      if (at(Tok::LBrace)) {
        ++pos_;
        std::vector<global::Branch> branches;
        branches.push_back(branch());
        while (at(Tok::Comma)) {
          ++pos_;
          branches.push_back(branch());
        }
        if (!at(Tok::RBrace)) fail("unexpected " + shown(peek()), {"','", "'}'"});
        ++pos_;
        return Global::comm(Participant{first}, Participant{second}, std::move(branches));
      }
      std::string label = name("label");
      return Global::message(Participant{first}, Participant{second}, Label{label});
    }
    fail("unexpected " + shown(peek()), {"participant", "recursion variable", "'rec'", "'skip'", "'('"});
  }

  global::Branch branch() {
    std::string label = name("label");
    if (at(Tok::Semi)) {
      ++pos_;
      return global::Branch{Label{label}, choice()};
    }
    return global::Branch{Label{label}, Global::skip()};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> bound_;
};

// ---------------------------------------------------------------------------
// Printing

constexpr int kRec = 0;
constexpr int kChoice = 1;
constexpr int kPar = 2;
constexpr int kSeq = 3;
constexpr int kAtom = 4;

struct Printed {
  std::string text;
  int level;
};

std::string wrap(const Printed& p, int required) {
  return p.level < required ? "(" + p.text + ")" : p.text;
}

Printed printG(const Global& g) {
  return std::visit(
      Overloaded{
          [](const global::Skip&) { return Printed{"skip", kAtom}; },
          [](const global::Comm& c) {
            std::string head = c.sender.name + "->" + c.receiver.name + ":";
            if (c.branches.size() == 1 && c.branches[0].cont.is<global::Skip>())
              return Printed{head + c.branches[0].label.name, kAtom};
            std::string body;
            for (std::size_t i = 0; i < c.branches.size(); ++i) {
              if (i) body += ", ";
              body += c.branches[i].label.name;
              if (!c.branches[i].cont.is<global::Skip>()) body += " ; " + printG(c.branches[i].cont).text;
            }
            return Printed{head + "{" + body + "}", kAtom};
          },
          [](const global::Seq& s) {
            return Printed{wrap(printG(s.first), kSeq + 1) + " ; " + wrap(printG(s.second), kSeq), kSeq};
          },
          [](const global::Par& p) {
            return Printed{wrap(printG(p.left), kPar + 1) + " || " + wrap(printG(p.right), kPar), kPar};
          },
          [](const global::Choice& c) {
            return Printed{wrap(printG(c.left), kChoice + 1) + " + " + wrap(printG(c.right), kChoice), kChoice};
          },
          [](const global::Rec& r) { return Printed{"rec " + r.var.name + " . " + printG(r.body).text, kRec}; },
          [](const global::Var& v) { return Printed{v.var.name, kAtom}; },
          [](const global::Star& s) { return Printed{"(" + printG(s.body).text + ")*", kAtom}; },
      },
      g.node().v);
}

bool singleSubject(const Local& l, std::optional<Participant>& subject) {
  return std::visit(Overloaded{
                        [](const local::Skip&) { return true; },
                        [&](const local::Action& a) {
                          if (subject && *subject != a.self) return false;
                          subject = a.self;
                          return std::all_of(a.branches.begin(), a.branches.end(),
                                             [&](const auto& b) { return singleSubject(b.cont, subject); });
                        },
                        [&](const local::Seq& s) { return singleSubject(s.first, subject) && singleSubject(s.second, subject); },
                        [&](const local::Par& p) { return singleSubject(p.left, subject) && singleSubject(p.right, subject); },
                        [&](const local::Choice& c) { return singleSubject(c.left, subject) && singleSubject(c.right, subject); },
                        [&](const local::Rec& r) { return singleSubject(r.body, subject); },
                        [](const local::Var&) { return true; },
                        [&](const local::Star& s) { return singleSubject(s.body, subject); },
                    },
                    l.node().v);
}

Printed printL(const Local& l, bool abbreviate) {
  return std::visit(
      Overloaded{
          [](const local::Skip&) { return Printed{"skip", kAtom}; },
          [&](const local::Action& a) {
            const char* op = a.dir == Direction::Send ? "!" : "?";
            std::string head = abbreviate ? a.peer.name + op : a.self.name + op + a.peer.name + ":";
            if (a.branches.size() == 1 && a.branches[0].cont.is<local::Skip>())
              return Printed{head + a.branches[0].label.name, kAtom};
            std::string body;
            for (std::size_t i = 0; i < a.branches.size(); ++i) {
              if (i) body += ", ";
              body += a.branches[i].label.name;
              if (!a.branches[i].cont.is<local::Skip>()) body += " ; " + printL(a.branches[i].cont, abbreviate).text;
            }
            return Printed{head + "{" + body + "}", kAtom};
          },
          [&](const local::Seq& s) {
            return Printed{wrap(printL(s.first, abbreviate), kSeq + 1) + " ; " + wrap(printL(s.second, abbreviate), kSeq),
                           kSeq};
          },
          [&](const local::Par& p) {
            return Printed{wrap(printL(p.left, abbreviate), kPar + 1) + " || " + wrap(printL(p.right, abbreviate), kPar),
                           kPar};
          },
          [&](const local::Choice& c) {
            // Local choices are always parenthesised.
            return Printed{"(" + wrap(printL(c.left, abbreviate), kChoice + 1) + " + " +
                               wrap(printL(c.right, abbreviate), kChoice) + ")",
                           kAtom};
          },
          [&](const local::Rec& r) {
            return Printed{"rec " + r.var.name + " . " + printL(r.body, abbreviate).text, kRec};
          },
          [](const local::Var& v) { return Printed{v.var.name, kAtom}; },
          [&](const local::Star& s) { return Printed{"(" + printL(s.body, abbreviate).text + ")*", kAtom}; },
      },
      l.node().v);
}

}  // namespace

Result<Global, ParseError> parseGlobal(std::string_view source) {
  try {
    Parser p(tokenize(source));
    Global g = p.protocol();
    if (!p.at(Tok::End)) p.fail("unexpected " + Parser::shown(p.peek()) + " after protocol", {"';'", "'||'", "'+'", "end of input"});
    return g;
  } catch (const LexFailure& f) {
    return f.error;
  } catch (const Failure& f) {
    return f.error;
  }
}

Result<std::vector<NamedSession>, ParseError> parseSessionFile(std::string_view source, const std::string& defaultName) {
  try {
    Parser p(tokenize(source));
    std::vector<NamedSession> out;
    if (!(p.atWord("example") && p.peek(1).kind == Tok::String)) {
      Global g = p.protocol();
      if (!p.at(Tok::End)) p.fail("unexpected " + Parser::shown(p.peek()) + " after protocol", {"';'", "'||'", "'+'", "end of input"});
      out.push_back(NamedSession{defaultName, std::move(g)});
      return out;
    }
    while (!p.at(Tok::End)) {
      if (!p.atWord("example")) p.fail("unexpected " + Parser::shown(p.peek()), {"'example'", "end of input"});
      p.expect(Tok::Ident);
      std::string name = p.expect(Tok::String).text;
      p.expect(Tok::Colon);
      p.resetScope();
      out.push_back(NamedSession{std::move(name), p.protocol()});
    }
    return out;
  } catch (const LexFailure& f) {
    return f.error;
  } catch (const Failure& f) {
    return f.error;
  }
}

std::string printGlobal(const Global& g) { return printG(g).text; }

std::string printLocal(const Local& l, LocalStyle style) {
  bool abbreviate = false;
  if (style == LocalStyle::Auto) {
    std::optional<Participant> subject;
    abbreviate = singleSubject(l, subject);
  }
  return printL(l, abbreviate).text;
}

}  // namespace mpst
