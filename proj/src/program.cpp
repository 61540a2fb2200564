#include "agglo/program.hpp"

#include <algorithm>
#include <sstream>

#include "agglo/error.hpp"
#include "agglo/event_log.hpp"

namespace agglo {

std::string_view kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Activity: return "activity";
    case NodeKind::Sequence: return "sequence";
    case NodeKind::Optional: return "optional";
    case NodeKind::Choice: return "choice";
    case NodeKind::Plus: return "plus";
    case NodeKind::Star: return "star";
    case NodeKind::Parallel: return "parallel";
  }
  return "?";
}

Program Program::activity(std::string name) {
  if (name.empty()) throw InputError("activity name must not be empty");
  return Program(NodeKind::Activity, std::move(name), {});
}

Program Program::make(NodeKind kind, std::vector<Program> children) {
  switch (kind) {
    case NodeKind::Activity:
      throw InvariantError("Program::make cannot build an activity");
    case NodeKind::Optional:
    case NodeKind::Plus:
    case NodeKind::Star:
      if (children.size() != 1) {
        throw InvariantError(std::string(kind_name(kind)) + " takes exactly one child");
      }
      break;
    case NodeKind::Sequence:
    case NodeKind::Choice:
    case NodeKind::Parallel:
      if (children.size() < 2) {
        throw InvariantError(std::string(kind_name(kind)) + " needs at least two children");
      }
      break;
  }
  return Program(kind, {}, std::move(children));
}

Program Program::sequence(std::vector<Program> parts) { return make(NodeKind::Sequence, std::move(parts)); }
Program Program::choice(std::vector<Program> branches) { return make(NodeKind::Choice, std::move(branches)); }
Program Program::parallel(std::vector<Program> parts) { return make(NodeKind::Parallel, std::move(parts)); }

Program Program::optional(Program body) {
  std::vector<Program> c;
  c.push_back(std::move(body));
  return make(NodeKind::Optional, std::move(c));
}

Program Program::plus(Program body) {
  std::vector<Program> c;
  c.push_back(std::move(body));
  return make(NodeKind::Plus, std::move(c));
}

Program Program::star(Program body) {
  std::vector<Program> c;
  c.push_back(std::move(body));
  return make(NodeKind::Star, std::move(c));
}

std::size_t Program::node_count() const {
  std::size_t n = 1;
  for (const auto& c : children_) n += c.node_count();
  return n;
}

std::size_t Program::depth() const {
  std::size_t d = 0;
  for (const auto& c : children_) d = std::max(d, c.depth());
  return d + 1;
}

std::size_t Program::leaf_count() const {
  if (is_activity()) return 1;
  std::size_t n = 0;
  for (const auto& c : children_) n += c.leaf_count();
  return n;
}

namespace {

void collect_leaves(const Program& p, std::vector<std::string>& out) {
  if (p.is_activity()) {
    out.push_back(p.name());
    return;
  }
  for (const auto& c : p.children()) collect_leaves(c, out);
}

}  // namespace

std::vector<std::string> Program::leaves() const {
  std::vector<std::string> out;
  collect_leaves(*this, out);
  return out;
}

// --- Tokens ----------------------------------------------------------------

Token name_token(std::string name) { return Token{TokenKind::Name, std::move(name)}; }

Token op_token(TokenKind kind) {
  switch (kind) {
    case TokenKind::Open: return {kind, "("};
    case TokenKind::Close: return {kind, ")"};
    case TokenKind::Opt: return {kind, "?"};
    case TokenKind::Bar: return {kind, "|"};
    case TokenKind::Plus: return {kind, "+"};
    case TokenKind::Star: return {kind, "*"};
    case TokenKind::Amp: return {kind, "&"};
    case TokenKind::Name: break;
  }
  throw InvariantError("op_token called with a name token kind");
}

namespace {

void emit_tokens(const Program& p, TokenStream& out) {
  switch (p.kind()) {
    case NodeKind::Activity:
      out.push_back(name_token(p.name()));
      return;
    case NodeKind::Optional:
    case NodeKind::Plus:
    case NodeKind::Star:
      out.push_back(op_token(TokenKind::Open));
      emit_tokens(p.body(), out);
      out.push_back(op_token(p.kind() == NodeKind::Optional ? TokenKind::Opt
                             : p.kind() == NodeKind::Plus   ? TokenKind::Plus
                                                            : TokenKind::Star));
      out.push_back(op_token(TokenKind::Close));
      return;
    case NodeKind::Sequence:
    case NodeKind::Choice:
    case NodeKind::Parallel: {
      out.push_back(op_token(TokenKind::Open));
      bool first = true;
      for (const auto& c : p.children()) {
        if (!first && p.kind() == NodeKind::Choice) out.push_back(op_token(TokenKind::Bar));
        if (!first && p.kind() == NodeKind::Parallel) out.push_back(op_token(TokenKind::Amp));
        emit_tokens(c, out);
        first = false;
      }
      out.push_back(op_token(TokenKind::Close));
      return;
    }
  }
}

bool is_special(char c) {
  return c == '(' || c == ')' || c == '?' || c == '|' || c == '+' || c == '*' || c == '&' ||
         c == '"' || c == '\\' || c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
         c == '\f' || c == '\v';
}

std::string quote_name(const std::string& name) {
  bool plain = !name.empty() && std::none_of(name.begin(), name.end(), is_special);
  if (plain) return name;
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

struct Lexed {
  TokenStream tokens;
  std::vector<std::size_t> offsets;
};

Lexed lex(std::string_view text) {
  Lexed out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      ++i;
      continue;
    }
    std::size_t start = i;
    TokenKind kind = TokenKind::Name;
    switch (c) {
      case '(': kind = TokenKind::Open; break;
      case ')': kind = TokenKind::Close; break;
      case '?': kind = TokenKind::Opt; break;
      case '|': kind = TokenKind::Bar; break;
      case '+': kind = TokenKind::Plus; break;
      case '*': kind = TokenKind::Star; break;
      case '&': kind = TokenKind::Amp; break;
      default: break;
    }
    if (kind != TokenKind::Name) {
      out.tokens.push_back(op_token(kind));
      out.offsets.push_back(start);
      ++i;
      continue;
    }
    std::string name;
    if (c == '"') {
      ++i;
      bool closed = false;
      while (i < text.size()) {
        char d = text[i++];
        if (d == '\\') {
          if (i >= text.size()) break;
          name += text[i++];
        } else if (d == '"') {
          closed = true;
          break;
        } else {
          name += d;
        }
      }
      if (!closed) throw SyntaxError("unterminated quoted activity name", start);
      if (name.empty()) throw SyntaxError("empty activity name", start);
    } else if (c == '\\') {
      throw SyntaxError("unexpected '\\'", start);
    } else {
      while (i < text.size() && !is_special(text[i])) name += text[i++];
    }
    out.tokens.push_back(name_token(std::move(name)));
    out.offsets.push_back(start);
  }
  return out;
}

class Parser {
 public:
  Parser(std::span<const Token> tokens, std::span<const std::size_t> offsets, std::size_t end_offset)
      : tokens_(tokens), offsets_(offsets), end_offset_(end_offset) {}

  Program parse() {
    auto p = alternation();
    if (pos_ != tokens_.size()) fail("unexpected '" + tokens_[pos_].text + "'");
    return p;
  }

 private:
  bool at(TokenKind kind) const { return pos_ < tokens_.size() && tokens_[pos_].kind == kind; }

  std::size_t where() const {
    if (pos_ < tokens_.size()) return offsets_.empty() ? pos_ : offsets_[pos_];
    return offsets_.empty() ? tokens_.size() : end_offset_;
  }

  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, where()); }

  Program alternation() {
    auto first = concatenation();
    if (!at(TokenKind::Bar) && !at(TokenKind::Amp)) return first;
    TokenKind sep = tokens_[pos_].kind;
    std::vector<Program> items;
    items.push_back(std::move(first));
    while (at(TokenKind::Bar) || at(TokenKind::Amp)) {
      if (!at(sep)) fail("cannot mix '|' and '&' without parentheses");
      ++pos_;
      items.push_back(concatenation());
    }
    return sep == TokenKind::Bar ? Program::choice(std::move(items))
                                 : Program::parallel(std::move(items));
  }

  Program concatenation() {
    std::vector<Program> items;
    while (at(TokenKind::Name) || at(TokenKind::Open)) items.push_back(postfixed());
    if (items.empty()) {
      fail(pos_ < tokens_.size() ? "expected activity or '(' before '" + tokens_[pos_].text + "'"
                                 : "unexpected end of input");
    }
    if (items.size() == 1) return std::move(items.front());
    return Program::sequence(std::move(items));
  }

  Program postfixed() {
    auto p = atom();
    while (true) {
      if (at(TokenKind::Opt)) {
        p = Program::optional(std::move(p));
      } else if (at(TokenKind::Plus)) {
        p = Program::plus(std::move(p));
      } else if (at(TokenKind::Star)) {
        p = Program::star(std::move(p));
      } else {
        break;
      }
      ++pos_;
    }
    return p;
  }

  Program atom() {
    if (at(TokenKind::Name)) {
      if (is_reserved(tokens_[pos_].text)) fail("reserved activity '" + tokens_[pos_].text + "'");
      return Program::activity(tokens_[pos_++].text);
    }
    if (!at(TokenKind::Open)) fail("expected activity or '('");
    ++pos_;
    auto p = alternation();
    if (!at(TokenKind::Close)) fail("expected ')'");
    ++pos_;
    return p;
  }

  std::span<const Token> tokens_;
  std::span<const std::size_t> offsets_;
  std::size_t end_offset_;
  std::size_t pos_ = 0;
};

void expr_into(const Program& p, std::string& out) {
  switch (p.kind()) {
    case NodeKind::Activity:
      out += quote_name(p.name());
      return;
    case NodeKind::Optional:
    case NodeKind::Plus:
    case NodeKind::Star:
      out += '(';
      expr_into(p.body(), out);
      out += p.kind() == NodeKind::Optional ? '?' : p.kind() == NodeKind::Plus ? '+' : '*';
      out += ')';
      return;
    case NodeKind::Sequence:
    case NodeKind::Choice:
    case NodeKind::Parallel: {
      const char* sep = p.kind() == NodeKind::Sequence ? " " : p.kind() == NodeKind::Choice ? "|" : "&";
      out += '(';
      bool first = true;
      for (const auto& c : p.children()) {
        if (!first) out += sep;
        expr_into(c, out);
        first = false;
      }
      out += ')';
      return;
    }
  }
}

void pseudo_into(const Program& p, int indent, std::ostringstream& out) {
  auto pad = [&](int level) { return std::string(static_cast<std::size_t>(level) * 2, ' '); };
  switch (p.kind()) {
    case NodeKind::Activity:
      out << pad(indent) << p.name() << '\n';
      return;
    case NodeKind::Sequence:
      for (const auto& c : p.children()) pseudo_into(c, indent, out);
      return;
    case NodeKind::Optional:
      out << pad(indent) << "if (.):\n";
      pseudo_into(p.body(), indent + 1, out);
      return;
    case NodeKind::Choice: {
      auto branches = p.children();
      for (std::size_t i = 0; i < branches.size(); ++i) {
        if (i == 0) {
          out << pad(indent) << "if (.):\n";
        } else if (i + 1 < branches.size()) {
          out << pad(indent) << "elif (.):\n";
        } else {
          out << pad(indent) << "else:\n";
        }
        pseudo_into(branches[i], indent + 1, out);
      }
      return;
    }
    case NodeKind::Plus:
    case NodeKind::Star:
      out << pad(indent) << "while (.):\n";
      pseudo_into(p.body(), indent + 1, out);
      return;
    case NodeKind::Parallel:
      out << pad(indent) << "para:\n";
      for (const auto& c : p.children()) {
        // A multi-statement part needs its own block to stay distinguishable.
        if (c.kind() == NodeKind::Sequence) {
          out << pad(indent + 1) << "block:\n";
          pseudo_into(c, indent + 2, out);
        } else {
          pseudo_into(c, indent + 1, out);
        }
      }
      return;
  }
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string_view op_symbol(NodeKind kind) {
  switch (kind) {
    case NodeKind::Sequence: return "seq";
    case NodeKind::Optional: return "?";
    case NodeKind::Choice: return "|";
    case NodeKind::Plus: return "+";
    case NodeKind::Star: return "*";
    case NodeKind::Parallel: return "&";
    case NodeKind::Activity: break;
  }
  return "";
}

std::size_t dot_into(const Program& p, std::size_t& next, std::ostringstream& out) {
  std::size_t id = next++;
  if (p.is_activity()) {
    out << "  n" << id << " [label=\"" << dot_escape(p.name()) << "\", shape=box];\n";
    return id;
  }
  out << "  n" << id << " [label=\"" << op_symbol(p.kind()) << "\", shape=ellipse];\n";
  for (const auto& c : p.children()) {
    auto child = dot_into(c, next, out);
    out << "  n" << id << " -> n" << child << ";\n";
  }
  return id;
}

}  // namespace

TokenStream tokenize(const Program& p) {
  TokenStream out;
  emit_tokens(p, out);
  return out;
}

Program parse_tokens(std::span<const Token> tokens) {
  return Parser(tokens, {}, tokens.size()).parse();
}

Program parse_expr(std::string_view text) {
  auto lexed = lex(text);
  if (lexed.tokens.empty()) throw SyntaxError("empty expression", 0);
  return Parser(lexed.tokens, lexed.offsets, text.size()).parse();
}

std::string to_expr(const Program& p) {
  std::string out;
  expr_into(p, out);
  return out;
}

std::string to_pseudocode(const Program& p) {
  std::ostringstream out;
  pseudo_into(p, 0, out);
  return out.str();
}

std::string to_dot(const Program& p) {
  std::ostringstream out;
  out << "digraph program {\n";
  std::size_t next = 0;
  dot_into(p, next, out);
  out << "}\n";
  return out.str();
}

nlohmann::json to_json(const Program& p) {
  nlohmann::json j;
  j["kind"] = std::string(kind_name(p.kind()));
  if (p.is_activity()) {
    j["name"] = p.name();
  } else {
    auto children = nlohmann::json::array();
    for (const auto& c : p.children()) children.push_back(to_json(c));
    j["children"] = std::move(children);
  }
  return j;
}

Program from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw FormatError("program JSON node needs a string 'kind'");
  }
  auto kind = j["kind"].get<std::string>();
  if (kind == "activity") {
    if (!j.contains("name") || !j["name"].is_string()) {
      throw FormatError("activity node needs a string 'name'");
    }
    return Program::activity(j["name"].get<std::string>());
  }
  static constexpr NodeKind kinds[] = {NodeKind::Sequence, NodeKind::Optional, NodeKind::Choice,
                                       NodeKind::Plus, NodeKind::Star, NodeKind::Parallel};
  for (auto k : kinds) {
    if (kind != kind_name(k)) continue;
    if (!j.contains("children") || !j["children"].is_array()) {
      throw FormatError(kind + " node needs a 'children' array");
    }
    std::vector<Program> children;
    for (const auto& c : j["children"]) children.push_back(from_json(c));
    bool unary = k == NodeKind::Optional || k == NodeKind::Plus || k == NodeKind::Star;
    if (unary ? children.size() != 1 : children.size() < 2) {
      throw FormatError(kind + " node has the wrong number of children");
    }
    return Program::make(k, std::move(children));
  }
  throw FormatError("unknown program node kind '" + kind + "'");
}

RenderFormat parse_render_format(std::string_view name) {
  if (name == "expr") return RenderFormat::Expr;
  if (name == "pseudocode") return RenderFormat::Pseudocode;
  if (name == "dot") return RenderFormat::Dot;
  if (name == "json") return RenderFormat::Json;
  throw UsageError("unknown format '" + std::string(name) +
                   "' (expected expr, pseudocode, dot or json)");
}

std::string render(const Program& p, RenderFormat format) {
  switch (format) {
    case RenderFormat::Expr: return to_expr(p);
    case RenderFormat::Pseudocode: return to_pseudocode(p);
    case RenderFormat::Dot: return to_dot(p);
    case RenderFormat::Json: return to_json(p).dump(2);
  }
  throw InvariantError("unhandled render format");
}

}  // namespace agglo
