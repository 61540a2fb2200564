#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace agglo {

enum class NodeKind : std::uint8_t {
  Activity,
  Sequence,  // (S1 S2 ...)
  Optional,  // (S?)
  Choice,    // (S1|S2|...)
  Plus,      // (S+)
  Star,      // (S*)
  Parallel,  // (S1&S2&...)
};

std::string_view kind_name(NodeKind kind);

// Abstract syntax tree of a structured program. Immutable value type:
// Sequence/Choice/Parallel hold >= 2 children, the unary constructs exactly
// one, activities none.
class Program {
 public:
  static Program activity(std::string name);
  static Program sequence(std::vector<Program> parts);
  static Program optional(Program body);
  static Program choice(std::vector<Program> branches);
  static Program plus(Program body);
  static Program star(Program body);
  static Program parallel(std::vector<Program> parts);
  static Program make(NodeKind kind, std::vector<Program> children);

  NodeKind kind() const { return kind_; }
  bool is_activity() const { return kind_ == NodeKind::Activity; }
  bool is_unary() const {
    return kind_ == NodeKind::Optional || kind_ == NodeKind::Plus || kind_ == NodeKind::Star;
  }
  // Activity name; empty for operators.
  const std::string& name() const { return name_; }
  std::span<const Program> children() const { return children_; }
  const Program& body() const { return children_.front(); }

  std::size_t node_count() const;
  std::size_t depth() const;
  std::size_t leaf_count() const;
  // Leaf activity names in preorder.
  std::vector<std::string> leaves() const;

  friend bool operator==(const Program&, const Program&) = default;

 private:
  Program(NodeKind kind, std::string name, std::vector<Program> children)
      : kind_(kind), name_(std::move(name)), children_(std::move(children)) {}

  NodeKind kind_ = NodeKind::Activity;
  std::string name_;
  std::vector<Program> children_;
};

// --- Tokens ----------------------------------------------------------------

enum class TokenKind : std::uint8_t { Name, Open, Close, Opt, Bar, Plus, Star, Amp };

struct Token {
  TokenKind kind;
  std::string text;

  friend bool operator==(const Token&, const Token&) = default;
  friend auto operator<=>(const Token&, const Token&) = default;
};

using TokenStream = std::vector<Token>;

Token name_token(std::string name);
Token op_token(TokenKind kind);

// Preorder serialization of the fully parenthesized expression.
TokenStream tokenize(const Program& p);
Program parse_tokens(std::span<const Token> tokens);

// --- Text forms ------------------------------------------------------------

enum class RenderFormat { Expr, Pseudocode, Dot, Json };

RenderFormat parse_render_format(std::string_view name);
std::string render(const Program& p, RenderFormat format);

std::string to_expr(const Program& p);
std::string to_pseudocode(const Program& p);
std::string to_dot(const Program& p);
nlohmann::json to_json(const Program& p);
Program from_json(const nlohmann::json& j);

// Accepts the output of to_expr() and the looser regex-like spelling with
// postfix operators outside the parentheses, e.g. "(a ((b|c) d)* (e&f))".
Program parse_expr(std::string_view text);

// --- Rewriting -------------------------------------------------------------

Program simplify(const Program& p);
Program canonicalize(const Program& p);

}  // namespace agglo
