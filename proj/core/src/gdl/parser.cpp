#include "gavel/gdl/parser.hpp"

#include "gavel/common/error.hpp"

namespace gavel::gdl {

namespace {

constexpr int kMaxDepth = 256;

class Parser {
 public:
  Parser(std::span<const Token> tokens, std::string_view source) : tokens_(tokens), source_(source) {}

  Node parse_single() {
    if (tokens_.empty()) throw Error(Errc::UnexpectedToken, "empty input", 0);
    if (tokens_[0].kind == TokenKind::RParen)
      throw Error(Errc::UnbalancedParens, "unmatched ')'", tokens_[0].span.begin);
    if (tokens_[0].kind != TokenKind::LParen)
      throw Error(Errc::UnexpectedToken, "expected '('", tokens_[0].span.begin);
    Node node = parse_node(0);
    if (pos_ < tokens_.size()) {
      const Token& extra = tokens_[pos_];
      if (extra.kind == TokenKind::RParen || extra.kind == TokenKind::RBrace)
        throw Error(Errc::UnbalancedParens, "unmatched closing bracket", extra.span.begin);
      throw Error(Errc::UnexpectedToken, "trailing input after expression", extra.span.begin);
    }
    return node;
  }

 private:
  const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }

  Node parse_node(int depth) {
    const Token& open = tokens_[pos_++];
    if (depth > kMaxDepth) throw Error(Errc::UnexpectedToken, "nesting too deep", open.span.begin);
    Node node;
    const Token* head = peek();
    if (!head) throw Error(Errc::UnbalancedParens, "unclosed '('", open.span.begin);
    if (head->kind == TokenKind::Ident) {
      node.head = head->text;
    } else if (head->kind == TokenKind::String) {
      node.head = head->text.substr(1, head->text.size() - 2);
      node.is_reference = true;
    } else {
      throw Error(Errc::UnexpectedToken, "expected ludeme keyword after '('", head->span.begin);
    }
    ++pos_;

    for (;;) {
      const Token* t = peek();
      if (!t) throw Error(Errc::UnbalancedParens, "unclosed '('", open.span.begin);
      if (t->kind == TokenKind::RParen) {
        node.span = Span{open.span.begin, t->span.end};
        ++pos_;
        return node;
      }
      Arg arg;
      if (t->kind == TokenKind::KeyArg) {
        arg.key = t->text.substr(0, t->text.size() - 1);
        ++pos_;
        t = peek();
        if (!t) throw Error(Errc::UnbalancedParens, "unclosed '('", open.span.begin);
        if (t->kind == TokenKind::RParen || t->kind == TokenKind::KeyArg || t->kind == TokenKind::RBrace)
          throw Error(Errc::UnexpectedToken, "named argument without a value", t->span.begin);
      }
      arg.value = parse_value(depth, open);
      node.args.push_back(std::move(arg));
    }
  }

  Value parse_value(int depth, const Token& enclosing) {
    const Token& t = tokens_[pos_];
    switch (t.kind) {
      case TokenKind::LParen: return parse_node(depth + 1);
      case TokenKind::LBrace: return parse_set(depth + 1);
      case TokenKind::Ident: ++pos_; return Literal{Literal::Kind::Ident, t.text, t.span};
      case TokenKind::Int: ++pos_; return Literal{Literal::Kind::Int, t.text, t.span};
      case TokenKind::Real: ++pos_; return Literal{Literal::Kind::Real, t.text, t.span};
      case TokenKind::String:
        ++pos_;
        return Literal{Literal::Kind::String, t.text.substr(1, t.text.size() - 2), t.span};
      case TokenKind::RBrace:
        throw Error(Errc::UnexpectedToken, "'}' closes '(' opened at offset " + std::to_string(enclosing.span.begin),
                    t.span.begin);
      default: break;
    }
    throw Error(Errc::UnexpectedToken, "unexpected token", t.span.begin);
  }

  NodeSet parse_set(int depth) {
    const Token& open = tokens_[pos_++];
    if (depth > kMaxDepth) throw Error(Errc::UnexpectedToken, "nesting too deep", open.span.begin);
    NodeSet set;
    for (;;) {
      const Token* t = peek();
      if (!t) throw Error(Errc::UnbalancedParens, "unclosed '{'", open.span.begin);
      if (t->kind == TokenKind::RBrace) {
        set.span = Span{open.span.begin, t->span.end};
        ++pos_;
        return set;
      }
      if (t->kind != TokenKind::LParen)
        throw Error(Errc::UnexpectedToken, "only parenthesised expressions may appear inside '{}'", t->span.begin);
      set.items.push_back(parse_node(depth + 1));
    }
  }

  std::span<const Token> tokens_;
  std::string_view source_;
  std::size_t pos_ = 0;
};

}  // namespace

GameTree parse(std::span<const Token> tokens, std::string_view source) {
  Parser parser(tokens, source);
  Node root = parser.parse_single();
  if (root.head != "game" || root.is_reference)
    throw Error(Errc::UnexpectedToken, "top-level expression must be (game ...)", root.span.begin);
  return GameTree{std::move(root), std::string(source)};
}

GameTree parse_game(std::string_view source) {
  const auto tokens = tokenize(source);
  return parse(tokens, source);
}

Node parse_fragment(std::string_view source) {
  const auto tokens = tokenize(source);
  Parser parser(tokens, source);
  return parser.parse_single();
}

}  // namespace gavel::gdl
