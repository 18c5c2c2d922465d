#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slowmani/ratfunc.hpp"

namespace slowmani {

struct Token {
    enum class Kind {
        Ident, Number,
        Plus, Minus, Star, Slash, Caret,
        LParen, RParen, LBracket, RBracket,
        Comma, Equals, Colon, Newline, End
    };
    Kind kind;
    std::string text;
    int line = 0;
    int col = 0;
};

// Identifiers, integer/decimal literals, operators + - * / ^, brackets,
// comma, '=' and ':'; newlines are statement separators and '#' starts a
// comment running to end of line.
std::vector<Token> tokenize(const std::string& source);

// Expression AST.  '^' exponents are restricted to literal non-negative
// integer subexpressions, validated at parse time.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Number, Symbol, Neg, Add, Sub, Mul, Div, Pow };
    Kind kind;
    Rat number;         // Kind::Number
    std::string symbol; // Kind::Symbol
    ExprPtr a, b;
    int line = 0;

    static ExprPtr make_number(const Rat& v, int line = 0);
    static ExprPtr make_symbol(std::string name, int line = 0);
    static ExprPtr unary(Kind k, ExprPtr x, int line = 0);
    static ExprPtr binary(Kind k, ExprPtr x, ExprPtr y, int line = 0);

    std::string str() const;
};

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// Folds an expression built purely from number literals; nullopt if any
// symbol occurs.
std::optional<Rat> fold_constant(const ExprPtr& e);

// Cursor over a token stream; shared by the expression and problem parsers.
class TokenCursor {
public:
    explicit TokenCursor(const std::vector<Token>& toks) : toks_(&toks) {}
    const Token& peek() const { return (*toks_)[pos_]; }
    const Token& get() { return (*toks_)[pos_ == toks_->size() - 1 ? pos_ : pos_++]; }
    bool at(Token::Kind k) const { return peek().kind == k; }
    bool accept(Token::Kind k) {
        if (!at(k)) return false;
        get();
        return true;
    }
    const Token& expect(Token::Kind k, const std::string& what);

private:
    const std::vector<Token>* toks_;
    size_t pos_ = 0;
};

// Precedence: '^' > unary '-' > '*','/' > binary '+','-'; '^' is
// right-associative, the rest left-associative.
ExprPtr parse_expression(TokenCursor& cur);

// Convenience: tokenize + parse a single expression, requiring all input
// consumed.
ExprPtr parse_expression(const std::string& source);

// Lowers an AST into the ring; parameters and variables are both ring
// symbols.  Division yields a rational function.
RatFunc lower_to_ratfunc(const ExprPtr& e, const RingPtr& ring);

} // namespace slowmani
