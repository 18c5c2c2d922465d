#include "slowmani/expr.hpp"

#include <cctype>
#include <sstream>

namespace slowmani {

std::vector<Token> tokenize(const std::string& source) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto push = [&](Token::Kind k, std::string text) {
        out.push_back(Token{k, std::move(text), line, col});
    };
    while (i < source.size()) {
        char c = source[i];
        if (c == '#') {
            while (i < source.size() && source[i] != '\n') ++i;
            continue;
        }
        if (c == '\n') {
            push(Token::Kind::Newline, "\n");
            ++i;
            ++line;
            col = 1;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            ++col;
            continue;
        }
        if (std::isalpha((unsigned char)c) || c == '_') {
            size_t j = i;
            while (j < source.size() && (std::isalnum((unsigned char)source[j]) || source[j] == '_')) ++j;
            push(Token::Kind::Ident, source.substr(i, j - i));
            col += int(j - i);
            i = j;
            continue;
        }
        if (std::isdigit((unsigned char)c) || (c == '.' && i + 1 < source.size() && std::isdigit((unsigned char)source[i + 1]))) {
            size_t j = i;
            bool saw_dot = false;
            while (j < source.size() && (std::isdigit((unsigned char)source[j]) || (source[j] == '.' && !saw_dot))) {
                if (source[j] == '.') saw_dot = true;
                ++j;
            }
            push(Token::Kind::Number, source.substr(i, j - i));
            col += int(j - i);
            i = j;
            continue;
        }
        Token::Kind k;
        switch (c) {
            case '+': k = Token::Kind::Plus; break;
            case '-': k = Token::Kind::Minus; break;
            case '*': k = Token::Kind::Star; break;
            case '/': k = Token::Kind::Slash; break;
            case '^': k = Token::Kind::Caret; break;
            case '(': k = Token::Kind::LParen; break;
            case ')': k = Token::Kind::RParen; break;
            case '[': k = Token::Kind::LBracket; break;
            case ']': k = Token::Kind::RBracket; break;
            case ',': k = Token::Kind::Comma; break;
            case '=': k = Token::Kind::Equals; break;
            case ':': k = Token::Kind::Colon; break;
            default:
                throw lex_error(line, col, std::string("illegal character '") + c + "'");
        }
        push(k, std::string(1, c));
        ++i;
        ++col;
    }
    out.push_back(Token{Token::Kind::End, "", line, col});
    return out;
}

ExprPtr Expr::make_number(const Rat& v, int line) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Number;
    e->number = v;
    e->line = line;
    return e;
}

ExprPtr Expr::make_symbol(std::string name, int line) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Symbol;
    e->symbol = std::move(name);
    e->line = line;
    return e;
}

ExprPtr Expr::unary(Kind k, ExprPtr x, int line) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->a = std::move(x);
    e->line = line;
    return e;
}

ExprPtr Expr::binary(Kind k, ExprPtr x, ExprPtr y, int line) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->a = std::move(x);
    e->b = std::move(y);
    e->line = line;
    return e;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Expr::Kind::Number: return a->number == b->number;
        case Expr::Kind::Symbol: return a->symbol == b->symbol;
        case Expr::Kind::Neg: return expr_equal(a->a, b->a);
        default: return expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
    }
}

std::optional<Rat> fold_constant(const ExprPtr& e) {
    switch (e->kind) {
        case Expr::Kind::Number: return e->number;
        case Expr::Kind::Symbol: return std::nullopt;
        case Expr::Kind::Neg: {
            auto v = fold_constant(e->a);
            return v ? std::optional<Rat>(-*v) : std::nullopt;
        }
        default: break;
    }
    auto x = fold_constant(e->a);
    auto y = fold_constant(e->b);
    if (!x || !y) return std::nullopt;
    switch (e->kind) {
        case Expr::Kind::Add: return *x + *y;
        case Expr::Kind::Sub: return *x - *y;
        case Expr::Kind::Mul: return *x * *y;
        case Expr::Kind::Div:
            if (y->is_zero()) throw MathError("DivisionByZero", "literal zero denominator");
            return *x / *y;
        case Expr::Kind::Pow: {
            if (!y->is_integer() || y->sign() < 0) return std::nullopt;
            return x->pow(unsigned(y->num().get_ui()));
        }
        default: return std::nullopt;
    }
}

const Token& TokenCursor::expect(Token::Kind k, const std::string& what) {
    if (!at(k)) throw parse_error(peek().line, "expected " + what + ", found '" + peek().text + "'");
    return get();
}

namespace {

Rat parse_number_token(const Token& t) {
    if (t.text.find('.') != std::string::npos)
        throw parse_error(t.line, "decimal literal '" + t.text + "' is not allowed in expressions");
    return Rat(t.text);
}

ExprPtr parse_sum(TokenCursor& cur);

// Validated exponent: a literal constant folding to a non-negative integer.
void check_exponent(const ExprPtr& e, int line) {
    auto v = fold_constant(e);
    if (!v || !v->is_integer() || v->sign() < 0)
        throw parse_error(line, "exponent must be a literal non-negative integer");
}

ExprPtr parse_atom(TokenCursor& cur) {
    const Token& t = cur.peek();
    switch (t.kind) {
        case Token::Kind::Number: {
            cur.get();
            return Expr::make_number(parse_number_token(t), t.line);
        }
        case Token::Kind::Ident: {
            cur.get();
            return Expr::make_symbol(t.text, t.line);
        }
        case Token::Kind::LParen: {
            cur.get();
            ExprPtr e = parse_sum(cur);
            cur.expect(Token::Kind::RParen, "')'");
            return e;
        }
        default:
            throw parse_error(t.line, "unexpected token '" + t.text + "' in expression");
    }
}

ExprPtr parse_unary(TokenCursor& cur);

ExprPtr parse_power(TokenCursor& cur) {
    ExprPtr base = parse_atom(cur);
    if (cur.at(Token::Kind::Caret)) {
        int line = cur.get().line;
        ExprPtr exp = parse_unary(cur); // right-associative
        check_exponent(exp, line);
        return Expr::binary(Expr::Kind::Pow, std::move(base), std::move(exp), line);
    }
    return base;
}

ExprPtr parse_unary(TokenCursor& cur) {
    if (cur.at(Token::Kind::Minus)) {
        int line = cur.get().line;
        return Expr::unary(Expr::Kind::Neg, parse_unary(cur), line);
    }
    return parse_power(cur);
}

ExprPtr parse_product(TokenCursor& cur) {
    ExprPtr e = parse_unary(cur);
    while (cur.at(Token::Kind::Star) || cur.at(Token::Kind::Slash)) {
        bool mul = cur.at(Token::Kind::Star);
        int line = cur.get().line;
        e = Expr::binary(mul ? Expr::Kind::Mul : Expr::Kind::Div, e, parse_unary(cur), line);
    }
    return e;
}

ExprPtr parse_sum(TokenCursor& cur) {
    ExprPtr e = parse_product(cur);
    while (cur.at(Token::Kind::Plus) || cur.at(Token::Kind::Minus)) {
        bool add = cur.at(Token::Kind::Plus);
        int line = cur.get().line;
        e = Expr::binary(add ? Expr::Kind::Add : Expr::Kind::Sub, e, parse_product(cur), line);
    }
    return e;
}

int precedence(Expr::Kind k) {
    switch (k) {
        case Expr::Kind::Add:
        case Expr::Kind::Sub: return 1;
        case Expr::Kind::Mul:
        case Expr::Kind::Div: return 2;
        case Expr::Kind::Neg: return 3;
        case Expr::Kind::Pow: return 4;
        default: return 5;
    }
}

void print_expr(std::ostringstream& out, const Expr& e, int parent_prec, bool right_side) {
    int prec = precedence(e.kind);
    bool paren = prec < parent_prec || (prec == parent_prec && right_side);
    if (paren) out << "(";
    switch (e.kind) {
        case Expr::Kind::Number: out << e.number.str(); break;
        case Expr::Kind::Symbol: out << e.symbol; break;
        case Expr::Kind::Neg:
            out << "-";
            print_expr(out, *e.a, prec, true);
            break;
        case Expr::Kind::Pow:
            print_expr(out, *e.a, prec + 1, false);
            out << "^";
            print_expr(out, *e.b, prec, false);
            break;
        default: {
            const char* op = e.kind == Expr::Kind::Add ? " + "
                             : e.kind == Expr::Kind::Sub ? " - "
                             : e.kind == Expr::Kind::Mul ? "*"
                                                         : "/";
            print_expr(out, *e.a, prec, false);
            out << op;
            print_expr(out, *e.b, prec, true);
            break;
        }
    }
    if (paren) out << ")";
}

} // namespace

std::string Expr::str() const {
    std::ostringstream out;
    print_expr(out, *this, 0, false);
    return out.str();
}

ExprPtr parse_expression(TokenCursor& cur) { return parse_sum(cur); }

ExprPtr parse_expression(const std::string& source) {
    auto toks = tokenize(source);
    TokenCursor cur(toks);
    ExprPtr e = parse_expression(cur);
    while (cur.accept(Token::Kind::Newline)) {
    }
    if (!cur.at(Token::Kind::End))
        throw parse_error(cur.peek().line, "trailing input after expression: '" + cur.peek().text + "'");
    return e;
}

RatFunc lower_to_ratfunc(const ExprPtr& e, const RingPtr& ring) {
    switch (e->kind) {
        case Expr::Kind::Number: return RatFunc::constant(ring, e->number);
        case Expr::Kind::Symbol: return RatFunc::variable(ring, ring->index_of(e->symbol));
        case Expr::Kind::Neg: return -lower_to_ratfunc(e->a, ring);
        case Expr::Kind::Add: return lower_to_ratfunc(e->a, ring) + lower_to_ratfunc(e->b, ring);
        case Expr::Kind::Sub: return lower_to_ratfunc(e->a, ring) - lower_to_ratfunc(e->b, ring);
        case Expr::Kind::Mul: return lower_to_ratfunc(e->a, ring) * lower_to_ratfunc(e->b, ring);
        case Expr::Kind::Div: {
            RatFunc d = lower_to_ratfunc(e->b, ring);
            if (d.is_zero()) throw MathError("DivisionByZero", "literal zero denominator");
            return lower_to_ratfunc(e->a, ring) / d;
        }
        case Expr::Kind::Pow: {
            auto v = fold_constant(e->b);
            if (!v || !v->is_integer() || v->sign() < 0)
                throw parse_error(e->line, "exponent must be a literal non-negative integer");
            return lower_to_ratfunc(e->a, ring).pow(long(v->num().get_si()));
        }
    }
    throw MathError("InternalInconsistency", "unhandled expression node");
}

} // namespace slowmani
