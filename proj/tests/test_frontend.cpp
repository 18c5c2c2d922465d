#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"

using namespace slowmani;
using slowmani::test::rf;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExprPtr random_expr(std::mt19937& gen, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
    switch (pick(gen)) {
        case 0: {
            std::uniform_int_distribution<long> c(-9, 9);
            long v = c(gen);
            // negative literals print as Neg(Number), matching the parser
            if (v < 0) return Expr::unary(Expr::Kind::Neg, Expr::make_number(Rat(-v)));
            return Expr::make_number(Rat(v));
        }
        case 1: {
            std::uniform_int_distribution<int> s(0, 1);
            return Expr::make_symbol(s(gen) ? "x" : "y");
        }
        case 2: return Expr::unary(Expr::Kind::Neg, random_expr(gen, depth - 1));
        case 3:
            return Expr::binary(Expr::Kind::Add, random_expr(gen, depth - 1), random_expr(gen, depth - 1));
        case 4:
            return Expr::binary(Expr::Kind::Sub, random_expr(gen, depth - 1), random_expr(gen, depth - 1));
        case 5:
            return Expr::binary(Expr::Kind::Mul, random_expr(gen, depth - 1), random_expr(gen, depth - 1));
        default: {
            std::uniform_int_distribution<long> e(0, 3);
            return Expr::binary(Expr::Kind::Pow, random_expr(gen, depth - 1), Expr::make_number(Rat(e(gen))));
        }
    }
}

double eval_ast(const ExprPtr& e, double x, double y) {
    switch (e->kind) {
        case Expr::Kind::Number: return e->number.to_double();
        case Expr::Kind::Symbol: return e->symbol == "x" ? x : y;
        case Expr::Kind::Neg: return -eval_ast(e->a, x, y);
        case Expr::Kind::Add: return eval_ast(e->a, x, y) + eval_ast(e->b, x, y);
        case Expr::Kind::Sub: return eval_ast(e->a, x, y) - eval_ast(e->b, x, y);
        case Expr::Kind::Mul: return eval_ast(e->a, x, y) * eval_ast(e->b, x, y);
        case Expr::Kind::Div: return eval_ast(e->a, x, y) / eval_ast(e->b, x, y);
        case Expr::Kind::Pow: return std::pow(eval_ast(e->a, x, y), eval_ast(e->b, x, y));
    }
    return 0;
}

} // namespace

TEST_CASE("tokenizer basics") {
    auto toks = tokenize("a1*x3 - a2*x1*x2");
    std::vector<Token::Kind> kinds;
    for (const auto& t : toks) kinds.push_back(t.kind);
    CHECK(kinds == std::vector<Token::Kind>{
                       Token::Kind::Ident, Token::Kind::Star, Token::Kind::Ident, Token::Kind::Minus,
                       Token::Kind::Ident, Token::Kind::Star, Token::Kind::Ident, Token::Kind::Star,
                       Token::Kind::Ident, Token::Kind::End});
    CHECK(toks[0].text == "a1");

    auto pw = tokenize("x2^2");
    CHECK(pw[0].kind == Token::Kind::Ident);
    CHECK(pw[1].kind == Token::Kind::Caret);
    CHECK(pw[2].kind == Token::Kind::Number);

    CHECK_THROWS_WITH_AS(tokenize("a $ b"), doctest::Contains("line 1"), SpecError);
    try {
        tokenize("ok\nbad@");
    } catch (const SpecError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("comments and newlines") {
    auto toks = tokenize("a # comment with $ illegal stuff\nb");
    CHECK(toks.size() == 4); // a, newline, b, end
}

TEST_CASE("expression parsing and precedence") {
    ExprPtr e = parse_expression("-2*k1*x1^2*x2^2 + 2*km1*x3^3");
    CHECK(e->kind == Expr::Kind::Add);

    ExprPtr n = parse_expression("-(x3)");
    CHECK(n->kind == Expr::Kind::Neg);
    CHECK(n->a->kind == Expr::Kind::Symbol);

    // '^' is right-associative: x1^2^3 = x1^(2^3) = x1^8
    const RingPtr r = make_ring({"x1"});
    RatFunc f = lower_to_ratfunc(parse_expression("x1 ^ 2 ^ 3"), r);
    CHECK(f == rf(r, "x1^8"));
    CHECK(f.num().eval_double({2.0}) == 256.0);

    // precedence: unary minus binds tighter than '*', '^' tighter than '-'
    CHECK(rf(r, "-x1^2") == -rf(r, "x1^2"));
    CHECK(rf(r, "2 - 3*x1") == rf(r, "2 - (3*x1)"));
}

TEST_CASE("fractional and negative exponents are rejected") {
    CHECK_THROWS_WITH_AS(parse_expression("x^(1/3)"), doctest::Contains("exponent"), SpecError);
    CHECK_THROWS_WITH_AS(parse_expression("x^-2"), doctest::Contains("exponent"), SpecError);
    CHECK_THROWS_WITH_AS(parse_expression("x^y"), doctest::Contains("exponent"), SpecError);
}

TEST_CASE("lowering") {
    const RingPtr r = make_ring({"xi"});
    CHECK(rf(r, "2/(1+3*xi^2)").str() == "2 / (1 + 3*xi^2)");

    const RingPtr rv = make_ring({"x1", "x2"});
    CHECK(rf(rv, "x1 - x2^2") == RatFunc::variable(rv, 0) - rf(rv, "x2^2"));

    CHECK(rf(r, "(xi - xi)").is_zero());

    CHECK_THROWS_WITH_AS(rf(r, "nope + 1"), doctest::Contains("UnknownSymbol"), SpecError);
    CHECK_THROWS_WITH_AS(rf(r, "1/(2 - 2)"), doctest::Contains("DivisionByZero"), MathError);
}

TEST_CASE("expression round-trip: render then re-parse") {
    std::mt19937 gen(5150);
    for (int i = 0; i < 200; ++i) {
        ExprPtr e = random_expr(gen, 4);
        std::string s = e->str();
        ExprPtr back = parse_expression(s);
        CHECK(expr_equal(e, back));
    }
}

TEST_CASE("lowering agrees with direct floating-point AST evaluation") {
    std::mt19937 gen(6060);
    const RingPtr r = make_ring({"x", "y"});
    std::uniform_real_distribution<double> pt(0.3, 1.2);
    int checked = 0;
    while (checked < 20) {
        ExprPtr e = random_expr(gen, 3);
        RatFunc f = lower_to_ratfunc(e, r);
        double x = pt(gen), y = pt(gen);
        double direct = eval_ast(e, x, y);
        double lowered = f.num().eval_double({x, y}) / f.den().eval_double({x, y});
        if (!std::isfinite(direct) || std::fabs(direct) < 1e-9) continue;
        CHECK(std::fabs(direct - lowered) / std::fabs(direct) <= 1e-10);
        ++checked;
    }
}

TEST_CASE("problem file: parabola") {
    ProblemSpec spec = slowmani::test::load("parabola.gspt");
    CHECK(spec.name == "parabola");
    CHECK(spec.n() == 2);
    CHECK(spec.k() == 1);
    CHECK(spec.params.empty());
    CHECK(spec.phi0.at(0, 0) == rf(spec.chart_ring, "xi"));
    CHECK(spec.phi0.at(1, 0) == rf(spec.chart_ring, "1 - xi^2"));
    CHECK(spec.n0_frame.at(0, 0) == rf(spec.chart_ring, "2*xi"));
    CHECK(spec.ansatz == Ansatz::Graph);
    CHECK(spec.graph_indices == std::vector<size_t>{0});
    REQUIRE(spec.box.size() == 1);
    CHECK(spec.box[0].first == -1.0);
    CHECK(spec.box[0].second == 1.0);
}

TEST_CASE("problem file: iffl with a level section") {
    ProblemSpec spec = slowmani::test::load("iffl.gspt");
    CHECK(spec.n() == 3);
    CHECK(spec.k() == 2);
    CHECK(spec.params == std::vector<std::string>{"a1", "a2", "a3", "a4"});
    CHECK(spec.f_terms.size() == 2);
    CHECK(spec.f_terms[0].at(2, 0) == rf(spec.state_ring, "-x3"));
    CHECK(spec.f_terms[1].at(0, 0) == rf(spec.state_ring, "a1*x3 - a2*x1*x2"));
    CHECK(spec.n0_frame.at(2, 0) == rf(spec.chart_ring, "-1"));
    REQUIRE(spec.levels.size() == 1);
    const auto& lvl = spec.levels[0];
    CHECK(lvl.chart_vars == std::vector<std::string>{"eta"});
    CHECK(lvl.phi0.at(0, 0) == rf(lvl.ring, "eta"));
    CHECK(lvl.n0_frame.at(0, 0) == rf(lvl.ring, "-a2*eta"));
    CHECK(lvl.ansatz == Ansatz::Graph);
}

TEST_CASE("problem file: every bundled problem parses") {
    for (const char* name :
         {"parabola.gspt", "iffl.gspt", "d2f.gspt", "feliu.gspt", "valorani.gspt", "vdp_embedded.gspt"}) {
        CAPTURE(name);
        CHECK_NOTHROW(slowmani::test::load(name));
    }
}

TEST_CASE("problem file: dimension mismatch") {
    std::string src = slurp(slowmani::test::problem_path("iffl.gspt"));
    auto pos = src.find("phi0 = [xi1, xi2, 0]");
    REQUIRE(pos != std::string::npos);
    std::string broken = src;
    broken.replace(pos, std::string("phi0 = [xi1, xi2, 0]").size(), "phi0 = [xi1, xi2]");
    CHECK_THROWS_WITH_AS(parse_problem_file(broken), doctest::Contains("DimensionMismatch"), SpecError);
}

TEST_CASE("problem file: undeclared symbols carry a diagnostic") {
    std::string src = "problem t\nvars x1 x2\nF0 = [ghost, 0]\nchart xi\nphi0 = [xi, 0]\nN0 = [[0],[1]]\n";
    CHECK_THROWS_WITH_AS(parse_problem_file(src), doctest::Contains("ghost"), SpecError);
}

TEST_CASE("problem file: deleting any required section is rejected") {
    const std::string src = slurp(slowmani::test::problem_path("parabola.gspt"));
    for (const std::string section : {"problem", "vars", "F0", "chart", "phi0", "N0"}) {
        std::istringstream in(src);
        std::ostringstream out;
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string head;
            ls >> head;
            if (head == section) continue;
            out << line << "\n";
        }
        CAPTURE(section);
        CHECK_THROWS_AS(parse_problem_file(out.str()), SpecError);
    }
}

TEST_CASE("problem file: graph ansatz must match the embedding") {
    std::string src = "problem t\nvars x1 x2\nF0 = [x2, -x2]\nchart xi\nphi0 = [2*xi, 0]\nN0 = [[0],[1]]\nansatz graph [1]\n";
    CHECK_THROWS_WITH_AS(parse_problem_file(src), doctest::Contains("InvalidAnsatz"), SpecError);
}

TEST_CASE("problem file: level dimensions must strictly decrease") {
    std::string src = slurp(slowmani::test::problem_path("iffl.gspt"));
    auto pos = src.find("chart1 eta");
    std::string broken = src;
    broken.replace(pos, std::string("chart1 eta").size(), "chart1 eta mu");
    CHECK_THROWS_WITH_AS(parse_problem_file(broken), doctest::Contains("DimensionMismatch"), SpecError);
}
