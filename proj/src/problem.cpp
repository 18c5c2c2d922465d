#include "slowmani/problem.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace slowmani {

std::string ansatz_str(Ansatz a, const std::vector<size_t>& graph_indices) {
    if (a == Ansatz::ZeroX) return "zero";
    std::string s = "graph[";
    for (size_t i = 0; i < graph_indices.size(); ++i) {
        if (i) s += " ";
        s += std::to_string(graph_indices[i] + 1);
    }
    return s + "]";
}

std::vector<size_t> ProblemSpec::state_var_indices() const {
    std::vector<size_t> v;
    for (const auto& s : state_vars) v.push_back(state_ring->index_of(s));
    return v;
}

std::vector<size_t> ProblemSpec::chart_var_indices() const {
    std::vector<size_t> v;
    for (const auto& s : chart_vars) v.push_back(chart_ring->index_of(s));
    return v;
}

std::vector<size_t> ProblemSpec::param_indices() const {
    std::vector<size_t> v;
    for (const auto& s : params) v.push_back(state_ring->index_of(s));
    return v;
}

namespace {

struct RawLevel {
    int index = 0;
    int line = 0;
    std::vector<std::string> chart_vars;
    std::vector<ExprPtr> phi0;
    std::vector<std::vector<ExprPtr>> n0;
    std::optional<Ansatz> ansatz;
    std::vector<size_t> graph_indices;
};

struct RawFile {
    std::string name;
    std::vector<std::string> vars, params, chart;
    std::map<unsigned, std::pair<int, std::vector<ExprPtr>>> f_terms; // power -> (line, exprs)
    std::vector<ExprPtr> phi0;
    std::vector<std::vector<ExprPtr>> n0;
    std::optional<Ansatz> ansatz;
    std::vector<size_t> graph_indices;
    std::vector<std::pair<double, double>> box;
    std::vector<RawLevel> levels;
    std::map<std::string, int> seen; // section -> line, for duplicate checks
};

void mark_seen(RawFile& raw, const std::string& section, int line) {
    if (raw.seen.count(section))
        throw parse_error(line, "duplicate section '" + section + "' (first at line " +
                                    std::to_string(raw.seen[section]) + ")");
    raw.seen[section] = line;
}

std::vector<std::string> parse_ident_list(TokenCursor& cur, bool allow_empty, int line) {
    std::vector<std::string> out;
    while (cur.at(Token::Kind::Ident)) out.push_back(cur.get().text);
    if (out.empty() && !allow_empty) throw parse_error(line, "expected at least one identifier");
    return out;
}

void skip_newlines(TokenCursor& cur) {
    while (cur.accept(Token::Kind::Newline)) {
    }
}

std::vector<ExprPtr> parse_vector_literal(TokenCursor& cur) {
    cur.expect(Token::Kind::LBracket, "'['");
    std::vector<ExprPtr> out;
    skip_newlines(cur);
    if (!cur.at(Token::Kind::RBracket)) {
        out.push_back(parse_expression(cur));
        skip_newlines(cur);
        while (cur.accept(Token::Kind::Comma)) {
            skip_newlines(cur);
            out.push_back(parse_expression(cur));
            skip_newlines(cur);
        }
    }
    cur.expect(Token::Kind::RBracket, "']'");
    return out;
}

std::vector<std::vector<ExprPtr>> parse_matrix_literal(TokenCursor& cur) {
    cur.expect(Token::Kind::LBracket, "'['");
    std::vector<std::vector<ExprPtr>> rows;
    skip_newlines(cur);
    rows.push_back(parse_vector_literal(cur));
    skip_newlines(cur);
    while (cur.accept(Token::Kind::Comma)) {
        skip_newlines(cur);
        rows.push_back(parse_vector_literal(cur));
        skip_newlines(cur);
    }
    cur.expect(Token::Kind::RBracket, "']'");
    return rows;
}

std::pair<Ansatz, std::vector<size_t>> parse_ansatz_clause(TokenCursor& cur, int line) {
    const Token& t = cur.expect(Token::Kind::Ident, "'zero' or 'graph'");
    if (t.text == "zero") return {Ansatz::ZeroX, {}};
    if (t.text != "graph") throw parse_error(line, "ansatz must be 'zero' or 'graph [i1 ...]'");
    cur.expect(Token::Kind::LBracket, "'[' after 'graph'");
    std::vector<size_t> idx;
    while (!cur.at(Token::Kind::RBracket)) {
        const Token& num = cur.expect(Token::Kind::Number, "graph coordinate index");
        if (num.text.find('.') != std::string::npos)
            throw parse_error(num.line, "graph index must be an integer");
        long v = std::stol(num.text);
        if (v < 1) throw parse_error(num.line, "graph indices are 1-based");
        idx.push_back(size_t(v - 1));
        cur.accept(Token::Kind::Comma);
    }
    cur.get(); // ']'
    if (idx.empty()) throw parse_error(line, "graph ansatz needs at least one coordinate index");
    return {Ansatz::Graph, idx};
}

double parse_signed_number(TokenCursor& cur) {
    bool neg = cur.accept(Token::Kind::Minus);
    const Token& t = cur.expect(Token::Kind::Number, "a number");
    double v = std::stod(t.text);
    return neg ? -v : v;
}

std::vector<std::pair<double, double>> parse_box_clause(TokenCursor& cur) {
    std::vector<std::pair<double, double>> out;
    while (!cur.at(Token::Kind::Newline) && !cur.at(Token::Kind::End)) {
        double lo = parse_signed_number(cur);
        cur.expect(Token::Kind::Colon, "':' in box range");
        double hi = parse_signed_number(cur);
        if (!(lo < hi)) throw parse_error(cur.peek().line, "box range must satisfy lo < hi");
        out.emplace_back(lo, hi);
    }
    return out;
}

// Splits e.g. "phi01" into ("phi0", 1).  Section names that end in digits are
// level-scoped copies of the base sections.
std::pair<std::string, int> split_suffix(const std::string& word) {
    size_t p = word.size();
    while (p > 0 && std::isdigit((unsigned char)word[p - 1])) --p;
    if (p == word.size()) return {word, -1};
    // 'F0', 'F1', ... keep their digits: F-sections are handled separately.
    std::string base = word.substr(0, p);
    if (base == "F") return {word, -1};
    // phi0 ends with a real '0': "phi0" itself, or "phi0<level>"
    if (base == "phi") {
        if (word == "phi0") return {"phi0", -1};
        return {"phi0", std::stoi(word.substr(4))};
    }
    if (base == "N") {
        if (word == "N0") return {"N0", -1};
        return {"N0", std::stoi(word.substr(2))};
    }
    return {base, std::stoi(word.substr(p))};
}

RawLevel& level_for(RawFile& raw, int idx, int line) {
    for (auto& l : raw.levels)
        if (l.index == idx) return l;
    throw parse_error(line, "section for level " + std::to_string(idx) +
                                " appears before its 'level " + std::to_string(idx) + "' line");
}

RawFile read_sections(const std::string& source) {
    auto toks = tokenize(source);
    TokenCursor cur(toks);
    RawFile raw;
    while (true) {
        skip_newlines(cur);
        if (cur.at(Token::Kind::End)) break;
        const Token& head = cur.expect(Token::Kind::Ident, "a section keyword");
        const int line = head.line;
        auto [base, level_idx] = split_suffix(head.text);

        if (level_idx < 0 && base.size() > 1 && base[0] == 'F' &&
            std::all_of(base.begin() + 1, base.end(), [](char c) { return std::isdigit((unsigned char)c); })) {
            unsigned power = unsigned(std::stoul(base.substr(1)));
            mark_seen(raw, base, line);
            cur.expect(Token::Kind::Equals, "'='");
            raw.f_terms[power] = {line, parse_vector_literal(cur)};
        } else if (base == "problem") {
            mark_seen(raw, "problem", line);
            raw.name = cur.expect(Token::Kind::Ident, "problem name").text;
        } else if (base == "vars") {
            mark_seen(raw, "vars", line);
            raw.vars = parse_ident_list(cur, false, line);
        } else if (base == "params") {
            mark_seen(raw, "params", line);
            raw.params = parse_ident_list(cur, true, line);
        } else if (base == "chart" && level_idx < 0) {
            mark_seen(raw, "chart", line);
            raw.chart = parse_ident_list(cur, false, line);
        } else if (base == "phi0" && level_idx < 0) {
            mark_seen(raw, "phi0", line);
            cur.expect(Token::Kind::Equals, "'='");
            raw.phi0 = parse_vector_literal(cur);
        } else if (base == "N0" && level_idx < 0) {
            mark_seen(raw, "N0", line);
            cur.expect(Token::Kind::Equals, "'='");
            raw.n0 = parse_matrix_literal(cur);
        } else if (base == "ansatz" && level_idx < 0) {
            mark_seen(raw, "ansatz", line);
            auto [a, idx] = parse_ansatz_clause(cur, line);
            raw.ansatz = a;
            raw.graph_indices = idx;
        } else if (base == "box") {
            mark_seen(raw, "box", line);
            raw.box = parse_box_clause(cur);
        } else if (base == "level") {
            const Token& num = cur.expect(Token::Kind::Number, "level index");
            RawLevel l;
            l.index = std::stoi(num.text);
            l.line = line;
            if (l.index != int(raw.levels.size()) + 1)
                throw parse_error(line, "levels must be declared consecutively starting at 1");
            raw.levels.push_back(std::move(l));
        } else if (base == "chart") {
            auto& l = level_for(raw, level_idx, line);
            l.chart_vars = parse_ident_list(cur, false, line);
        } else if (base == "phi0") {
            auto& l = level_for(raw, level_idx, line);
            cur.expect(Token::Kind::Equals, "'='");
            l.phi0 = parse_vector_literal(cur);
        } else if (base == "N0") {
            auto& l = level_for(raw, level_idx, line);
            cur.expect(Token::Kind::Equals, "'='");
            l.n0 = parse_matrix_literal(cur);
        } else if (base == "ansatz") {
            auto& l = level_for(raw, level_idx, line);
            auto [a, idx] = parse_ansatz_clause(cur, line);
            l.ansatz = a;
            l.graph_indices = idx;
        } else {
            throw parse_error(line, "unknown section '" + head.text + "'");
        }
        if (!cur.at(Token::Kind::End)) cur.expect(Token::Kind::Newline, "end of line");
    }
    return raw;
}

RatMat lower_vector(const std::vector<ExprPtr>& exprs, const RingPtr& ring) {
    RatMat m(ring, exprs.size(), 1);
    for (size_t i = 0; i < exprs.size(); ++i) m.at(i, 0) = lower_to_ratfunc(exprs[i], ring);
    return m;
}

RatMat lower_matrix(const std::vector<std::vector<ExprPtr>>& rows, const RingPtr& ring, const std::string& what) {
    if (rows.empty()) throw SpecError("DimensionMismatch", what + " is empty");
    size_t cols = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != cols) throw SpecError("DimensionMismatch", what + " has ragged rows");
    RatMat m(ring, rows.size(), cols);
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols; ++j) m.at(i, j) = lower_to_ratfunc(rows[i][j], ring);
    return m;
}

void require(bool cond, const std::string& kind, const std::string& msg) {
    if (!cond) throw SpecError(kind, msg);
}

void check_graph_indices(const std::vector<size_t>& idx, size_t parent_dim, size_t k, const RatMat& phi0,
                         const RingPtr& ring, const std::vector<std::string>& chart_vars,
                         const std::string& where) {
    require(idx.size() == k, "DimensionMismatch",
            where + ": graph ansatz needs exactly " + std::to_string(k) + " coordinate indices");
    std::vector<bool> used(parent_dim, false);
    for (size_t j = 0; j < idx.size(); ++j) {
        require(idx[j] < parent_dim, "DimensionMismatch", where + ": graph index out of range");
        require(!used[idx[j]], "InvalidAnsatz", where + ": repeated graph index");
        used[idx[j]] = true;
        RatFunc expected = RatFunc::variable(ring, ring->index_of(chart_vars[j]));
        require(phi0.at(idx[j], 0) == expected, "InvalidAnsatz",
                where + ": graph coordinate " + std::to_string(idx[j] + 1) +
                    " of the embedding must equal chart variable '" + chart_vars[j] + "'");
    }
}

} // namespace

ProblemSpec parse_problem_file(const std::string& source) {
    RawFile raw = read_sections(source);

    auto missing = [&](const std::string& s) {
        return SpecError("MissingSection", "required section '" + s + "' is missing");
    };
    if (!raw.seen.count("problem")) throw missing("problem");
    if (!raw.seen.count("vars")) throw missing("vars");
    if (raw.f_terms.find(0) == raw.f_terms.end()) throw missing("F0");
    if (!raw.seen.count("chart")) throw missing("chart");
    if (!raw.seen.count("phi0")) throw missing("phi0");
    if (!raw.seen.count("N0")) throw missing("N0");

    ProblemSpec spec;
    spec.name = raw.name;
    spec.state_vars = raw.vars;
    spec.params = raw.params;
    spec.chart_vars = raw.chart;

    std::vector<std::string> state_names = raw.params;
    state_names.insert(state_names.end(), raw.vars.begin(), raw.vars.end());
    spec.state_ring = make_ring(state_names, raw.params.size());
    std::vector<std::string> chart_names = raw.params;
    chart_names.insert(chart_names.end(), raw.chart.begin(), raw.chart.end());
    spec.chart_ring = make_ring(chart_names, raw.params.size());

    const size_t n = spec.n(), k = spec.k();
    require(k >= 1 && k <= n - 1, "DimensionMismatch",
            "chart dimension k=" + std::to_string(k) + " must satisfy 1 <= k <= n-1 with n=" + std::to_string(n));

    unsigned max_power = raw.f_terms.rbegin()->first;
    for (unsigned p = 0; p <= max_power; ++p) {
        auto it = raw.f_terms.find(p);
        if (it == raw.f_terms.end()) {
            spec.f_terms.push_back(RatMat(spec.state_ring, n, 1));
            continue;
        }
        require(it->second.second.size() == n, "DimensionMismatch",
                "line " + std::to_string(it->second.first) + ": F" + std::to_string(p) + " has " +
                    std::to_string(it->second.second.size()) + " entries, expected " + std::to_string(n));
        spec.f_terms.push_back(lower_vector(it->second.second, spec.state_ring));
    }

    require(raw.phi0.size() == n, "DimensionMismatch",
            "phi0 has " + std::to_string(raw.phi0.size()) + " entries, expected n=" + std::to_string(n));
    spec.phi0 = lower_vector(raw.phi0, spec.chart_ring);
    spec.n0_frame = lower_matrix(raw.n0, spec.chart_ring, "N0");
    require(spec.n0_frame.rows() == n, "DimensionMismatch",
            "N0 has " + std::to_string(spec.n0_frame.rows()) + " rows, expected n=" + std::to_string(n));
    require(spec.n0_frame.cols() == n - k, "DimensionMismatch",
            "N0 has " + std::to_string(spec.n0_frame.cols()) + " columns, expected n-k=" + std::to_string(n - k));

    spec.ansatz = raw.ansatz.value_or(Ansatz::ZeroX);
    spec.graph_indices = raw.graph_indices;
    if (spec.ansatz == Ansatz::Graph)
        check_graph_indices(spec.graph_indices, n, k, spec.phi0, spec.chart_ring, spec.chart_vars, "ansatz");

    if (!raw.box.empty()) {
        require(raw.box.size() == k, "DimensionMismatch",
                "box has " + std::to_string(raw.box.size()) + " ranges, expected k=" + std::to_string(k));
        spec.box = raw.box;
    }

    size_t parent_dim = k;
    std::vector<std::string> parent_chart = spec.chart_vars;
    for (const auto& rl : raw.levels) {
        const std::string where = "level " + std::to_string(rl.index);
        require(!rl.chart_vars.empty(), "MissingSection", where + ": missing chart" + std::to_string(rl.index));
        require(!rl.phi0.empty(), "MissingSection", where + ": missing phi0" + std::to_string(rl.index));
        require(!rl.n0.empty(), "MissingSection", where + ": missing N0" + std::to_string(rl.index));
        LevelSection lvl;
        lvl.index = rl.index;
        lvl.chart_vars = rl.chart_vars;
        const size_t dim = lvl.chart_vars.size();
        require(dim >= 1 && dim < parent_dim, "DimensionMismatch",
                where + ": dimension " + std::to_string(dim) + " must be strictly below the parent dimension " +
                    std::to_string(parent_dim));
        std::vector<std::string> names = spec.params;
        names.insert(names.end(), lvl.chart_vars.begin(), lvl.chart_vars.end());
        lvl.ring = make_ring(names, spec.params.size());
        require(rl.phi0.size() == parent_dim, "DimensionMismatch",
                where + ": phi0 has " + std::to_string(rl.phi0.size()) + " entries, expected " +
                    std::to_string(parent_dim));
        lvl.phi0 = lower_vector(rl.phi0, lvl.ring);
        lvl.n0_frame = lower_matrix(rl.n0, lvl.ring, where + ": N0");
        require(lvl.n0_frame.rows() == parent_dim && lvl.n0_frame.cols() == parent_dim - dim,
                "DimensionMismatch", where + ": N0 must be " + std::to_string(parent_dim) + "x" +
                                         std::to_string(parent_dim - dim));
        lvl.ansatz = rl.ansatz.value_or(Ansatz::ZeroX);
        lvl.graph_indices = rl.graph_indices;
        if (lvl.ansatz == Ansatz::Graph)
            check_graph_indices(lvl.graph_indices, parent_dim, dim, lvl.phi0, lvl.ring, lvl.chart_vars, where);
        spec.levels.push_back(std::move(lvl));
        parent_dim = dim;
        parent_chart = rl.chart_vars;
    }

    return spec;
}

ProblemSpec load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("FileNotFound", "cannot open problem file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem_file(ss.str());
}

} // namespace slowmani
