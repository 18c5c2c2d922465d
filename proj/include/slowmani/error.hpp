#pragma once

#include <stdexcept>
#include <string>

namespace slowmani {

// Exit-code categories used by the CLI: usage errors are handled by the
// argument parser itself, spec errors come from reading problem files,
// math errors from the symbolic engine, numeric failures from validation.
enum class ErrorCategory { Spec = 2, Math = 3, Numeric = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), cat_(cat), kind_(std::move(kind)) {}

    ErrorCategory category() const { return cat_; }
    const std::string& kind() const { return kind_; }

private:
    ErrorCategory cat_;
    std::string kind_;
};

struct SpecError : Error {
    SpecError(std::string kind, const std::string& msg)
        : Error(ErrorCategory::Spec, std::move(kind), msg) {}
};

struct MathError : Error {
    MathError(std::string kind, const std::string& msg)
        : Error(ErrorCategory::Math, std::move(kind), msg) {}
};

struct NumericError : Error {
    NumericError(std::string kind, const std::string& msg)
        : Error(ErrorCategory::Numeric, std::move(kind), msg) {}
};

inline SpecError lex_error(int line, int col, const std::string& msg) {
    return SpecError("LexError", "line " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}
inline SpecError parse_error(int line, const std::string& msg) {
    return SpecError("ParseError", "line " + std::to_string(line) + ": " + msg);
}

} // namespace slowmani
