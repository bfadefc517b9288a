#pragma once

#include <stdexcept>
#include <string>

namespace mdcrbm {

// Base for every recoverable error in the library. `exit_code()` is the
// process exit status the CLI maps the error to (2 = data error,
// 3 = numeric failure).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, int exit_code = 2)
        : std::runtime_error(what), exit_code_(exit_code) {}
    int exit_code() const { return exit_code_; }

private:
    int exit_code_;
};

// -- schema ------------------------------------------------------------

struct ConstantColumn final : Error {
    explicit ConstantColumn(const std::string& col)
        : Error("constant column (zero standard deviation): " + col) {}
};

struct MissingColumn final : Error {
    explicit MissingColumn(const std::string& col)
        : Error("column not found: " + col) {}
};

struct UnknownLevel final : Error {
    UnknownLevel(const std::string& col, double value)
        : Error("value " + std::to_string(value) + " is not a level of categorical column " + col) {}
};

struct OutOfDomain final : Error {
    OutOfDomain(const std::string& col, double value)
        : Error("value " + std::to_string(value) + " outside domain of column " + col) {}
};

struct LengthMismatch final : Error {
    LengthMismatch(std::size_t got, std::size_t want)
        : Error("vector length " + std::to_string(got) + ", expected " + std::to_string(want)) {}
};

struct SchemaParseError final : Error {
    explicit SchemaParseError(const std::string& what) : Error("schema: " + what) {}
};

// -- rbm-core ----------------------------------------------------------

struct ShapeMismatch final : Error {
    explicit ShapeMismatch(const std::string& what)
        : Error("shape mismatch: " + what) {}
};

struct TooLarge final : Error {
    explicit TooLarge(const std::string& what)
        : Error("enumeration too large: " + what) {}
};

struct UnsupportedKind final : Error {
    explicit UnsupportedKind(const std::string& what)
        : Error("unsupported variable kind: " + what) {}
};

struct ModelFormatError final : Error {
    explicit ModelFormatError(const std::string& what)
        : Error("model file: " + what) {}
};

// -- trainer -----------------------------------------------------------

struct NonFiniteGradient final : Error {
    NonFiniteGradient() : Error("gradient contains non-finite entries", 3) {}
};

struct InvalidConfig final : Error {
    explicit InvalidConfig(const std::string& what)
        : Error("invalid configuration: " + what, 1) {}
};

struct UnknownBlock final : Error {
    explicit UnknownBlock(const std::string& name)
        : Error("no such variable block: " + name) {}
};

// -- generator ---------------------------------------------------------

struct TargetNotCategorical final : Error {
    explicit TargetNotCategorical(const std::string& name)
        : Error("target variable is not categorical: " + name) {}
};

struct MissingKnown final : Error {
    explicit MissingKnown(const std::string& name)
        : Error("conditioning value required but missing: " + name) {}
};

struct NothingUnknown final : Error {
    NothingUnknown() : Error("mask leaves no variable unknown") {}
};

struct NotConditionable final : Error {
    explicit NotConditionable(const std::string& name)
        : Error("variable is not flagged conditionable: " + name) {}
};

// -- elasticity --------------------------------------------------------

struct ZeroProbability final : Error {
    explicit ZeroProbability(const std::string& what)
        : Error("choice probability underflowed to zero: " + what, 3) {}
};

struct NonContinuousVariable final : Error {
    explicit NonContinuousVariable(const std::string& name)
        : Error("elasticity requires a continuous variable: " + name) {}
};

// -- stats -------------------------------------------------------------

struct EmptySample final : Error {
    EmptySample() : Error("empty sample") {}
};

struct LevelMismatch final : Error {
    explicit LevelMismatch(const std::string& what)
        : Error("level sets differ: " + what) {}
};

struct ZeroExpected final : Error {
    explicit ZeroExpected(const std::string& what)
        : Error("zero expected count: " + what) {}
};

// -- cli ---------------------------------------------------------------

struct UnknownRecipe final : Error {
    explicit UnknownRecipe(const std::string& name)
        : Error("no such oracle recipe: " + name) {}
};

struct DataFormatError final : Error {
    explicit DataFormatError(const std::string& what) : Error(what) {}
};

struct IoError final : Error {
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace mdcrbm
