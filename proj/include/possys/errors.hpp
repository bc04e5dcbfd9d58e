#pragma once

// Error taxonomy shared by every module. Each condition that callers may want
// to branch on carries a distinct code; conditions with useful context carry
// it as typed fields on a derived class.

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace possys {

enum class Errc {
    EmptySet,
    EmptyRowSet,
    RaggedRows,
    DimMismatch,
    ModeViolation,
    ChainViolation,
    CardinalityOverflow,
    NonPositiveScalar,
    UnboundRef,
    MalformedGraph,
    NotSquare,
    NonFinite,
    NegativeInput,
    NonPositiveVector,
    NoDominantMatrix,
    BudgetExceeded,
    NoConvergence,
    ParseError,
    ValidationError,
};

[[nodiscard]] constexpr const char* to_string(Errc code) noexcept {
    switch (code) {
        case Errc::EmptySet: return "EmptySet";
        case Errc::EmptyRowSet: return "EmptyRowSet";
        case Errc::RaggedRows: return "RaggedRows";
        case Errc::DimMismatch: return "DimMismatch";
        case Errc::ModeViolation: return "ModeViolation";
        case Errc::ChainViolation: return "ChainViolation";
        case Errc::CardinalityOverflow: return "CardinalityOverflow";
        case Errc::NonPositiveScalar: return "NonPositiveScalar";
        case Errc::UnboundRef: return "UnboundRef";
        case Errc::MalformedGraph: return "MalformedGraph";
        case Errc::NotSquare: return "NotSquare";
        case Errc::NonFinite: return "NonFinite";
        case Errc::NegativeInput: return "NegativeInput";
        case Errc::NonPositiveVector: return "NonPositiveVector";
        case Errc::NoDominantMatrix: return "NoDominantMatrix";
        case Errc::BudgetExceeded: return "BudgetExceeded";
        case Errc::NoConvergence: return "NoConvergence";
        case Errc::ParseError: return "ParseError";
        case Errc::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what_arg)
        : std::runtime_error(std::string(to_string(code)) + ": " + what_arg), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// An entry failed the set's positivity/non-negativity mode.
class ModeViolationError final : public Error {
public:
    ModeViolationError(std::size_t member, Eigen::Index row, Eigen::Index col, const std::string& what_arg)
        : Error(Errc::ModeViolation, what_arg), member(member), row(row), col(col) {}

    std::size_t member;  // member index (explicit/ordered) or row-set option index (IRU)
    Eigen::Index row;
    Eigen::Index col;
};

/// Adjacent pair of an ordered chain fails the element-wise order.
/// Pair indices are 1-based (pair k compares chain elements k and k+1);
/// the offending entry is 0-based.
class ChainViolationError final : public Error {
public:
    ChainViolationError(std::size_t pair_first, Eigen::Index row, Eigen::Index col, const std::string& what_arg)
        : Error(Errc::ChainViolation, what_arg), pair_first(pair_first), row(row), col(col) {}

    std::size_t pair_first;
    Eigen::Index row;
    Eigen::Index col;
};

class DimMismatchError final : public Error {
public:
    DimMismatchError(std::string left, std::string right, const std::string& what_arg)
        : Error(Errc::DimMismatch, what_arg), left(std::move(left)), right(std::move(right)) {}

    std::string left;   // description of the left operand (block name or subexpression)
    std::string right;
};

class CardinalityOverflowError final : public Error {
public:
    CardinalityOverflowError(std::uint64_t limit, const std::string& what_arg)
        : Error(Errc::CardinalityOverflow, what_arg), limit(limit) {}

    std::uint64_t limit;
};

/// No member image dominates every other image at the probed vector: the set
/// is not an H-set, witnessed by an incomparable pair of member images.
class NoDominantMatrixError final : public Error {
public:
    NoDominantMatrixError(Eigen::VectorXd x, std::uint64_t candidate, std::uint64_t violator,
                          Eigen::Index coordinate, const std::string& what_arg)
        : Error(Errc::NoDominantMatrix, what_arg),
          x(std::move(x)), candidate(candidate), violator(violator), coordinate(coordinate) {}

    Eigen::VectorXd x;
    std::uint64_t candidate;   // member whose image-sum is extremal
    std::uint64_t violator;    // member whose image beats the candidate at `coordinate`
    Eigen::Index coordinate;
};

class BudgetExceededError final : public Error {
public:
    BudgetExceededError(std::uint64_t budget, const std::string& what_arg)
        : Error(Errc::BudgetExceeded, what_arg), budget(budget) {}

    std::uint64_t budget;
};

class ParseErrorAt final : public Error {
public:
    ParseErrorAt(int line, int column, const std::string& what_arg)
        : Error(Errc::ParseError, what_arg), line(line), column(column) {}

    int line;
    int column;
};

class ValidationErrorAt final : public Error {
public:
    ValidationErrorAt(std::string block, std::string reason)
        : Error(Errc::ValidationError, block + ": " + reason),
          block(std::move(block)), reason(std::move(reason)) {}

    std::string block;
    std::string reason;
};

}  // namespace possys
