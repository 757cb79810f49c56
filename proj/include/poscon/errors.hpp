#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace poscon {

// Base for every error raised by the library. `code()` is module-qualified,
// e.g. "posmat.NegativeEntry", and is what the CLI prints.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Malformed caller input (dimension mismatch, bad file, unsupported option).
class InputError : public Error {
public:
    using Error::Error;
};

class NegativeEntry : public InputError {
public:
    NegativeEntry(std::size_t row, std::size_t col, double value, const std::string& where = "A")
        : InputError("posmat.NegativeEntry",
                     "negative entry " + std::to_string(value) + " in " + where + " at (" + std::to_string(row) +
                         ", " + std::to_string(col) + ")"),
          row_(row), col_(col), value_(value) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }
    double value() const noexcept { return value_; }

private:
    std::size_t row_;
    std::size_t col_;
    double value_;
};

class Reducible : public InputError {
public:
    explicit Reducible(std::vector<std::vector<std::size_t>> components)
        : InputError("posmat.Reducible", describe(components)), components_(std::move(components)) {}

    // Strongly connected components of the adjacency digraph.
    const std::vector<std::vector<std::size_t>>& components() const noexcept { return components_; }

private:
    static std::string describe(const std::vector<std::vector<std::size_t>>& comps) {
        std::string s = "matrix is reducible; strongly connected components:";
        for (const auto& c : comps) {
            s += " {";
            for (std::size_t i = 0; i < c.size(); ++i) {
                if (i) s += ",";
                s += std::to_string(c[i]);
            }
            s += "}";
        }
        return s;
    }

    std::vector<std::vector<std::size_t>> components_;
};

// Numerical routines that ran out of budget or failed an internal cross-check.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IterationLimit : public NumericalError {
public:
    explicit IterationLimit(std::size_t pivots)
        : NumericalError("linprog.IterationLimit", "simplex pivot budget exhausted after " +
                                                       std::to_string(pivots) + " pivots") {}
};

class BudgetExceeded : public NumericalError {
public:
    BudgetExceeded(std::size_t first_degree, std::size_t last_tried)
        : NumericalError("spectral.BudgetExceeded",
                         "recursion search aborted; degrees " + std::to_string(first_degree) + ".." +
                             std::to_string(last_tried) + " examined"),
          first_(first_degree), last_(last_tried) {}

    std::size_t first_degree() const noexcept { return first_; }
    std::size_t last_tried() const noexcept { return last_; }

private:
    std::size_t first_;
    std::size_t last_;
};

}  // namespace poscon
