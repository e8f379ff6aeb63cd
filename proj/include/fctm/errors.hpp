#pragma once

#include <stdexcept>
#include <string>

namespace fctm {

// A matrix argument is structurally unusable (non-finite entries, bad dims).
struct InvalidMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An SPD precondition failed (Cholesky pivot <= 0).
struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArgument : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input data; `line` is the 1-based line of the offending record.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, long line_no)
        : std::runtime_error(what + " (line " + std::to_string(line_no) + ")"),
          line(line_no) {}
    long line;
};

struct ModelFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A bound or certificate was requested outside its hypothesis.
struct CertificateNotApplicable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Some term with positive count has zero mixture probability.
struct DegenerateMixture : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fctm
