#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace etsc {

// Size/shape violations (zero-length transforms, mismatched vector lengths).
struct invalid_size_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct shape_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Non-finite value fed into a streaming operation.
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// relative_error with a zero-norm reference; caller must special-case.
struct undefined_metric_error : std::domain_error {
    using std::domain_error::domain_error;
};

// convert_with_decay rescale overflowed (gamma too small for the kernel).
struct decay_too_strong_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Gradient descent hit a non-finite loss.
struct divergence_error : std::runtime_error {
    divergence_error(const std::string& what, std::size_t iter)
        : std::runtime_error(what), iteration(iter) {}
    std::size_t iteration;
};

// File-level failures carry the offending path.
struct io_error : std::runtime_error {
    io_error(const std::string& what, std::string p)
        : std::runtime_error(what + ": " + p), path(std::move(p)) {}
    std::string path;
};

// Malformed content: `where` is a byte offset (binary) or JSON path (text).
struct parse_error : std::runtime_error {
    parse_error(const std::string& what, std::string where_)
        : std::runtime_error(what + " at " + where_), where(std::move(where_)) {}
    std::string where;
};

// Kernel/modes files that do not belong together (origin_length != n).
struct compat_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace etsc
