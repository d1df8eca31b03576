#pragma once

#include <stdexcept>
#include <string>

namespace treex {

// Invalid arguments / violated preconditions.
struct InputError : std::invalid_argument {
    explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Missing or unreadable files.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file contents; carries a 1-based line number when known.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, long line = -1)
        : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_number(line) {}
    long line_number;
};

// Optimization blew up (NaN/inf loss); carries the epoch it happened in.
struct TrainError : std::runtime_error {
    TrainError(const std::string& msg, int epoch = -1)
        : std::runtime_error(epoch >= 0 ? msg + " (epoch " + std::to_string(epoch) + ")" : msg),
          epoch_index(epoch) {}
    int epoch_index;
};

// No hyperparameter candidate satisfied the selection rule.
struct SelectionError : std::runtime_error {
    explicit SelectionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Artifact files produced by incompatible stages or schema versions.
struct IncompatibilityError : std::runtime_error {
    explicit IncompatibilityError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace treex
