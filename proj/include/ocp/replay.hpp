#pragma once

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocp/environment.hpp"

namespace ocp {

// Malformed replay row; carries the 1-based line number.
class ReplayError : public std::runtime_error {
public:
    ReplayError(long long line, const std::string& what)
        : std::runtime_error("replay line " + std::to_string(line) + ": " + what), line_(line) {}
    long long line() const { return line_; }

private:
    long long line_;
};

// Reads the plain-text replay format: a `t,f_star,set_sizes` header, then
// one row per round with set_sizes as a |-separated list of K nonnegative
// integers. End of stream is reported as nullopt, never as an error.
class ReplayReader {
public:
    ReplayReader(const std::string& path, int expected_k);

    std::optional<StepTruth> next();

private:
    std::ifstream in_;
    int expected_k_;
    long long line_no_ = 0;
};

void write_replay_header(std::ostream& out);
void write_replay_row(std::ostream& out, const StepTruth& truth);

}  // namespace ocp
