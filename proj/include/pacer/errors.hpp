#pragma once

#include <stdexcept>
#include <string>

namespace pacer {

// Malformed input file or record. Messages name the file and the first bad
// record.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, int stage)
        : std::runtime_error(what), stage_(stage) {}

    // First stage at which no feasible continuation exists.
    int stage() const { return stage_; }

private:
    int stage_;
};

// Value tables were solved for a different rider, course, or configuration.
class FingerprintError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pacer
