#pragma once

#include <stdexcept>
#include <string>

namespace divergent {

/// Invalid parameter values or inconsistent configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (maze files, genomes, records, manifests).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
    {
    }

    int line() const { return line_; }

private:
    int line_;
};

} // namespace divergent
