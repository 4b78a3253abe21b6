#pragma once

#include <stdexcept>
#include <string>

namespace latact {

// Raised for malformed input files (model files, dataset CSVs). Carries the
// 1-based line number where parsing stopped; 0 means the whole file.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace latact
