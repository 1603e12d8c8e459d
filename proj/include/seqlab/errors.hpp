#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seqlab {

// Input or parameter outside an operation's domain. Maps to CLI exit code 2.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A constructive step found no candidate although the underlying existence
// argument says one must exist. Always a bug or a violated hidden assumption.
class InternalContradiction : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The coefficient engine's frontier grew beyond the configured cap.
class ResourceCapExceeded : public std::runtime_error {
 public:
  ResourceCapExceeded(const std::string& what, std::size_t frontier_peak)
      : std::runtime_error(what), frontier_peak_(frontier_peak) {}

  std::size_t frontier_peak() const noexcept { return frontier_peak_; }

 private:
  std::size_t frontier_peak_;
};

}  // namespace seqlab
