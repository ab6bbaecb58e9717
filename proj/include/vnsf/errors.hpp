#pragma once

#include <stdexcept>
#include <string>

namespace vnsf {

struct ParseError : std::runtime_error { using std::runtime_error::runtime_error; };
struct TopologyError : std::runtime_error { using std::runtime_error::runtime_error; };
struct DegenerateError : std::runtime_error { using std::runtime_error::runtime_error; };
struct AmbiguityError : std::runtime_error { using std::runtime_error::runtime_error; };
struct SizeError : std::invalid_argument { using std::invalid_argument::invalid_argument; };
struct DomainError : std::domain_error { using std::domain_error::domain_error; };
struct ConvergenceError : std::runtime_error { using std::runtime_error::runtime_error; };
struct ConfigError : std::runtime_error { using std::runtime_error::runtime_error; };

// A failure inside a time step, tagged with the step index.
struct StepError : std::runtime_error {
  StepError(int step, const std::string& what) : std::runtime_error(what), step(step) {}
  int step;
};

}  // namespace vnsf
