#ifndef EVONET_ERROR_HPP
#define EVONET_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace evonet {

// A lattice, distribution or run description that cannot be honored.
class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operation was called with arguments outside its contract
// (node id out of range, network too small for churn, ...).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The convergence metric is undefined because the state mean is ~0.
class DegenerateMeanError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A multi-phase run could not reach the state required by a later phase.
class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or semantically invalid experiment configuration. `path` is the
// offending field in dotted/indexed form, e.g. "runs[1].thresholds".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// File or stream failure; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace evonet

#endif  // EVONET_ERROR_HPP
