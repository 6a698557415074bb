#pragma once

#include <stdexcept>
#include <string>

namespace agentcoord {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed numeric input: non-finite values, shape mismatches, bad step sizes.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Missing or inconsistent configuration (empty datasets, unknown goals, bad files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Uniqueness violation, e.g. registering the same agent id twice.
class ConflictError : public Error {
 public:
  using Error::Error;
};

/// A subtask was handed to an agent serving a different layer.
class AssignmentError : public Error {
 public:
  using Error::Error;
};

class UnsatisfiableSubtask : public Error {
 public:
  explicit UnsatisfiableSubtask(std::string subtask_id)
      : Error("no registered agent can serve subtask '" + subtask_id + "'"),
        subtask_id_(std::move(subtask_id)) {}
  const std::string& subtask_id() const noexcept { return subtask_id_; }

 private:
  std::string subtask_id_;
};

class IncompleteEvaluation : public Error {
 public:
  using Error::Error;
};

class QueueOverflow : public Error {
 public:
  using Error::Error;
};

}  // namespace agentcoord
