#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace memcav {

/// Base class for every physics-level failure (invalid inputs, unstable
/// systems, solver breakdown). The CLI maps these to exit code 1.
class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGeometry : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

class InvalidParameter : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

class BranchAmbiguity : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

class SingularConfiguration : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

class UnstableSystem : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

class ConvergenceFailure : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

class UnphysicalState : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

/// Non-fatal advisories collected by operations that accept one.
struct Warnings {
  std::vector<std::string> messages;

  void add(std::string msg) { messages.push_back(std::move(msg)); }
  bool empty() const { return messages.empty(); }
};

inline void warn(Warnings* sink, std::string msg) {
  if (sink != nullptr) sink->add(std::move(msg));
}

}  // namespace memcav
