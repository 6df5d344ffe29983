#pragma once

#include <stdexcept>
#include <string>

namespace cq {

/// Thrown when the denominator polynomial sigma_k vanishes at the evaluation point.
class SingularDenominatorError : public std::domain_error {
 public:
  explicit SingularDenominatorError(const std::string& what)
      : std::domain_error(what) {}
};

/// Singular denominator at a specific grid node; carries the flat node index.
class SingularNodeError : public SingularDenominatorError {
 public:
  SingularNodeError(const std::string& what, long long node)
      : SingularDenominatorError(what), node_(node) {}
  long long node() const noexcept { return node_; }

 private:
  long long node_;
};

}  // namespace cq
