#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spider {

/// Base error carrying a stable machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// A single violated chain constraint (code + human detail).
struct Violation {
  std::string code;    // SumViolation, NegativeProbability, ZeroRate, DegenerateAlpha
  std::string detail;
};

/// Thrown by validate() when the parameter set is inconsistent.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : Error("InvalidChain", describe(violations)), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string describe(const std::vector<Violation>& v) {
    std::string s = std::to_string(v.size()) + " constraint(s) violated";
    for (const auto& x : v) s += "; " + x.code + " (" + x.detail + ")";
    return s;
  }
  std::vector<Violation> violations_;
};

/// Constructive witness that a UL factorization leaves the stochastic simplex.
class NotStochastic : public Error {
 public:
  NotStochastic(int depth, int leg, const std::string& entry, double value)
      : Error("NotStochastic", entry + " = " + std::to_string(value) + " at depth " +
                                   std::to_string(depth) + ", leg " + std::to_string(leg)),
        depth_(depth),
        leg_(leg) {}
  int depth() const noexcept { return depth_; }
  int leg() const noexcept { return leg_; }

 private:
  int depth_;
  int leg_;
};

}  // namespace spider
