#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bcore {

// Input and precondition failures carry a stable category name; the CLI maps
// every Error to exit code 2.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& what)
      : std::runtime_error(what), category_(std::move(category)) {}
  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

struct MalformedInput : Error {
  explicit MalformedInput(const std::string& w) : Error("MalformedInput", w) {}
};

struct OffGridWeight : Error {
  explicit OffGridWeight(const std::string& w) : Error("OffGridWeight", w) {}
};

struct NonPositiveB : Error {
  explicit NonPositiveB(const std::string& w) : Error("NonPositiveB", w) {}
};

struct NegativeWeight : Error {
  explicit NegativeWeight(const std::string& w) : Error("NegativeWeight", w) {}
};

struct WouldEmptyClass : Error {
  explicit WouldEmptyClass(const std::string& w) : Error("WouldEmptyClass", w) {}
};

struct TooLarge : Error {
  explicit TooLarge(const std::string& w) : Error("TooLarge", w) {}
};

struct InfeasibleInitial : Error {
  explicit InfeasibleInitial(const std::string& w) : Error("InfeasibleInitial", w) {}
};

// Safety cap tripped; signals a solver bug, never an expected outcome.
struct InternalNonTermination : Error {
  explicit InternalNonTermination(const std::string& w)
      : Error("InternalNonTermination", w) {}
};

}  // namespace bcore
