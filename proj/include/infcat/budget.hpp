#ifndef INFCAT_BUDGET_HPP
#define INFCAT_BUDGET_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace infcat {

// Thrown when an exhaustive enumeration exceeds its node budget.  Search
// failures must be loud, never silent truncations.
struct budget_error : std::runtime_error {
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed inputs (rank mismatches, cap violations, bad JSON, ...).
struct domain_error : std::invalid_argument {
  explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// Shared countdown for enumeration-heavy operations.  INFCAT_BUDGET
// overrides the default at process start (see tools/infcat.cpp).
class Budget {
 public:
  explicit Budget(std::uint64_t nodes = default_nodes()) : remaining_(nodes) {}

  void spend(std::uint64_t n, const char* where) {
    if (n > remaining_) throw budget_error(std::string("enumeration budget exhausted in ") + where);
    remaining_ -= n;
  }
  std::uint64_t remaining() const { return remaining_; }

  static std::uint64_t default_nodes();
  static Budget& global();

 private:
  std::uint64_t remaining_;
};

}  // namespace infcat

#endif
