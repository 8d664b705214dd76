#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace expamoeba {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Generator rows are Z-dependent; `relation` satisfies q * Omega = 0.
class DependentGenerators : public Error {
 public:
  DependentGenerators(const std::string& what, std::vector<long long> q)
      : Error(what), relation(std::move(q)) {}
  std::vector<long long> relation;
};

}  // namespace expamoeba
