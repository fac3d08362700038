#include "zscreen/error.hpp"

#include <sstream>
#include <utility>

namespace zscreen {

namespace {

std::string domain_message(const std::string& transformation, double value, std::size_t index) {
  std::ostringstream os;
  os.precision(17);
  os << "value " << value << " outside the domain of " << transformation;
  if (index != 0) os << " at index " << index;
  return os.str();
}

}  // namespace

DomainError::DomainError(std::string transformation, double value, std::size_t index)
    : StatisticalError(domain_message(transformation, value, index)),
      transformation_(std::move(transformation)),
      value_(value),
      index_(index) {}

}  // namespace zscreen
