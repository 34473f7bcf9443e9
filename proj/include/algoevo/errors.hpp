#ifndef ALGOEVO_ERRORS_HPP
#define ALGOEVO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace algoevo {

// Error categories map onto the CLI exit codes: config_error -> 2,
// data_error -> 3, resource_limit_error -> 4. Library preconditions throw
// std::invalid_argument / std::out_of_range, which the CLI treats as config
// errors as well.

struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct data_error : std::runtime_error {
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

struct resource_limit_error : std::runtime_error {
  explicit resource_limit_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace algoevo

#endif  // ALGOEVO_ERRORS_HPP
