#pragma once

#include <stdexcept>

namespace fluxpop {

// Bad files, bad schemas, bad arguments. The CLI maps this to exit code 2.
class input_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Numeric or structural failures inside the pipeline. CLI exit code 1.
class pipeline_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace fluxpop
