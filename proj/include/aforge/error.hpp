#pragma once

#include <stdexcept>
#include <string>

namespace aforge {

/// Base error. Every error carries the module and operation it originated from.
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string operation, const std::string& what)
      : std::runtime_error(module + "." + operation + ": " + what),
        module_(std::move(module)),
        operation_(std::move(operation)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& operation() const noexcept { return operation_; }

 private:
  std::string module_;
  std::string operation_;
};

#define AFORGE_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  };

AFORGE_DEFINE_ERROR(PreconditionError)
AFORGE_DEFINE_ERROR(DomainError)
AFORGE_DEFINE_ERROR(ConfigError)
AFORGE_DEFINE_ERROR(UsageError)
AFORGE_DEFINE_ERROR(DivergenceError)
AFORGE_DEFINE_ERROR(BranchPointError)
AFORGE_DEFINE_ERROR(ContinuationStepError)
AFORGE_DEFINE_ERROR(ValidationError)
AFORGE_DEFINE_ERROR(HypothesisError)
AFORGE_DEFINE_ERROR(LemmaViolation)
AFORGE_DEFINE_ERROR(IoError)

#undef AFORGE_DEFINE_ERROR

}  // namespace aforge
