#pragma once

#include <stdexcept>
#include <string>

namespace menurec {

// Categories map onto CLI exit codes (see tools/menurec.cpp).
enum class ErrorKind {
  invalid_input,
  invalid_model,
  infeasible_set,
  not_realizable,
  resource_limit,
  configuration,
  infeasible_parameters,
  contract_violation,
  protocol_violation,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define MENUREC_DEFINE_ERROR(Name, Kind)                                 \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

MENUREC_DEFINE_ERROR(InvalidInput, invalid_input)
MENUREC_DEFINE_ERROR(InvalidModel, invalid_model)
MENUREC_DEFINE_ERROR(InfeasibleSet, infeasible_set)
MENUREC_DEFINE_ERROR(NotRealizable, not_realizable)
MENUREC_DEFINE_ERROR(ResourceLimit, resource_limit)
MENUREC_DEFINE_ERROR(ConfigurationError, configuration)
MENUREC_DEFINE_ERROR(InfeasibleParameters, infeasible_parameters)
MENUREC_DEFINE_ERROR(ContractViolation, contract_violation)
MENUREC_DEFINE_ERROR(ProtocolViolation, protocol_violation)
MENUREC_DEFINE_ERROR(InternalError, internal)

#undef MENUREC_DEFINE_ERROR

}  // namespace menurec
