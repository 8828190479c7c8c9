#ifndef PFT_ERROR_HPP
#define PFT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pft {

enum class ErrorKind {
  Syntax,
  UnknownSymbol,
  SortMismatch,
  NotFirstOrder,
  VariableCollision,
  WrongClass,
  BadArity,
  BadFreeVariables,
  WrongLanguageLevel,
  CertificateRejected,
  LevelMismatch,
  UnknownName,
  UnsupportedAbstractionTerm,
  UnboundVariable,
  CapExceeded,
  Unsupported,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pft

#endif  // PFT_ERROR_HPP
