#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace symdyn {

enum class ErrorCode {
  HorizonExceeded,
  Overflow,
  InvalidSpec,
  NoComponent,
  NoCycle,
  NonConvergence,
  NotCoded,
  FactorizeIncomplete,
  Reducible,
  NoConnector,
  EmptySelection,
  StateLimit,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::NoComponent: return "NoComponent";
    case ErrorCode::NoCycle: return "NoCycle";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NotCoded: return "NotCoded";
    case ErrorCode::FactorizeIncomplete: return "FactorizeIncomplete";
    case ErrorCode::Reducible: return "Reducible";
    case ErrorCode::NoConnector: return "NoConnector";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::StateLimit: return "StateLimit";
  }
  return "Unknown";
}

// Every failure the library reports on purpose carries one of the codes above.
class DomainError : public std::runtime_error {
 public:
  DomainError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw DomainError(code, what);
}

}  // namespace symdyn
