#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cooplab {

// Machine-readable error codes. The names double as the wire codes returned
// by the play service.
enum class ErrorCode {
  NotStrictOrdinal,
  InvalidGame,
  MalformedPayload,
  UnknownAct,
  UnknownName,
  NotImplemented,
  ProtocolViolation,
  AgentFailure,
  IncompleteTensor,
  DegeneratePayoffs,
  IoError,
  UnknownAgent,
  UnknownSession,
  WrongPhase,
  TalkDisabled,
  InvalidAct,
  InvalidAction,
  BadRequest,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotStrictOrdinal: return "NotStrictOrdinal";
    case ErrorCode::InvalidGame: return "InvalidGame";
    case ErrorCode::MalformedPayload: return "MalformedPayload";
    case ErrorCode::UnknownAct: return "UnknownAct";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::NotImplemented: return "NotImplemented";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
    case ErrorCode::AgentFailure: return "AgentFailure";
    case ErrorCode::IncompleteTensor: return "IncompleteTensor";
    case ErrorCode::DegeneratePayoffs: return "DegeneratePayoffs";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::WrongPhase: return "WrongPhase";
    case ErrorCode::TalkDisabled: return "TalkDisabled";
    case ErrorCode::InvalidAct: return "InvalidAct";
    case ErrorCode::InvalidAction: return "InvalidAction";
    case ErrorCode::BadRequest: return "BadRequest";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cooplab
