#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ergomax {

enum class Errc {
  InvalidParameter,
  NonFiniteState,
  StreamTooShort,
  OutOfRange,
  InsufficientRange,
  InsufficientMass,
  ZeroMass,
  BandInverted,
  ConfigInvalid,
  IoError,
  Mismatch,
};

std::string_view to_string(Errc code);

/// Library-wide exception. Carries a machine-readable code and, for
/// NonFiniteState, the orbit index at which the state blew up.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what,
        std::optional<std::uint64_t> index = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        index_(index) {}

  Errc code() const noexcept { return code_; }
  std::optional<std::uint64_t> index() const noexcept { return index_; }

 private:
  Errc code_;
  std::optional<std::uint64_t> index_;
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::NonFiniteState: return "NonFiniteState";
    case Errc::StreamTooShort: return "StreamTooShort";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::InsufficientRange: return "InsufficientRange";
    case Errc::InsufficientMass: return "InsufficientMass";
    case Errc::ZeroMass: return "ZeroMass";
    case Errc::BandInverted: return "BandInverted";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::IoError: return "IoError";
    case Errc::Mismatch: return "Mismatch";
  }
  return "Unknown";
}

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace ergomax
