#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace multiscale {

enum class Errc {
  InvalidArgument,
  TooShort,
  Malformed,
  NonUniformSampling,
  Aliased,
  EmbeddingFailure,
  InsufficientBand,
  ZeroPower,
  DegenerateWindow,
  TooFewScales,
  NonPositiveVariance,
  GridTooCoarse,
  EmptyCOI,
  EmptyBand,
  BadOrder,
  ScaleOutOfRange,
  LengthMismatch,
  ScaleMismatch,
  Io,
};

constexpr std::string_view errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::TooShort: return "TooShort";
    case Errc::Malformed: return "Malformed";
    case Errc::NonUniformSampling: return "NonUniformSampling";
    case Errc::Aliased: return "Aliased";
    case Errc::EmbeddingFailure: return "EmbeddingFailure";
    case Errc::InsufficientBand: return "InsufficientBand";
    case Errc::ZeroPower: return "ZeroPower";
    case Errc::DegenerateWindow: return "DegenerateWindow";
    case Errc::TooFewScales: return "TooFewScales";
    case Errc::NonPositiveVariance: return "NonPositiveVariance";
    case Errc::GridTooCoarse: return "GridTooCoarse";
    case Errc::EmptyCOI: return "EmptyCOI";
    case Errc::EmptyBand: return "EmptyBand";
    case Errc::BadOrder: return "BadOrder";
    case Errc::ScaleOutOfRange: return "ScaleOutOfRange";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ScaleMismatch: return "ScaleMismatch";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto its exit-code taxonomy.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code), detail_(detail) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

inline void require(bool cond, Errc code, const std::string& detail) {
  if (!cond) throw Error(code, detail);
}

}  // namespace multiscale
