#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace steklov {

enum class Errc {
  NonSimplePolygon,
  NonConforming,
  ZeroLengthEdge,
  UnmarkedBoundaryEdge,
  EmptyGamma0,
  InvalidIndex,
  EmptyKernel,
  InvalidN,
  NotAQuadPatch,
  DegenerateElement,
  NotSPD,
  RankDeficientGamma0Mass,
  KTooLarge,
  TooLarge,
  IndexOutOfRange,
  InsufficientLevels,
  NonPositiveError,
  FitDiverged,
  InvalidArgument,
  Io,
};

std::string_view to_string(Errc code);

/// Exception carrying one of the named failure modes of the solver pipeline.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

}  // namespace steklov
