#pragma once

#include <stdexcept>
#include <string>

namespace nbspectra {

// Base class for every failure raised by the library. The CLI maps these to
// exit code 2 (validation) unless noted otherwise.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define NBSPECTRA_DECLARE_ERROR(Name, Base) \
  class Name : public Base {                \
   public:                                  \
    using Base::Base;                       \
  }

NBSPECTRA_DECLARE_ERROR(ParseError, Error);
NBSPECTRA_DECLARE_ERROR(DisconnectedGraph, Error);
NBSPECTRA_DECLARE_ERROR(SelfLoop, Error);
NBSPECTRA_DECLARE_ERROR(DuplicateEdge, Error);
NBSPECTRA_DECLARE_ERROR(DegreeTooLow, Error);
NBSPECTRA_DECLARE_ERROR(BallTooLarge, Error);
NBSPECTRA_DECLARE_ERROR(BallTooSmall, Error);
NBSPECTRA_DECLARE_ERROR(ZeroEdgeWeight, Error);
NBSPECTRA_DECLARE_ERROR(NonConvergence, Error);
NBSPECTRA_DECLARE_ERROR(PreconditionFailed, Error);
NBSPECTRA_DECLARE_ERROR(StructuralViolation, Error);
NBSPECTRA_DECLARE_ERROR(MalformedPath, Error);
NBSPECTRA_DECLARE_ERROR(AnchorZero, Error);
NBSPECTRA_DECLARE_ERROR(Divergence, Error);
NBSPECTRA_DECLARE_ERROR(PoleHit, Divergence);
NBSPECTRA_DECLARE_ERROR(MatchFailure, Error);
NBSPECTRA_DECLARE_ERROR(RegionMismatch, Error);
NBSPECTRA_DECLARE_ERROR(IOError, Error);

#undef NBSPECTRA_DECLARE_ERROR

}  // namespace nbspectra
