#pragma once

#include <stdexcept>
#include <string>

namespace mdcs {

// Base of every error raised by the library. The CLI maps these to exit code 3
// (runtime/data) except ConfigError subclasses raised while parsing input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MDCS_DEFINE_ERROR(Name, Base)        \
  class Name : public Base {                 \
   public:                                   \
    using Base::Base;                        \
  };

// emitter-model
MDCS_DEFINE_ERROR(SplittingCollapse, Error)
MDCS_DEFINE_ERROR(InvalidSpec, Error)

// pathway-engine
MDCS_DEFINE_ERROR(UnsupportedFeature, Error)

// response-synth
MDCS_DEFINE_ERROR(EmptyEnsemble, Error)
MDCS_DEFINE_ERROR(GridTooCoarse, Error)
MDCS_DEFINE_ERROR(AliasError, Error)
MDCS_DEFINE_ERROR(InsufficientRecord, Error)

// spectral-transform
MDCS_DEFINE_ERROR(NonSquareGrid, Error)

// lineshape-fit
MDCS_DEFINE_ERROR(NoConvergence, Error)
MDCS_DEFINE_ERROR(NoHalfCrossing, Error)
MDCS_DEFINE_ERROR(FitInputError, Error)

// cli-io
MDCS_DEFINE_ERROR(ConfigError, Error)
MDCS_DEFINE_ERROR(SyntaxError, ConfigError)
MDCS_DEFINE_ERROR(SchemaError, ConfigError)
MDCS_DEFINE_ERROR(UnitError, ConfigError)
MDCS_DEFINE_ERROR(ChecksumMismatch, Error)
MDCS_DEFINE_ERROR(VersionUnsupported, Error)
MDCS_DEFINE_ERROR(IoFailure, Error)

#undef MDCS_DEFINE_ERROR

}  // namespace mdcs
