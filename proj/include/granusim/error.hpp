#pragma once

#include <stdexcept>
#include <string>

namespace granusim {

/// Base of every error raised by the library. The CLI maps ConfigError to
/// exit code 1 and everything else to 2.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define GRANUSIM_DEFINE_ERROR(Name)     \
  class Name : public Error {           \
  public:                               \
    using Error::Error;                 \
  }

GRANUSIM_DEFINE_ERROR(PreconditionError);
GRANUSIM_DEFINE_ERROR(EdgeCountOverflow);
GRANUSIM_DEFINE_ERROR(UnknownNode);
GRANUSIM_DEFINE_ERROR(ScheduleError);
GRANUSIM_DEFINE_ERROR(SizeOverflow);
GRANUSIM_DEFINE_ERROR(ZeroBaseline);
GRANUSIM_DEFINE_ERROR(RangeTooSmall);
GRANUSIM_DEFINE_ERROR(Collinear);
GRANUSIM_DEFINE_ERROR(Degenerate);
GRANUSIM_DEFINE_ERROR(ConfigError);

#undef GRANUSIM_DEFINE_ERROR

}  // namespace granusim
