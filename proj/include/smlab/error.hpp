#pragma once

#include <stdexcept>
#include <string>

namespace smlab
{
//---------------------------------------------------------------------------//
/*!
 * Error hierarchy.
 *
 * Every failure raised by the library derives from \c smlab::Error so that
 * the harness can capture it into a report record without knowing the
 * concrete stage.
 */
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Precondition violated by caller-supplied data.
class InvalidInput : public Error
{
  public:
    using Error::Error;
};

//! Parameter outside its mathematical domain (e.g. beta >= 2).
class DomainError : public Error
{
  public:
    using Error::Error;
};

//! A linear solve or decomposition broke down.
class NumericalBreakdown : public Error
{
  public:
    using Error::Error;
};

//! Implicit density evolution produced negative mass.
class InstabilityError : public Error
{
  public:
    using Error::Error;
};

//! Non-finite state met while integrating sample paths.
class SimulationError : public Error
{
  public:
    using Error::Error;
};

//! The requested combination of mode and data is not supported.
class UnsupportedConfiguration : public Error
{
  public:
    using Error::Error;
};

//! Experiment configuration could not be parsed or validated.
class ConfigError : public Error
{
  public:
    using Error::Error;
};

//! Filesystem failure, carrying the offending path in its message.
class IoError : public Error
{
  public:
    using Error::Error;
};

}  // namespace smlab
