#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bkdv {

/// Base of every error raised by the toolkit. `kind()` is a stable tag used by
/// the CLI to pick an exit code and by tests to assert the failure mode.
class Error : public std::runtime_error
{
  public:
	Error(std::string kind, const std::string &what)
	    : std::runtime_error(what), kind_(std::move(kind))
	{}
	const std::string &kind() const noexcept { return kind_; }

  private:
	std::string kind_;
};

class SyntaxError : public Error
{
  public:
	SyntaxError(const std::string &what, std::size_t offset)
	    : Error("SyntaxError", what + " at byte " + std::to_string(offset)),
	      offset_(offset)
	{}
	std::size_t offset() const noexcept { return offset_; }

  private:
	std::size_t offset_;
};

#define BKDV_DEFINE_ERROR(Name)                                                \
	class Name : public Error                                                  \
	{                                                                          \
	  public:                                                                  \
		explicit Name(const std::string &what) : Error(#Name, what) {}         \
	};

BKDV_DEFINE_ERROR(UnknownFunction)
BKDV_DEFINE_ERROR(DomainError)
BKDV_DEFINE_ERROR(UnboundParameter)
BKDV_DEFINE_ERROR(ArithmeticOverflow)
BKDV_DEFINE_ERROR(MissingKey)
BKDV_DEFINE_ERROR(InvariantViolation)
BKDV_DEFINE_ERROR(Degenerate)
BKDV_DEFINE_ERROR(InverseUnavailable)
BKDV_DEFINE_ERROR(NonMonotoneT)
BKDV_DEFINE_ERROR(AnalyticIntegrationUnsupported)
BKDV_DEFINE_ERROR(DependentBasis)
BKDV_DEFINE_ERROR(NotGauged)
BKDV_DEFINE_ERROR(AmbiguousFit)
BKDV_DEFINE_ERROR(InadmissibleParams)
BKDV_DEFINE_ERROR(NotInvariant)
BKDV_DEFINE_ERROR(NonAffineEquation)
BKDV_DEFINE_ERROR(GridTooCoarse)

#undef BKDV_DEFINE_ERROR

/// Riccati escape detected by the affine solver; carries the escape time.
class Blowup : public Error
{
  public:
	explicit Blowup(double t)
	    : Error("Blowup", "solution blows up near t = " + std::to_string(t)),
	      time_(t)
	{}
	double time() const noexcept { return time_; }

  private:
	double time_;
};

} // namespace bkdv
