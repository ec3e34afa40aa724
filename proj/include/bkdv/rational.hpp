#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace bkdv {

/// Exact rational number over 64-bit integers, always kept in lowest terms
/// with a positive denominator. Every operation checks for overflow and throws
/// ArithmeticOverflow instead of wrapping.
class Rational
{
  public:
	constexpr Rational() = default;
	constexpr Rational(std::int64_t n) : num_(n) {} // NOLINT: implicit by design of literals
	Rational(std::int64_t n, std::int64_t d);

	std::int64_t num() const { return num_; }
	std::int64_t den() const { return den_; }

	bool is_zero() const { return num_ == 0; }
	bool is_one() const { return num_ == 1 && den_ == 1; }
	bool is_integer() const { return den_ == 1; }
	int sign() const { return (num_ > 0) - (num_ < 0); }

	/// floor / fractional part, frac() in [0, 1).
	std::int64_t floor() const;
	Rational frac() const { return *this - Rational(floor()); }

	double to_double() const { return double(num_) / double(den_); }
	std::string str() const;

	/// Exact decimal or "p/q" literal; throws std::invalid_argument.
	static Rational parse(const std::string &text);
	/// Best rational approximation with denominator <= max_den, or false if
	/// no candidate reproduces `x` to within `tol`.
	static bool approximate(double x, std::int64_t max_den, double tol, Rational &out);

	Rational operator-() const;
	friend Rational operator+(const Rational &a, const Rational &b);
	friend Rational operator-(const Rational &a, const Rational &b);
	friend Rational operator*(const Rational &a, const Rational &b);
	friend Rational operator/(const Rational &a, const Rational &b);
	Rational &operator+=(const Rational &o) { return *this = *this + o; }
	Rational &operator-=(const Rational &o) { return *this = *this - o; }
	Rational &operator*=(const Rational &o) { return *this = *this * o; }
	Rational &operator/=(const Rational &o) { return *this = *this / o; }

	/// Integer power; negative exponents invert.
	Rational pow(std::int64_t e) const;
	Rational abs() const { return num_ < 0 ? -*this : *this; }

	friend bool operator==(const Rational &a, const Rational &b) = default;
	friend std::strong_ordering operator<=>(const Rational &a, const Rational &b);

  private:
	std::int64_t num_ = 0;
	std::int64_t den_ = 1;
};

} // namespace bkdv

template <> struct std::hash<bkdv::Rational>
{
	std::size_t operator()(const bkdv::Rational &r) const noexcept
	{
		return std::hash<std::int64_t>()(r.num()) * 1000003u ^
		       std::hash<std::int64_t>()(r.den());
	}
};
