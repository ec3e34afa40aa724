#include "bkdv/rational.hpp"

#include "bkdv/errors.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bkdv {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v)
{
	if (v > std::numeric_limits<std::int64_t>::max() ||
	    v < -std::numeric_limits<std::int64_t>::max())
		throw ArithmeticOverflow("rational coefficient overflow");
	return static_cast<std::int64_t>(v);
}

i128 gcd128(i128 a, i128 b)
{
	if (a < 0)
		a = -a;
	if (b < 0)
		b = -b;
	while (b != 0)
	{
		i128 t = a % b;
		a = b;
		b = t;
	}
	return a;
}

Rational make(i128 n, i128 d)
{
	if (d == 0)
		throw DomainError("division by zero");
	if (d < 0)
	{
		n = -n;
		d = -d;
	}
	i128 g = gcd128(n, d);
	if (g > 1)
	{
		n /= g;
		d /= g;
	}
	return Rational(narrow(n), narrow(d));
}

} // namespace

Rational::Rational(std::int64_t n, std::int64_t d)
{
	if (d == 0)
		throw DomainError("division by zero");
	if (d < 0)
	{
		n = -n;
		d = -d;
	}
	std::int64_t g = std::gcd(n, d);
	if (g > 1)
	{
		n /= g;
		d /= g;
	}
	num_ = n;
	den_ = d;
}

std::int64_t Rational::floor() const
{
	std::int64_t q = num_ / den_;
	if (num_ % den_ != 0 && num_ < 0)
		--q;
	return q;
}

std::string Rational::str() const
{
	if (den_ == 1)
		return std::to_string(num_);
	return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string &text)
{
	auto slash = text.find('/');
	if (slash != std::string::npos)
		return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
	bool neg = false;
	std::size_t i = 0;
	if (i < text.size() && (text[i] == '-' || text[i] == '+'))
		neg = text[i++] == '-';
	i128 n = 0, d = 1;
	bool any = false, dot = false;
	for (; i < text.size(); ++i)
	{
		char c = text[i];
		if (c == '.' && !dot)
		{
			dot = true;
			continue;
		}
		if (c == 'e' || c == 'E')
		{
			int e = std::stoi(text.substr(i + 1));
			for (; e > 0; --e)
				n *= 10;
			for (; e < 0; ++e)
				d *= 10;
			i = text.size();
			break;
		}
		if (c < '0' || c > '9')
			throw std::invalid_argument("bad number literal: " + text);
		any = true;
		n = n * 10 + (c - '0');
		if (dot)
			d *= 10;
		if (n > (i128(1) << 100) || d > (i128(1) << 100))
			throw ArithmeticOverflow("number literal too long: " + text);
	}
	if (!any)
		throw std::invalid_argument("bad number literal: " + text);
	return make(neg ? -n : n, d);
}

bool Rational::approximate(double x, std::int64_t max_den, double tol, Rational &out)
{
	if (!std::isfinite(x) || std::fabs(x) > 1e15)
		return false;
	// continued fraction convergents
	std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
	double v = x;
	for (int it = 0; it < 64; ++it)
	{
		double a = std::floor(v);
		if (std::fabs(a) > 1e15)
			break;
		auto ai = static_cast<std::int64_t>(a);
		i128 h2 = i128(ai) * h1 + h0, k2 = i128(ai) * k1 + k0;
		if (k2 > max_den || h2 > std::numeric_limits<std::int64_t>::max() / 2 ||
		    h2 < -std::numeric_limits<std::int64_t>::max() / 2)
			break;
		h0 = h1;
		h1 = static_cast<std::int64_t>(h2);
		k0 = k1;
		k1 = static_cast<std::int64_t>(k2);
		if (std::fabs(double(h1) / double(k1) - x) <= tol * (1.0 + std::fabs(x)))
		{
			out = Rational(h1, k1);
			return true;
		}
		double f = v - a;
		if (f < 1e-15)
			break;
		v = 1.0 / f;
	}
	return false;
}

Rational Rational::operator-() const
{
	if (num_ == std::numeric_limits<std::int64_t>::min())
		throw ArithmeticOverflow("rational negation overflow");
	Rational r;
	r.num_ = -num_;
	r.den_ = den_;
	return r;
}

Rational operator+(const Rational &a, const Rational &b)
{
	if (a.den_ == 1 && b.den_ == 1)
		return Rational(narrow(i128(a.num_) + b.num_));
	return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}

Rational operator-(const Rational &a, const Rational &b) { return a + (-b); }

Rational operator*(const Rational &a, const Rational &b)
{
	if (a.den_ == 1 && b.den_ == 1)
		return Rational(narrow(i128(a.num_) * b.num_));
	return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
}

Rational operator/(const Rational &a, const Rational &b)
{
	if (b.num_ == 0)
		throw DomainError("division by zero");
	return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
}

Rational Rational::pow(std::int64_t e) const
{
	if (e < 0)
		return Rational(1) / pow(-e);
	Rational result(1), base = *this;
	while (e > 0)
	{
		if (e & 1)
			result *= base;
		e >>= 1;
		if (e)
			base *= base;
	}
	return result;
}

std::strong_ordering operator<=>(const Rational &a, const Rational &b)
{
	i128 l = i128(a.num_) * b.den_, r = i128(b.num_) * a.den_;
	if (l < r)
		return std::strong_ordering::less;
	if (l > r)
		return std::strong_ordering::greater;
	return std::strong_ordering::equal;
}

} // namespace bkdv
