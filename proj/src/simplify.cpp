// Canonical simplification.
//
// An expression is normalized to a sum of monomials with rational
// coefficients. A monomial is a product of kernel factors |k|^e sign(k)^s,
// where a kernel is a variable, parameter, elementary function call,
// a normalized sum (leading coefficient 1) that cannot be expanded, an
// exponential (stored with its argument) or a prime constant carrying a
// fractional exponent.

#include "bkdv/expr.hpp"

#include "expr_node.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

namespace bkdv {

namespace {

enum class KType { Exp, Radical, General };

KType ktype(const Expr &k)
{
	if (k.kind() == Kind::Func && k.func() == Fn::Exp)
		return KType::Exp;
	if (k.kind() == Kind::Const)
		return KType::Radical;
	return KType::General;
}

struct Factor
{
	Expr base;
	Rational e;
	int s = 0;
};

using Mono = std::vector<Factor>;

int cmp_factor(const Factor &a, const Factor &b)
{
	if (int c = compare(a.base, b.base))
		return c;
	if (a.e != b.e)
		return a.e > b.e ? -1 : 1;
	if (a.s != b.s)
		return a.s < b.s ? -1 : 1;
	return 0;
}

struct MonoLess
{
	bool operator()(const Mono &a, const Mono &b) const
	{
		if (a.empty() != b.empty())
			return b.empty();
		std::size_t n = std::min(a.size(), b.size());
		for (std::size_t i = 0; i < n; ++i)
			if (int c = cmp_factor(a[i], b[i]))
				return c < 0;
		return a.size() < b.size();
	}
};

using Poly = std::map<Mono, Rational, MonoLess>;

Expr canon(Node &&n) { return ExprBuilder::make(std::move(n), true); }

Expr c_fn(Fn f, const Expr &a)
{
	Node n;
	n.kind = Kind::Func;
	n.fn = f;
	n.args = {a};
	return canon(std::move(n));
}

Expr c_pow(const Expr &b, const Rational &q)
{
	if (q.is_one())
		return b;
	Node n;
	n.kind = Kind::Pow;
	n.value = q;
	n.args = {b};
	return canon(std::move(n));
}

Expr c_nary(Kind k, std::vector<Expr> as)
{
	Node n;
	n.kind = k;
	n.args = std::move(as);
	return canon(std::move(n));
}

void add_term(Poly &p, const Mono &m, const Rational &c)
{
	if (c.is_zero())
		return;
	auto it = p.find(m);
	if (it == p.end())
		p.emplace(m, c);
	else
	{
		it->second += c;
		if (it->second.is_zero())
			p.erase(it);
	}
}

void add_poly(Poly &p, const Poly &q, const Rational &scale = Rational(1))
{
	for (const auto &[m, c] : q)
		add_term(p, m, c * scale);
}

Poly constant(const Rational &c)
{
	Poly p;
	if (!c.is_zero())
		p.emplace(Mono{}, c);
	return p;
}

Poly single(const Expr &k, const Rational &e, int s, const Rational &c = Rational(1))
{
	Poly p;
	p.emplace(Mono{Factor{k, e, s}}, c);
	return p;
}

// ------------------------------------------------------------ constants

std::vector<std::pair<std::int64_t, std::int64_t>> factorize(std::int64_t n)
{
	std::vector<std::pair<std::int64_t, std::int64_t>> out;
	for (std::int64_t p = 2; p * p <= n && p < 1000000; ++p)
	{
		if (n % p)
			continue;
		std::int64_t k = 0;
		while (n % p == 0)
		{
			n /= p;
			++k;
		}
		out.emplace_back(p, k);
	}
	if (n > 1)
		out.emplace_back(n, 1);
	return out;
}

// c^q for rational q; fractional prime powers become radical factors.
Rational pow_const(const Rational &c, const Rational &q, Mono &radicals)
{
	if (q.is_integer())
		return c.pow(q.num());
	if (c.is_zero())
	{
		if (q.sign() < 0)
			throw DomainError("division by zero");
		return Rational(0);
	}
	Rational coef(c.sign() < 0 && q.num() % 2 != 0 ? -1 : 1);
	auto handle = [&](std::int64_t n, int dir) {
		for (auto [p, k] : factorize(n))
		{
			Rational total = Rational(k * dir) * q;
			std::int64_t fl = total.floor();
			coef *= Rational(p).pow(fl);
			Rational fr = total - Rational(fl);
			if (!fr.is_zero())
				radicals.push_back(Factor{Expr(Rational(p)), fr, 0});
		}
	};
	handle(c.abs().num(), 1);
	handle(c.den(), -1);
	std::sort(radicals.begin(), radicals.end(),
	          [](const Factor &a, const Factor &b) { return cmp_factor(a, b) < 0; });
	return coef;
}

// ------------------------------------------------------------ monomials

// Merge a sorted factor list, combining equal bases and moving integer
// parts of radicals into the coefficient.
Mono normalize(std::vector<Factor> fs, Rational &coef)
{
	std::sort(fs.begin(), fs.end(), [](const Factor &a, const Factor &b) { return compare(a.base, b.base) < 0; });
	Mono out;
	for (auto &f : fs)
	{
		if (!out.empty() && out.back().base == f.base)
		{
			out.back().e += f.e;
			out.back().s ^= f.s;
		}
		else
			out.push_back(f);
	}
	Mono res;
	for (auto &f : out)
	{
		KType kt = ktype(f.base);
		if (kt == KType::Radical)
		{
			std::int64_t fl = f.e.floor();
			if (fl != 0)
			{
				coef *= f.base.value().pow(fl);
				f.e -= Rational(fl);
			}
			f.s = 0;
			if (f.e.is_zero())
				continue;
		}
		else if (kt == KType::Exp)
		{
			f.s = 0;
			if (f.e.is_zero())
				continue;
		}
		else if (f.e.is_zero() && f.s == 0)
			continue;
		res.push_back(std::move(f));
	}
	return res;
}

Mono mono_mul(const Mono &a, const Mono &b, Rational &coef)
{
	std::vector<Factor> fs(a);
	fs.insert(fs.end(), b.begin(), b.end());
	return normalize(std::move(fs), coef);
}

Mono mono_pow(const Mono &m, const Rational &q, Rational &coef)
{
	std::vector<Factor> fs;
	for (const auto &f : m)
	{
		KType kt = ktype(f.base);
		if (kt == KType::General)
			fs.push_back(Factor{f.base, f.e * q, int(((f.s * q.num()) % 2 + 2) % 2)});
		else
			fs.push_back(Factor{f.base, f.e * q, 0});
	}
	return normalize(std::move(fs), coef);
}

Poly readback(const Expr &e);
Expr to_expr(const Poly &p);
Poly finalize(Rational coef, Mono m, bool together);
Poly simp(const Expr &e);

Poly poly_mul(const Poly &a, const Poly &b, bool together = false)
{
	Poly out;
	for (const auto &[ma, ca] : a)
		for (const auto &[mb, cb] : b)
		{
			Rational coef = ca * cb;
			Mono m = mono_mul(ma, mb, coef);
			add_poly(out, finalize(coef, std::move(m), together));
		}
	return out;
}

Poly poly_ipow(const Poly &p, std::int64_t n, bool together)
{
	Poly r = constant(Rational(1));
	for (std::int64_t i = 0; i < n; ++i)
		r = poly_mul(r, p, together);
	return r;
}

Poly mul_factors(const std::vector<std::pair<Poly, Rational>> &fs)
{
	Rational coef(1);
	std::vector<Factor> all;
	for (const auto &[P, q] : fs)
	{
		if (q.is_zero())
			continue;
		if (P.empty())
		{
			if (q.sign() > 0)
				return {};
			throw DomainError("division by zero");
		}
		if (P.size() == 1)
		{
			const auto &[m, c] = *P.begin();
			Mono rad;
			coef *= pow_const(c, q, rad);
			Mono pm = mono_pow(m, q, coef);
			all.insert(all.end(), pm.begin(), pm.end());
			all.insert(all.end(), rad.begin(), rad.end());
		}
		else
		{
			Rational lc = P.begin()->second;
			Poly hat;
			for (const auto &[m, c] : P)
				hat.emplace(m, c / lc);
			Mono rad;
			coef *= pow_const(lc, q, rad);
			all.insert(all.end(), rad.begin(), rad.end());
			all.push_back(Factor{to_expr(hat), q, int(((q.num() % 2) + 2) % 2)});
		}
	}
	Mono m = normalize(std::move(all), coef);
	return finalize(coef, std::move(m), false);
}

Poly poly_pow(const Poly &p, const Rational &q) { return mul_factors({{p, q}}); }

// ------------------------------------------------------------ finalize

bool arg_has_ln_term(const Expr &arg)
{
	auto is_ln_term = [](const Expr &t) {
		if (t.kind() == Kind::Func && t.func() == Fn::Ln)
			return true;
		if (t.kind() == Kind::Mul && t.args().size() == 2 && t.arg(0).is_const() &&
		    t.arg(1).kind() == Kind::Func && t.arg(1).func() == Fn::Ln)
			return true;
		return false;
	};
	if (arg.kind() == Kind::Add)
		return std::any_of(arg.args().begin(), arg.args().end(), is_ln_term);
	return is_ln_term(arg);
}

bool is_add_kernel(const Expr &k) { return k.kind() == Kind::Add; }

Poly finalize(Rational coef, Mono m, bool together)
{
	if (coef.is_zero())
		return {};

	// Combine exponentials and pull logarithms out of their argument.
	std::size_t n_exp = 0;
	bool need_exp = false;
	for (const auto &f : m)
		if (ktype(f.base) == KType::Exp)
		{
			++n_exp;
			if (!f.e.is_one() || arg_has_ln_term(f.base.arg()))
				need_exp = true;
		}
	if (n_exp > 1 || need_exp)
	{
		Poly arg;
		std::vector<Factor> rest;
		for (const auto &f : m)
		{
			if (ktype(f.base) == KType::Exp)
				add_poly(arg, readback(f.base.arg()), f.e);
			else
				rest.push_back(f);
		}
		std::vector<std::pair<Poly, Rational>> extra;
		for (auto it = arg.begin(); it != arg.end();)
		{
			const Mono &mm = it->first;
			if (mm.size() == 1 && mm[0].e.is_one() && mm[0].s == 1 && mm[0].base.kind() == Kind::Func &&
			    mm[0].base.func() == Fn::Ln)
			{
				extra.emplace_back(readback(mm[0].base.arg()), it->second);
				it = arg.erase(it);
			}
			else
				++it;
		}
		if (!arg.empty())
			rest.push_back(Factor{c_fn(Fn::Exp, to_expr(arg)), Rational(1), 0});
		Mono nm = normalize(std::move(rest), coef);
		if (extra.empty())
			return finalize(coef, std::move(nm), together);
		Poly res;
		res.emplace(std::move(nm), coef);
		for (const auto &[P, q] : extra)
		{
			Poly pq = poly_pow(P, q);
			res = poly_mul(res, pq, together);
		}
		return res;
	}

	// Expand cos^n (n >= 2) and positive integer powers of sums.
	for (std::size_t i = 0; i < m.size(); ++i)
	{
		const Factor &f = m[i];
		if (ktype(f.base) != KType::General)
			continue;
		if (f.base.kind() == Kind::Func && f.base.func() == Fn::Cos && f.e.is_integer() && f.e.num() >= 2)
		{
			std::int64_t half = f.e.num() / 2;
			Mono rest = m;
			rest[i].e = f.e - Rational(2 * half);
			Rational c2 = coef;
			rest = normalize(std::move(rest), c2);
			Poly one_minus_sin2 = constant(Rational(1));
			add_term(one_minus_sin2, Mono{Factor{c_fn(Fn::Sin, f.base.arg()), Rational(2), 0}}, Rational(-1));
			Poly ex = poly_ipow(one_minus_sin2, half, together);
			Poly base;
			base.emplace(std::move(rest), c2);
			return poly_mul(base, ex, together);
		}
		if (!is_add_kernel(f.base))
			continue;
		std::int64_t n = 0;
		if (together)
		{
			if (f.e.sign() > 0)
				n = f.e.floor();
		}
		else if (f.e.is_integer() && f.e.num() >= 1 && (f.e.num() % 2 == 0 || f.s == 1))
			n = f.e.num();
		if (n <= 0)
			continue;
		Mono rest = m;
		rest[i].e = f.e - Rational(n);
		rest[i].s = int(((f.s - n) % 2 + 2) % 2);
		Rational c2 = coef;
		rest = normalize(std::move(rest), c2);
		// High powers with large coefficients stay factored.
		try
		{
			Poly ex = poly_ipow(readback(f.base), n, together);
			Poly base;
			base.emplace(std::move(rest), c2);
			return poly_mul(base, ex, together);
		}
		catch (const ArithmeticOverflow &)
		{
		}
	}
	Poly p;
	p.emplace(std::move(m), coef);
	return p;
}

// ------------------------------------------------------------ readback

Factor factor_of(const Expr &f)
{
	switch (f.kind())
	{
	case Kind::Pow:
	{
		const Expr &b = f.arg();
		const Rational &q = f.value();
		if (b.kind() == Kind::Const)
			return Factor{b, q, 0};
		if (b.kind() == Kind::Func && b.func() == Fn::Abs)
			return Factor{b.arg(), q, 0};
		return Factor{b, q, int(((q.num() % 2) + 2) % 2)};
	}
	case Kind::Func:
		if (f.func() == Fn::Abs)
			return Factor{f.arg(), Rational(1), 0};
		if (f.func() == Fn::Sign)
			return Factor{f.arg(), Rational(0), 1};
		if (f.func() == Fn::Exp)
			return Factor{f, Rational(1), 0};
		return Factor{f, Rational(1), 1};
	default:
		return Factor{f, Rational(1), 1};
	}
}

void readback_term(const Expr &e, Poly &out)
{
	Rational coef(1);
	std::vector<Factor> fs;
	if (e.kind() == Kind::Const)
	{
		add_term(out, Mono{}, e.value());
		return;
	}
	if (e.kind() == Kind::Mul)
	{
		for (const auto &a : e.args())
		{
			if (a.kind() == Kind::Const)
				coef *= a.value();
			else
				fs.push_back(factor_of(a));
		}
	}
	else
		fs.push_back(factor_of(e));
	Mono m = normalize(std::move(fs), coef);
	add_term(out, m, coef);
}

Poly readback(const Expr &e)
{
	Poly out;
	if (e.kind() == Kind::Add)
		for (const auto &a : e.args())
			readback_term(a, out);
	else
		readback_term(e, out);
	return out;
}

// ------------------------------------------------------------ emission

void emit_factor(const Factor &f, std::vector<Expr> &out)
{
	switch (ktype(f.base))
	{
	case KType::Exp:
		out.push_back(f.e.is_one() ? f.base : c_pow(f.base, f.e));
		return;
	case KType::Radical:
		out.push_back(c_pow(f.base, f.e));
		return;
	case KType::General:
		break;
	}
	const Expr &k = f.base;
	if (f.e.is_zero())
	{
		if (f.s)
			out.push_back(c_fn(Fn::Sign, k));
		return;
	}
	if (f.e.is_integer())
	{
		bool even = f.e.num() % 2 == 0;
		if (even)
		{
			out.push_back(c_pow(k, f.e));
			if (f.s)
				out.push_back(c_fn(Fn::Sign, k));
		}
		else if (f.s)
			out.push_back(c_pow(k, f.e));
		else
			out.push_back(c_pow(c_fn(Fn::Abs, k), f.e));
		return;
	}
	out.push_back(c_pow(c_fn(Fn::Abs, k), f.e));
	if (f.s)
		out.push_back(c_fn(Fn::Sign, k));
}

Expr term_expr(const Mono &m, const Rational &c)
{
	std::vector<Expr> fs;
	if (!c.is_one() || m.empty())
		fs.push_back(Expr(c));
	for (const auto &f : m)
		emit_factor(f, fs);
	if (fs.size() == 1)
		return fs[0];
	return c_nary(Kind::Mul, std::move(fs));
}

Expr to_expr(const Poly &p)
{
	if (p.empty())
		return Expr(0);
	if (p.size() == 1)
		return term_expr(p.begin()->first, p.begin()->second);
	std::vector<Expr> ts;
	ts.reserve(p.size());
	for (const auto &[m, c] : p)
		ts.push_back(term_expr(m, c));
	return c_nary(Kind::Add, std::move(ts));
}

// ------------------------------------------------------------ functions

Poly ln_kernel(const Expr &y, const Rational &c) { return single(c_fn(Fn::Ln, y), Rational(1), 1, c); }

Poly ln_const(const Rational &c)
{
	Poly out;
	if (c.is_one())
		return out;
	for (auto [p, k] : factorize(c.num()))
		add_poly(out, ln_kernel(Expr(Rational(p)), Rational(k)));
	for (auto [p, k] : factorize(c.den()))
		add_poly(out, ln_kernel(Expr(Rational(p)), Rational(-k)));
	return out;
}

Poly normalized_sum(const Poly &P, Rational &lc)
{
	lc = P.begin()->second;
	Poly hat;
	for (const auto &[m, c] : P)
		hat.emplace(m, c / lc);
	return hat;
}

Poly func_poly(Fn fn, const Poly &P)
{
	switch (fn)
	{
	case Fn::Exp:
		if (P.empty())
			return constant(Rational(1));
		return finalize(Rational(1), Mono{Factor{c_fn(Fn::Exp, to_expr(P)), Rational(1), 0}}, false);
	case Fn::Ln:
	{
		if (P.empty())
			throw DomainError("logarithm of zero");
		if (P.size() > 1)
		{
			Rational lc;
			Poly hat = normalized_sum(P, lc);
			Poly out = ln_const(lc.abs());
			add_poly(out, ln_kernel(c_fn(Fn::Abs, to_expr(hat)), Rational(1)));
			return out;
		}
		const auto &[m, c] = *P.begin();
		Poly out = ln_const(c.abs());
		for (const auto &f : m)
		{
			switch (ktype(f.base))
			{
			case KType::Exp:
				add_poly(out, readback(f.base.arg()), f.e);
				break;
			case KType::Radical:
				add_poly(out, ln_kernel(f.base, f.e));
				break;
			case KType::General:
				if (!f.e.is_zero())
					add_poly(out, ln_kernel(c_fn(Fn::Abs, f.base), f.e));
				break;
			}
		}
		return out;
	}
	case Fn::Abs:
	case Fn::Sign:
	{
		if (P.empty())
			return {};
		bool is_abs = fn == Fn::Abs;
		if (P.size() > 1)
		{
			Rational lc;
			Poly hat = normalized_sum(P, lc);
			Expr k = to_expr(hat);
			if (is_abs)
				return finalize(lc.abs(), Mono{Factor{k, Rational(1), 0}}, false);
			return finalize(Rational(lc.sign()), Mono{Factor{k, Rational(0), 1}}, false);
		}
		const auto &[m, c] = *P.begin();
		std::vector<Factor> fs;
		for (const auto &f : m)
		{
			if (ktype(f.base) != KType::General)
			{
				if (is_abs)
					fs.push_back(f);
				continue;
			}
			if (is_abs)
			{
				if (!f.e.is_zero())
					fs.push_back(Factor{f.base, f.e, 0});
			}
			else if (f.s)
				fs.push_back(Factor{f.base, Rational(0), 1});
		}
		Rational coef = is_abs ? c.abs() : Rational(c.sign());
		Mono nm = normalize(std::move(fs), coef);
		return finalize(coef, std::move(nm), false);
	}
	case Fn::Sin:
	case Fn::Cos:
	case Fn::Arctan:
	{
		if (P.empty())
			return constant(Rational(fn == Fn::Cos ? 1 : 0));
		if (fn != Fn::Arctan && P.size() == 1)
		{
			const auto &[m, c] = *P.begin();
			if (c.is_one() && m.size() == 1 && m[0].e.is_one() && m[0].s == 1 && m[0].base.kind() == Kind::Func &&
			    m[0].base.func() == Fn::Arctan)
			{
				Poly u = readback(m[0].base.arg());
				Poly den = poly_mul(u, u);
				add_term(den, Mono{}, Rational(1));
				Poly r = poly_pow(den, Rational(-1, 2));
				return fn == Fn::Cos ? r : poly_mul(u, r);
			}
		}
		Poly Q = P;
		bool flip = P.begin()->second.sign() < 0;
		if (flip)
		{
			Q.clear();
			for (const auto &[m, c] : P)
				Q.emplace(m, -c);
		}
		Rational c = (flip && fn != Fn::Cos) ? Rational(-1) : Rational(1);
		return single(c_fn(fn, to_expr(Q)), Rational(1), 1, c);
	}
	case Fn::Sqrt:
		return poly_pow(P, Rational(1, 2));
	}
	return {};
}

// ------------------------------------------------------------ driver

Poly simp(const Expr &e)
{
	if (e.is_canonical())
		return readback(e);
	switch (e.kind())
	{
	case Kind::Const:
		return constant(e.value());
	case Kind::Var:
	case Kind::Param:
		return single(e, Rational(1), 1);
	case Kind::Add:
	{
		Poly out;
		for (const auto &a : e.args())
			add_poly(out, simp(a));
		return out;
	}
	case Kind::Neg:
	{
		Poly out;
		add_poly(out, simp(e.arg()), Rational(-1));
		return out;
	}
	case Kind::Mul:
	{
		std::vector<std::pair<Poly, Rational>> fs;
		for (const auto &a : e.args())
			fs.emplace_back(simp(a), Rational(1));
		return mul_factors(fs);
	}
	case Kind::Div:
		return mul_factors({{simp(e.arg(0)), Rational(1)}, {simp(e.arg(1)), Rational(-1)}});
	case Kind::Pow:
		return mul_factors({{simp(e.arg()), e.value()}});
	case Kind::Func:
		return func_poly(e.func(), simp(e.arg()));
	}
	return {};
}

// Multiply through by the negative powers of every kernel and expand all
// sums raised to positive powers; a zero result proves the input is zero
// wherever it is defined.
Poly together(Poly p)
{
	for (int iter = 0; iter < 6; ++iter)
	{
		std::map<Expr, Rational, ExprLess> lowest;
		for (const auto &[m, c] : p)
			for (const auto &f : m)
				if (ktype(f.base) == KType::General && f.e.sign() < 0)
				{
					auto it = lowest.find(f.base);
					if (it == lowest.end() || f.e < it->second)
						lowest[f.base] = f.e;
				}
		Mono mult;
		for (const auto &[k, e] : lowest)
			mult.push_back(Factor{k, -e, 0});
		Poly next;
		for (const auto &[m, c] : p)
		{
			Rational coef = c;
			Mono nm = mono_mul(m, mult, coef);
			add_poly(next, finalize(coef, std::move(nm), true));
		}
		bool done = lowest.empty();
		p = std::move(next);
		if (done || p.empty())
			break;
	}
	return p;
}

} // namespace

std::vector<TermView> terms_of(const Expr &e)
{
	std::vector<TermView> out;
	for (const auto &[m, c] : simp(e))
	{
		TermView tv{c, {}};
		for (const auto &f : m)
			tv.factors.push_back(FactorView{f.base, f.e, f.s});
		out.push_back(std::move(tv));
	}
	return out;
}

Expr term_expr(const TermView &t)
{
	std::vector<Factor> fs;
	for (const auto &f : t.factors)
		fs.push_back(Factor{f.base, f.e, f.s});
	Rational coef = t.coef;
	Mono m = normalize(std::move(fs), coef);
	return to_expr(finalize(coef, std::move(m), false));
}

Expr simplify(const Expr &e)
{
	if (e.is_canonical())
		return e;
	return to_expr(simp(e));
}

const char *to_string(ZeroTest z)
{
	switch (z)
	{
	case ZeroTest::Zero: return "Zero";
	case ZeroTest::NonZero: return "NonZero";
	case ZeroTest::Unknown: return "Unknown";
	}
	return "?";
}

std::uint64_t probe_seed()
{
	if (const char *s = std::getenv("BKDV_PROBE_SEED"))
	{
		char *end = nullptr;
		unsigned long long v = std::strtoull(s, &end, 0);
		if (end && *end == '\0')
			return v;
	}
	return 0x42;
}

namespace {

double probe_coord(std::mt19937_64 &rng)
{
	double u = double(rng() >> 11) * 0x1.0p-53;
	double mag = 0.1 + 1.9 * u;
	return (rng() >> 63) ? -mag : mag;
}

} // namespace

std::vector<Point> probe_points(int n)
{
	std::mt19937_64 rng(probe_seed());
	std::vector<Point> out;
	for (int k = 0; k < n; ++k)
	{
		Point pt;
		pt.t = probe_coord(rng);
		pt.x = probe_coord(rng);
		pt.w = probe_coord(rng);
		pt.phi.resize(8);
		for (auto &v : pt.phi)
			v = probe_coord(rng);
		out.push_back(std::move(pt));
	}
	return out;
}

ZeroTest is_zero(const Expr &e, const ParamValues &params)
{
	Poly p;
	bool have_poly = false;
	try
	{
		p = simp(e);
		have_poly = true;
		if (p.empty())
			return ZeroTest::Zero;
		if (together(p).empty())
			return ZeroTest::Zero;
	}
	catch (const ArithmeticOverflow &)
	{
	}
	catch (const DomainError &)
	{
	}

	std::vector<Expr> terms;
	if (have_poly)
		for (const auto &[m, c] : p)
			terms.push_back(term_expr(m, c));
	else
		terms.push_back(e);

	std::vector<std::string> names;
	for (const auto &t : terms)
		t.collect_params(names);
	std::sort(names.begin(), names.end());

	std::mt19937_64 rng(probe_seed());
	for (int k = 0; k < 32; ++k)
	{
		Point pt;
		pt.t = probe_coord(rng);
		pt.x = probe_coord(rng);
		pt.w = probe_coord(rng);
		pt.phi.resize(8);
		for (auto &v : pt.phi)
			v = probe_coord(rng);
		ParamValues pv = params;
		for (const auto &n : names)
		{
			double v = probe_coord(rng);
			pv.emplace(n, v);
		}
		try
		{
			double sum = 0, scale = 0;
			for (const auto &t : terms)
			{
				double v = eval(t, pt, pv);
				sum += v;
				scale = std::max(scale, std::fabs(v));
			}
			if (terms.size() < 2)
				scale = 0;
			if (std::fabs(sum) > 1e-7 * (1.0 + scale))
				return ZeroTest::NonZero;
		}
		catch (const DomainError &)
		{
		}
	}
	return ZeroTest::Unknown;
}

} // namespace bkdv
