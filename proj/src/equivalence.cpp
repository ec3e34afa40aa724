#include "bkdv/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace bkdv {

namespace {

Expr tvar() { return Expr::t(); }
Expr xvar() { return Expr::x(); }
Expr dt(const Expr &e) { return diff(e, VarKind::T); }
Expr dx(const Expr &e) { return diff(e, VarKind::X); }
Expr at_t(const Expr &e, const Expr &t) { return subst(e, {{"t", t}}); }

bool is_zero_expr(const Expr &e) { return simplify(e).is_zero_const(); }

/// Parameter values for numeric checks: bound ones plus a generic value for
/// the rest.
ParamValues complete_params(const std::vector<Expr> &es, const ParamValues &params)
{
	ParamValues pv = params;
	std::vector<std::string> names;
	for (const auto &e : es)
		e.collect_params(names);
	for (const auto &n : names)
		if (!pv.count(n))
			pv[n] = 0.7;
	return pv;
}

void require_time_only(const Expr &e, const char *what)
{
	if (simplify(e).depends_on(VarKind::X))
		throw InvariantViolation(std::string(what) + " must be a function of t only");
}

// ------------------------------------------------------------ time inverse

bool verify_inverse(const Expr &T, const Expr &cand, double t0, const ParamValues &params)
{
	if (cand.depends_on(VarKind::X))
		return false;
	ParamValues pv = complete_params({T, cand}, params);
	Compiled cT(T, pv), cI(cand, pv);
	int ok = 0;
	for (double d : {-0.35, -0.2, -0.1, 0.05, 0.15, 0.3, 0.45})
	{
		double t = t0 + d;
		double s = cT.try_eval(t, 0.0);
		if (!std::isfinite(s))
			continue;
		double back = cI.try_eval(s, 0.0);
		if (!std::isfinite(back) || std::abs(back - t) > 1e-9 * (1.0 + std::abs(t)))
			return false;
		++ok;
	}
	return ok >= 3;
}

std::optional<Expr> constant_at(const Expr &e, int t0, const ParamValues &pv)
{
	try
	{
		Expr v = subst(e, {{"t", Expr(t0)}});
		if (!is_constant(v))
			return std::nullopt;
		double d = eval(v, 0.0, 0.0, pv);
		if (!std::isfinite(d))
			return std::nullopt;
		return v;
	}
	catch (const Error &)
	{
		return std::nullopt;
	}
}

} // namespace

std::optional<Expr> invert_time(const Expr &Tin, const ParamValues &params)
{
	Expr T = simplify(Tin);
	if (T.depends_on(VarKind::X) || !T.depends_on(VarKind::T))
		return std::nullopt;
	Expr s = tvar();
	Expr T1 = dt(T), T2 = dt(T1), T3 = dt(T2);
	if (T2.is_zero_const())
	{
		if (!is_constant(T1))
			return std::nullopt;
		Expr b = simplify(T - T1 * tvar());
		return simplify((s - b) / T1);
	}
	ParamValues pv = complete_params({T}, params);
	for (int t0 : {0, 1, -1, 2})
	{
		auto v0 = constant_at(T, t0, pv), v1 = constant_at(T1, t0, pv), v2 = constant_at(T2, t0, pv),
		     v3 = constant_at(T3, t0, pv);
		if (!v0 || !v1 || !v2)
			continue;
		if (is_zero(*v1, pv) != ZeroTest::NonZero)
			continue;
		Expr tt0(t0);
		std::vector<Expr> cands;
		// Moebius (a tau + b) / (1 + c tau), tau = t - t0
		{
			Expr b = *v0, c = simplify(-*v2 / (Expr(2) * *v1));
			Expr a = simplify(*v1 + b * c);
			cands.push_back(tt0 + (s - b) / (a - c * s));
		}
		// c e^{lambda tau} + d
		if (is_zero(*v2, pv) == ZeroTest::NonZero)
		{
			Expr lam = simplify(*v2 / *v1);
			Expr c = simplify(*v1 / lam);
			Expr d = simplify(*v0 - c);
			cands.push_back(tt0 + ln((s - d) / c) / lam);
		}
		// c t^p + d
		if (t0 != 0)
		{
			Expr p = simplify(Expr(1) + tt0 * *v2 / *v1);
			if (p.is_const() && !p.value().is_zero())
			{
				Rational q = p.value();
				Expr c = simplify(*v1 / (p * pow(tt0, q - Rational(1))));
				Expr d = simplify(*v0 - c * pow(tt0, q));
				cands.push_back(pow((s - d) / c, Rational(1) / q));
			}
		}
		// k tan(nu tau) + d
		if (v3 && is_zero_expr(*v2))
		{
			Expr nu2 = simplify(*v3 / (Expr(2) * *v1));
			double n2 = 0;
			try
			{
				n2 = eval(nu2, 0.0, 0.0, pv);
			}
			catch (const Error &)
			{
			}
			if (n2 > 0)
			{
				Expr nu = simplify(sqrt(nu2));
				Expr k = simplify(*v1 / nu);
				cands.push_back(tt0 + arctan((s - *v0) / k) / nu);
			}
		}
		for (auto &c : cands)
		{
			Expr cs;
			try
			{
				cs = simplify(c);
			}
			catch (const Error &)
			{
				continue;
			}
			if (verify_inverse(T, cs, double(t0), params))
				return cs;
		}
	}
	return std::nullopt;
}

Expr require_time_inverse(const Expr &T, const ParamValues &params)
{
	auto inv = invert_time(T, params);
	if (!inv)
		throw InverseUnavailable("no closed-form inverse for T = " + simplify(T).pretty());
	return *inv;
}

double invert_time_numeric(const Expr &T, double s, double lo, double hi, const ParamValues &params)
{
	Compiled c(simplify(T), complete_params({T}, params));
	double flo = c(lo, 0.0) - s, fhi = c(hi, 0.0) - s;
	if (flo == 0.0)
		return lo;
	if (fhi == 0.0)
		return hi;
	if ((flo > 0) == (fhi > 0))
		throw NonMonotoneT("T(t) = " + std::to_string(s) + " has no bracketed root");
	for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++i)
	{
		double mid = 0.5 * (lo + hi);
		double fm = c(mid, 0.0) - s;
		if (fm == 0.0)
			return mid;
		if ((fm > 0) == (flo > 0))
		{
			lo = mid;
			flo = fm;
		}
		else
			hi = mid;
	}
	return 0.5 * (lo + hi);
}

// ------------------------------------------------------------ transformations

void EquivTransformation::validate() const
{
	require_time_only(T, "T");
	require_time_only(X1, "X1");
	require_time_only(X0, "X0");
	Expr jac = simplify(dt(T) * X1);
	if (jac.is_zero_const())
		throw Degenerate("T_t * X1 vanishes identically");
	ParamValues pv = complete_params({jac}, params);
	for (const auto &p : probe_points())
	{
		double v;
		try
		{
			v = eval(jac, p, pv);
		}
		catch (const DomainError &)
		{
			continue;
		}
		if (v == 0.0)
			throw Degenerate("T_t * X1 vanishes at t = " + std::to_string(p.t));
	}
}

EquivTransformation EquivTransformation::simplified() const
{
	return {simplify(T), simplify(X1), simplify(X0), params};
}

bool EquivTransformation::same(const EquivTransformation &o) const
{
	auto a = simplified(), b = o.simplified();
	return a.T == b.T && a.X1 == b.X1 && a.X0 == b.X0;
}

Coefficients transformed_coefficients(const EquivTransformation &g, const GaugedEquation &eq)
{
	Expr Tt = dt(g.T), Ttt = dt(Tt);
	Expr X1t = dt(g.X1), X0t = dt(g.X0);
	Expr U0 = (X1t * xvar() + X0t) / Tt;

	Coefficients c;
	c.A.assign(std::size_t(eq.r) + 1, Expr(0));
	for (int j = 2; j <= eq.r; ++j)
		c.A[std::size_t(j)] = simplify(pow(g.X1, Rational(j)) * eq.A[std::size_t(j)] / Tt);
	c.A[0] = simplify((eq.A[0] + Expr(2) * X1t / g.X1 - Ttt / Tt) / Tt);
	c.B = simplify(g.X1 * eq.B / (Tt * Tt) + dt(U0) / Tt - U0 * c.A[0]);
	return c;
}

GaugedEquation apply_gauged(const EquivTransformation &g, const GaugedEquation &eq)
{
	g.validate();
	Coefficients c = transformed_coefficients(g, eq);
	Expr tinv = require_time_inverse(g.T, g.params);
	Expr xold = simplify((xvar() - at_t(g.X0, tinv)) / at_t(g.X1, tinv));
	Bindings b{{"t", tinv}, {"x", xold}};

	GaugedEquation out;
	out.r = eq.r;
	out.params = eq.params;
	for (const auto &[k, v] : g.params)
		out.params[k] = v;
	for (const auto &a : c.A)
		out.A.push_back(subst(a, b));
	out.A[1] = Expr(0);
	out.B = subst(c.B, b);
	out.validate();
	return out;
}

EquivTransformation compose(const EquivTransformation &g2, const EquivTransformation &g1)
{
	EquivTransformation g;
	Expr X1_2 = at_t(g2.X1, g1.T);
	g.T = at_t(g2.T, g1.T);
	g.X1 = simplify(X1_2 * g1.X1);
	g.X0 = simplify(X1_2 * g1.X0 + at_t(g2.X0, g1.T));
	g.params = g1.params;
	for (const auto &[k, v] : g2.params)
		g.params[k] = v;
	return g;
}

EquivTransformation invert(const EquivTransformation &g)
{
	Expr tinv = require_time_inverse(g.T, g.params);
	EquivTransformation h;
	h.T = tinv;
	h.X1 = simplify(Expr(1) / at_t(g.X1, tinv));
	h.X0 = simplify(-at_t(g.X0 / g.X1, tinv));
	h.params = g.params;
	return h;
}

// ------------------------------------------------------------ pushforward

VectorField pushforward_scaling(const Expr &X1, const VectorField &q)
{
	return VectorField{q.tau, q.zeta + q.tau * dt(X1) / X1, X1 * q.chi}.simplified();
}

VectorField pushforward_shift(const Expr &X0, const VectorField &q)
{
	return VectorField{q.tau, q.zeta, q.chi + q.tau * dt(X0) - q.zeta * X0}.simplified();
}

VectorField pushforward_time(const Expr &T, const VectorField &q, const ParamValues &params)
{
	Expr tinv = require_time_inverse(T, params);
	return VectorField{at_t(q.tau * dt(T), tinv), at_t(q.zeta, tinv), at_t(q.chi, tinv)}.simplified();
}

VectorField pushforward(const EquivTransformation &g, const VectorField &q)
{
	return pushforward_time(g.T, pushforward_shift(g.X0, pushforward_scaling(g.X1, q)), g.params);
}

// ------------------------------------------------------------ gauges

namespace {

struct Antiderivative
{
	Expr X, Xinv;
};

struct LinearPower
{
	Expr c, L;
	int n;
};

/// P = c (a x + b)^n with a, b, c free of x.
std::optional<LinearPower> linear_power(const Expr &P)
{
	Expr x = xvar();
	std::vector<Expr> d{simplify(P)};
	int n = 0;
	while (d.back().depends_on(VarKind::X))
	{
		if (++n > 12)
			return std::nullopt;
		d.push_back(dx(d.back()));
	}
	if (n == 0 || d.back().is_zero_const())
		return std::nullopt;
	Expr lead = d[std::size_t(n)];
	Expr L = simplify(d[std::size_t(n) - 1] / lead); // x + beta
	if (n == 1)
		return LinearPower{Expr(1), simplify(P), 1};
	Rational fact(1);
	for (int k = 2; k <= n; ++k)
		fact = fact * Rational(k);
	Expr c = simplify(lead / Expr(fact));
	if (is_zero(P - c * pow(L, Rational(n))) != ZeroTest::Zero)
		return std::nullopt;
	return LinearPower{c, L, n};
}

std::optional<Antiderivative> monomial_antiderivative(const Expr &invC)
{
	Expr x = xvar();
	if (!invC.depends_on(VarKind::X))
		return Antiderivative{simplify(invC * x), simplify(x / invC)};

	auto terms = terms_of(invC);
	Expr g;
	FactorView f;
	if (terms.size() == 1)
	{
		TermView g_part{terms[0].coef, {}};
		std::vector<FactorView> xf;
		for (const auto &fv : terms[0].factors)
			(fv.base.depends_on(VarKind::X) ? xf.push_back(fv) : g_part.factors.push_back(fv));
		if (xf.size() != 1)
			return std::nullopt;
		g = term_expr(g_part);
		f = xf[0];
	}
	else
	{
		// expanded c (a x + b)^n
		auto lp = linear_power(invC);
		if (!lp)
			return std::nullopt;
		g = lp->c;
		f = FactorView{lp->L, Rational(lp->n), lp->n % 2};
	}

	if (f.base.kind() == Kind::Func && f.base.func() == Fn::Exp)
	{
		Expr arg = simplify(Expr(f.e) * f.base.arg());
		Expr lam = simplify(dx(arg));
		if (lam.depends_on(VarKind::X) || lam.is_zero_const())
			return std::nullopt;
		Expr mu = simplify(arg - lam * x);
		if (mu.depends_on(VarKind::X))
			return std::nullopt;
		return Antiderivative{simplify(g * exp(arg) / lam), simplify((ln(lam * x / g) - mu) / lam)};
	}

	auto lp = linear_power(f.base);
	if (!lp)
		return std::nullopt;
	// |c L^n|^e sign(c L^n)^s = |c|^e sign(c)^s |L|^{ne} sign(L)^{ns}
	Expr L = lp->L;
	Rational e = f.e * Rational(lp->n);
	g = simplify(g * pow(abs(lp->c), f.e) * (f.s % 2 ? sign(lp->c) : Expr(1)));
	Expr a = simplify(dx(L));
	Expr b = simplify(L - a * x);
	bool odd = (f.s * lp->n) % 2 != 0; // |L|^e sign(L)
	if (e == Rational(-1))
	{
		if (!odd)
			return std::nullopt;
		// 1/L
		return Antiderivative{simplify(g * ln(abs(L)) / a), simplify((exp(a * x / g) - b) / a)};
	}
	Rational p = e + Rational(1);
	Expr k = simplify(g / (a * Expr(p)));
	Expr X = odd ? pow(abs(L), p) : pow(abs(L), p) * sign(L);
	Expr y = x / k;
	Expr Linv = odd ? pow(abs(y), Rational(1) / p) : y * pow(abs(y), Rational(1) / p - Rational(1));
	return Antiderivative{simplify(k * X), simplify((Linv - b) / a)};
}

std::optional<Antiderivative> antiderivative(const Expr &C)
{
	if (auto ad = monomial_antiderivative(simplify(Expr(1) / C)))
		return ad;
	// separable C = phi(t) psi(x): integrate 1/psi and rescale
	for (int t0 : {0, 1, 2})
		for (int x0 : {0, 1, 2})
		{
			try
			{
				Expr c00 = simplify(subst(C, {{"t", Expr(t0)}, {"x", Expr(x0)}}));
				if (!c00.is_const() || c00.is_zero_const())
					continue;
				Expr psi = simplify(subst(C, {{"t", Expr(t0)}}));
				Expr phi = simplify(subst(C, {{"x", Expr(x0)}}) / c00);
				if (is_zero(C - phi * psi) != ZeroTest::Zero)
					return std::nullopt;
				auto ad = monomial_antiderivative(simplify(Expr(1) / psi));
				if (!ad)
					return std::nullopt;
				return Antiderivative{simplify(ad->X / phi), subst(ad->Xinv, {{"x", xvar() * phi}})};
			}
			catch (const DomainError &)
			{
			}
		}
	return std::nullopt;
}

} // namespace

std::pair<Equation, CGaugeTransformation> gauge_C_to_1(const Equation &eq)
{
	Equation out = eq;
	out.C = Expr(1);
	if (is_zero_expr(eq.C - Expr(1)))
		return {out, CGaugeTransformation{}};
	auto ad = antiderivative(eq.C);
	if (!ad)
		throw AnalyticIntegrationUnsupported("no closed-form invertible antiderivative of 1/C for C = " +
		                                     simplify(eq.C).pretty());
	if (is_zero(dx(ad->X) * eq.C - Expr(1), eq.params) == ZeroTest::NonZero)
		throw AnalyticIntegrationUnsupported("antiderivative check failed for C = " + simplify(eq.C).pretty());

	const Expr &C = eq.C;
	int r = eq.r;
	// c[m][k]: coefficient of u_k in the m-th derivative with respect to the new x
	std::vector<std::vector<Expr>> c(std::size_t(r) + 1);
	c[0] = {Expr(1)};
	for (int m = 0; m < r; ++m)
	{
		auto &next = c[std::size_t(m) + 1];
		next.assign(std::size_t(m) + 2, Expr(0));
		for (int k = 0; k <= m + 1; ++k)
		{
			Expr acc(0);
			if (k <= m)
				acc = dx(c[std::size_t(m)][std::size_t(k)]);
			if (k >= 1)
				acc = acc + c[std::size_t(m)][std::size_t(k) - 1];
			next[std::size_t(k)] = simplify(C * acc);
		}
	}
	Expr transport = simplify(dt(ad->X) * C);
	std::vector<Expr> At(std::size_t(r) + 1, Expr(0));
	for (int k = r; k >= 1; --k)
	{
		Expr rhs = eq.A[std::size_t(k)];
		if (k == 1)
			rhs = rhs - transport;
		for (int m = k + 1; m <= r; ++m)
			rhs = rhs - At[std::size_t(m)] * c[std::size_t(m)][std::size_t(k)];
		At[std::size_t(k)] = simplify(rhs / c[std::size_t(k)][std::size_t(k)]);
	}
	At[0] = eq.A[0];

	Bindings b{{"x", ad->Xinv}};
	for (int k = 0; k <= r; ++k)
		out.A[std::size_t(k)] = subst(At[std::size_t(k)], b);
	out.B = subst(eq.B, b);
	out.validate();
	return {out, CGaugeTransformation{ad->X, ad->Xinv}};
}

std::pair<GaugedEquation, C1Transformation> gauge_A1_to_0(const Equation &eq)
{
	if (!is_zero_expr(eq.C - Expr(1)))
		throw NotGauged("A1 gauge requires C = 1");
	Expr U0 = simplify(-eq.A[1]);
	std::vector<Expr> A(eq.A.size());
	for (std::size_t k = 2; k < A.size(); ++k)
		A[k] = simplify(eq.A[k]);
	A[1] = Expr(0);
	A[0] = simplify(eq.A[0] + dx(U0));
	Expr B = eq.B + dt(U0) + dx(U0) * U0;
	Expr dk = U0;
	for (std::size_t k = 0; k < A.size(); ++k)
	{
		B = B - dk * A[k];
		dk = dx(dk);
	}
	GaugedEquation g;
	g.r = eq.r;
	g.A = std::move(A);
	g.B = simplify(B);
	g.params = eq.params;
	g.validate();
	return {g, C1Transformation{tvar(), Expr(1), Expr(0), U0}};
}

GaugeResult gauge(const Equation &eq)
{
	auto [c1, cstep] = gauge_C_to_1(eq);
	auto [g, astep] = gauge_A1_to_0(c1);
	return GaugeResult{g, cstep, astep};
}

// ------------------------------------------------------------ algebra

AlgebraField equivalence_algebra_field(AlgebraKind kind, const Expr &p, int r)
{
	Expr u = Expr::param("u"), x = xvar();
	Expr A0 = Expr::param("A0"), B = Expr::param("B");
	Expr pt = dt(p), ptt = dt(pt);
	AlgebraField f;
	f.phi.assign(std::size_t(r) + 1, Expr(0));
	switch (kind)
	{
	case AlgebraKind::D:
		f.tau = simplify(p);
		f.xi = Expr(0);
		f.eta = simplify(-pt * u);
		for (int j = 2; j <= r; ++j)
			f.phi[std::size_t(j)] = simplify(-pt * Expr::param("A" + std::to_string(j)));
		f.phi[0] = simplify(-(pt * A0 + ptt));
		f.psi = simplify(Expr(-2) * pt * B);
		break;
	case AlgebraKind::S:
		f.tau = Expr(0);
		f.xi = simplify(p * x);
		f.eta = simplify(p * u + pt * x);
		for (int j = 2; j <= r; ++j)
			f.phi[std::size_t(j)] = simplify(Expr(j) * p * Expr::param("A" + std::to_string(j)));
		f.phi[0] = simplify(Expr(2) * pt);
		f.psi = simplify(p * B + ptt * x - pt * x * A0);
		break;
	case AlgebraKind::P:
		f.tau = Expr(0);
		f.xi = simplify(p);
		f.eta = simplify(pt);
		f.psi = simplify(ptt - pt * A0);
		break;
	}
	return f;
}

AlgebraField on_equation(const AlgebraField &f, const GaugedEquation &eq)
{
	Bindings b{{"A0", eq.A[0]}, {"B", eq.B}};
	for (int j = 2; j <= eq.r; ++j)
		b["A" + std::to_string(j)] = eq.A[std::size_t(j)];
	AlgebraField out;
	out.tau = subst(f.tau, b);
	out.xi = subst(f.xi, b);
	out.eta = subst(f.eta, b);
	for (const auto &e : f.phi)
		out.phi.push_back(subst(e, b));
	out.psi = subst(f.psi, b);
	return out;
}

// ------------------------------------------------------------ solutions

namespace {

/// Lagrange weights of a stencil of up to 6 nodes around coordinate pos
/// (in grid units); returns the first node index.
int stencil(double pos, int n, std::vector<double> &w)
{
	int m = std::min(6, n);
	int first = int(std::floor(pos)) - (m / 2 - 1);
	first = std::clamp(first, 0, n - m);
	w.assign(std::size_t(m), 1.0);
	for (int i = 0; i < m; ++i)
	{
		// exact node hit
		if (pos == double(first + i))
		{
			std::fill(w.begin(), w.end(), 0.0);
			w[std::size_t(i)] = 1.0;
			return first;
		}
		for (int k = 0; k < m; ++k)
			if (k != i)
				w[std::size_t(i)] *= (pos - double(first + k)) / double(i - k);
	}
	return first;
}

double interpolate(const GridSolution &g, double t, double x)
{
	std::vector<double> wt, wx;
	int ft = stencil((t - g.t0) / g.dt(), g.nt, wt);
	int fx = stencil((x - g.x0) / g.dx(), g.nx, wx);
	double acc = 0;
	for (std::size_t i = 0; i < wt.size(); ++i)
	{
		if (wt[i] == 0.0)
			continue;
		double row = 0;
		for (std::size_t j = 0; j < wx.size(); ++j)
			row += wx[j] * g.at(ft + int(i), fx + int(j));
		acc += wt[i] * row;
	}
	return acc;
}

} // namespace

GridSolution map_solution(const EquivTransformation &g, const GridSolution &sol)
{
	sol.validate();
	ParamValues pv = complete_params({g.T, g.X1, g.X0}, g.params);
	Expr T = simplify(g.T), Tt = dt(T), X1 = simplify(g.X1), X0 = simplify(g.X0);
	Compiled cT(T, pv), cTt(Tt, pv), cX1(X1, pv), cX0(X0, pv), cX1t(dt(X1), pv), cX0t(dt(X0), pv);

	int sign = 0;
	for (int i = 0; i <= 2 * (sol.nt - 1); ++i)
	{
		double t = sol.t0 + 0.5 * i * sol.dt();
		double d = cTt(t, 0.0), a = cX1(t, 0.0);
		if (a == 0.0)
			throw Degenerate("X1 vanishes at t = " + std::to_string(t));
		int s = d > 0 ? 1 : d < 0 ? -1 : 0;
		if (s == 0 || (sign != 0 && s != sign))
			throw NonMonotoneT("T is not strictly monotone on the source time range");
		sign = s;
	}

	double xlo = -HUGE_VAL, xhi = HUGE_VAL;
	for (int i = 0; i < sol.nt; ++i)
	{
		double t = sol.t(i);
		double a = cX1(t, 0.0) * sol.x0 + cX0(t, 0.0), b = cX1(t, 0.0) * sol.x1 + cX0(t, 0.0);
		xlo = std::max(xlo, std::min(a, b));
		xhi = std::min(xhi, std::max(a, b));
	}
	if (!(xhi > xlo))
		throw Degenerate("image of the source grid has an empty x range");

	double Ta = cT(sol.t0, 0.0), Tb = cT(sol.t1, 0.0);
	GridSolution out;
	out.t0 = std::min(Ta, Tb);
	out.t1 = std::max(Ta, Tb);
	out.x0 = xlo;
	out.x1 = xhi;
	out.nt = sol.nt;
	out.nx = sol.nx;
	out.u.resize(sol.u.size());
	for (int i = 0; i < out.nt; ++i)
	{
		double tn = out.t(i), t;
		if (i == 0)
			t = sign > 0 ? sol.t0 : sol.t1;
		else if (i == out.nt - 1)
			t = sign > 0 ? sol.t1 : sol.t0;
		else
			t = invert_time_numeric(T, tn, sol.t0, sol.t1, pv);
		double a = cX1(t, 0.0), b = cX0(t, 0.0), tt = cTt(t, 0.0), at = cX1t(t, 0.0), bt = cX0t(t, 0.0);
		for (int j = 0; j < out.nx; ++j)
		{
			double x = std::clamp((out.x(j) - b) / a, sol.x0, sol.x1);
			double u = interpolate(sol, t, x);
			out.at(i, j) = (a * u + at * x + bt) / tt;
		}
	}
	out.validate();
	return out;
}

EquivTransformation parse_transformation(const std::string &text)
{
	EquivTransformation g;
	for (const auto &[k, v] : read_key_values(text))
	{
		if (k.rfind("param.", 0) == 0)
		{
			try
			{
				g.params[k.substr(6)] = std::stod(v.first);
			}
			catch (const std::logic_error &)
			{
				throw SyntaxError("parameter value must be a real number", v.second);
			}
			continue;
		}
		Expr e;
		try
		{
			e = simplify(parse(v.first));
		}
		catch (const SyntaxError &err)
		{
			throw SyntaxError("in value of " + k, v.second + err.offset());
		}
		if (k == "T")
			g.T = e;
		else if (k == "X1")
			g.X1 = e;
		else if (k == "X0")
			g.X0 = e;
		else
			throw SyntaxError("unknown key '" + k + "'", v.second);
	}
	g.validate();
	return g;
}

EquivTransformation load_transformation(const std::string &path) { return parse_transformation(read_file(path)); }

std::string format_transformation(const EquivTransformation &g)
{
	std::ostringstream out;
	out << "T = " << simplify(g.T).str() << "\nX1 = " << simplify(g.X1).str() << "\nX0 = " << simplify(g.X0).str()
	    << "\n";
	out.precision(17);
	for (const auto &[k, v] : g.params)
		out << "param." << k << " = " << v << "\n";
	return out.str();
}

} // namespace bkdv
