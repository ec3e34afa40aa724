#include "bkdv/reduction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace bkdv {

namespace {

Expr X() { return Expr::x(); }
Expr T() { return Expr::t(); }
Expr Phi() { return Expr::phi(); }
Expr lnx() { return ln(abs(X())); }

std::string normalize_label(std::string s)
{
	s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '<' || c == '>'; }), s.end());
	for (std::size_t p; (p = s.find("exp(t)")) != std::string::npos;)
		s.replace(p, 6, "e^t");
	return s;
}

enum class Omega { T, X, None };

struct Ansatz
{
	Expr u;
	Omega omega;
	Expr factor;
};

void require_invariant(const std::vector<VectorField> &gens, const GaugedEquation &eq)
{
	for (const auto &q : gens)
		if (is_symmetry(q, eq) == Verdict::No)
			throw NotInvariant(q.str() + " is not a symmetry of the equation");
}

/// Substitute the ansatz and divide out the factor. For w = x the whole
/// computation runs in w, so that phi picks up derivatives from d/dw.
ReductionResult substitute(const std::string &label, const Ansatz &a, const GaugedEquation &eq)
{
	Bindings to_w;
	if (a.omega == Omega::T)
		to_w["t"] = Expr::w();
	else if (a.omega == Omega::X)
		to_w["x"] = Expr::w();
	const VarKind dvar = a.omega == Omega::X ? VarKind::W : VarKind::X;

	Expr u = subst(a.u, to_w);
	Expr ut = a.omega == Omega::T ? diff(u, VarKind::W) : Expr(0);
	Expr ux = diff(u, dvar);
	std::vector<Expr> terms = {ut, u * ux, -subst(eq.B, to_w)};
	Expr d = u;
	for (int k = 0; k <= eq.r; ++k)
	{
		if (k > 0)
			d = diff(d, dvar);
		if (k != 1)
			terms.push_back(-(subst(eq.A[std::size_t(k)], to_w) * d));
	}
	Expr residual = simplify(Expr::add(terms));

	ReductionResult out;
	out.label = label;
	out.ansatz = a.u;
	out.factor = a.factor;
	if (a.omega == Omega::T)
		out.omega = T();
	else if (a.omega == Omega::X)
		out.omega = X();
	out.reduced = simplify(residual / subst(a.factor, to_w));
	bool leftover = out.reduced.depends_on(VarKind::T) || out.reduced.depends_on(VarKind::X) ||
	                (a.omega == Omega::None && out.reduced.depends_on(VarKind::W));
	if (leftover)
		throw NotInvariant("the ansatz for " + label + " does not reduce the equation: " + out.reduced.pretty());
	return out;
}

/// Roots of a relation of degree at most two in phi.
void solve_relation(ReductionResult &res, const ParamValues &pv)
{
	auto at = [&](int v) { return subst(res.reduced, {{"phi", Expr(v)}}); };
	Expr r0 = at(0), r1 = at(1), rm = at(-1);
	Expr c2 = simplify((r1 + rm) / Expr(2) - r0);
	Expr c1 = simplify((r1 - rm) / Expr(2));
	Expr c0 = r0;
	if (is_zero(simplify(at(2) - (Expr(4) * c2 + Expr(2) * c1 + c0)), pv) != ZeroTest::Zero)
		throw InvariantViolation("relation is not quadratic in phi: " + res.reduced.pretty());

	std::vector<Expr> roots;
	if (is_zero(c2, pv) == ZeroTest::Zero)
	{
		if (is_zero(c1, pv) == ZeroTest::Zero)
		{
			res.identically = is_zero(c0, pv) == ZeroTest::Zero;
			res.no_real_root = !res.identically;
			return;
		}
		roots.push_back(simplify(-c0 / c1));
	}
	else
	{
		Expr disc = simplify(c1 * c1 - Expr(4) * c2 * c0);
		double dv = eval(disc, 0, 0, pv);
		if (is_zero(disc, pv) == ZeroTest::Zero)
			roots.push_back(simplify(-c1 / (Expr(2) * c2)));
		else if (dv < 0)
		{
			res.no_real_root = true;
			return;
		}
		else
			for (int s : {-1, 1})
				roots.push_back(simplify((-c1 + Expr(s) * sqrt(disc)) / (Expr(2) * c2)));
	}
	for (const auto &root : roots)
	{
		res.roots.push_back(eval(root, 0, 0, pv));
		res.solutions.push_back(subst(res.ansatz, {{"phi", root}}));
	}
}

/// Fornberg weights of the k-th derivative at 0 on the nodes -m..m.
std::vector<double> central_weights(int k, int m)
{
	const int n = 2 * m + 1;
	std::vector<std::vector<double>> c(std::size_t(n), std::vector<double>(std::size_t(k + 1), 0.0));
	auto z = [&](int i) { return double(i - m); };
	double c1 = 1, c4 = z(0);
	c[0][0] = 1;
	for (int i = 1; i < n; ++i)
	{
		int mn = std::min(i, k);
		double c2 = 1, c5 = c4;
		c4 = z(i);
		for (int j = 0; j < i; ++j)
		{
			double c3 = z(i) - z(j);
			c2 *= c3;
			if (j == i - 1)
			{
				for (int s = mn; s >= 1; --s)
					c[std::size_t(i)][std::size_t(s)] =
					    c1 * (s * c[std::size_t(i - 1)][std::size_t(s - 1)] - c5 * c[std::size_t(i - 1)][std::size_t(s)]) / c2;
				c[std::size_t(i)][0] = -c1 * c5 * c[std::size_t(i - 1)][0] / c2;
			}
			for (int s = mn; s >= 1; --s)
				c[std::size_t(j)][std::size_t(s)] =
				    (c4 * c[std::size_t(j)][std::size_t(s)] - s * c[std::size_t(j)][std::size_t(s - 1)]) / c3;
			c[std::size_t(j)][0] = c4 * c[std::size_t(j)][0] / c3;
		}
		c1 = c2;
	}
	std::vector<double> w(static_cast<std::size_t>(n));
	for (int i = 0; i < n; ++i)
		w[std::size_t(i)] = c[std::size_t(i)][std::size_t(k)];
	return w;
}

/// Half-width of the eighth-order central stencil for the k-th derivative.
int half_width(int k) { return (k + 1) / 2 + 3; }

} // namespace

const char *to_string(Reduction1D s)
{
	switch (s)
	{
	case Reduction1D::D1: return "D(1)";
	case Reduction1D::S1: return "S(1)";
	case Reduction1D::SExp: return "S(e^t)";
	case Reduction1D::P1: return "P(1)";
	}
	return "?";
}

const char *to_string(Reduction2D s)
{
	switch (s)
	{
	case Reduction2D::D1_DtP: return "<D(1), D(t)-P(1)>";
	case Reduction2D::D1_DtS: return "<D(1), D(t)-S(1/nu)>";
	case Reduction2D::D1_S1: return "<D(1), S(1)>";
	case Reduction2D::D1_SExp: return "<D(1), S(e^t)>";
	case Reduction2D::D1_P1: return "<D(1), P(1)>";
	case Reduction2D::D1_PExp: return "<D(1), P(e^t)>";
	}
	return "?";
}

Reduction1D parse_reduction_1d(const std::string &label)
{
	const std::string s = normalize_label(label);
	for (auto r : {Reduction1D::D1, Reduction1D::S1, Reduction1D::SExp, Reduction1D::P1})
		if (s == to_string(r))
			return r;
	throw InvariantViolation("unknown one-dimensional subalgebra '" + label + "'");
}

Reduction2D parse_reduction_2d(const std::string &label)
{
	const std::string s = normalize_label(label);
	for (auto r : {Reduction2D::D1_DtP, Reduction2D::D1_DtS, Reduction2D::D1_S1, Reduction2D::D1_SExp,
	               Reduction2D::D1_P1, Reduction2D::D1_PExp})
		if (s == normalize_label(to_string(r)))
			return r;
	throw InvariantViolation("unknown two-dimensional subalgebra '" + label + "'");
}

std::vector<VectorField> generators(Reduction1D s)
{
	using V = VectorField;
	switch (s)
	{
	case Reduction1D::D1: return {V::D(1)};
	case Reduction1D::S1: return {V::S(1)};
	case Reduction1D::SExp: return {V::S(exp(T()))};
	case Reduction1D::P1: return {V::P(1)};
	}
	return {};
}

std::vector<VectorField> generators(Reduction2D s, const Expr &nu)
{
	using V = VectorField;
	V second;
	switch (s)
	{
	case Reduction2D::D1_DtP: second = V::D(T()) - V::P(1); break;
	case Reduction2D::D1_DtS: second = V::D(T()) - V::S(simplify(Expr(1) / nu)); break;
	case Reduction2D::D1_S1: second = V::S(1); break;
	case Reduction2D::D1_SExp: second = V::S(exp(T())); break;
	case Reduction2D::D1_P1: second = V::P(1); break;
	case Reduction2D::D1_PExp: second = V::P(exp(T())); break;
	}
	return {V::D(1), second.simplified()};
}

Expr falling_factorial(const Expr &nu_plus_1, int j)
{
	std::vector<Expr> fs;
	for (int i = 0; i < j; ++i)
		fs.push_back(nu_plus_1 - Expr(i));
	return simplify(Expr::mul(std::move(fs)));
}

ReductionResult reduce_1d(Reduction1D s, const GaugedEquation &eq)
{
	require_invariant(generators(s), eq);
	Ansatz a;
	switch (s)
	{
	case Reduction1D::D1: a = {Phi(), Omega::X, Expr(1)}; break;
	case Reduction1D::S1: a = {Phi() * X(), Omega::T, X()}; break;
	case Reduction1D::SExp: a = {Phi() * X() + X() * lnx(), Omega::T, X()}; break;
	case Reduction1D::P1: a = {Phi(), Omega::T, Expr(1)}; break;
	}
	a.u = simplify(a.u);
	return substitute(to_string(s), a, eq);
}

ReductionResult reduce_2d(Reduction2D s, const GaugedEquation &eq, const Expr &nu)
{
	const Expr n = simplify(nu);
	if (s == Reduction2D::D1_DtS && (!n.is_const() || n.is_zero_const()))
		throw InvariantViolation("nu must be a nonzero rational constant");
	require_invariant(generators(s, n), eq);
	Ansatz a;
	switch (s)
	{
	case Reduction2D::D1_DtP: a = {Phi() * exp(X()), Omega::None, exp(Expr(2) * X())}; break;
	case Reduction2D::D1_DtS:
		a = {Phi() * X() * pow(abs(X()), n.value()), Omega::None, X() * pow(abs(X()), Rational(2) * n.value())};
		break;
	case Reduction2D::D1_S1: a = {Phi() * X(), Omega::None, X()}; break;
	case Reduction2D::D1_SExp: a = {Phi() * X() + X() * lnx(), Omega::None, X()}; break;
	// Sign chosen so that the relation reads a0 phi + b.
	case Reduction2D::D1_P1: a = {Phi(), Omega::None, Expr(-1)}; break;
	case Reduction2D::D1_PExp: a = {Phi() + X(), Omega::None, Expr(1)}; break;
	}
	a.u = simplify(a.u);
	a.factor = simplify(a.factor);
	ReductionResult out = substitute(to_string(s), a, eq);
	solve_relation(out, eq.params);
	return out;
}

AffineSystem affine_system(const Equation &eq)
{
	const ParamValues &pv = eq.params;
	auto flat = [&](const Expr &e, int order, const char *what) {
		Expr d = e;
		for (int i = 0; i < order; ++i)
			d = diff(d, VarKind::X);
		if (is_zero(d, pv) != ZeroTest::Zero)
			throw NonAffineEquation(std::string(what) + " is not of the required form in x");
	};
	flat(eq.C, 1, "C");
	flat(eq.A[0], 1, "A0");
	flat(eq.A[1], 1, "A1");
	flat(eq.B, 2, "B");
	AffineSystem sys;
	sys.params = pv;
	sys.gamma = eq.C;
	sys.alpha0 = eq.A[0];
	sys.alpha1 = eq.A[1];
	sys.beta1 = diff(eq.B, VarKind::X);
	sys.beta0 = simplify(eq.B - X() * sys.beta1);
	return sys;
}

AffineSolution solve_affine(const AffineSystem &sys, double phi1_0, double phi0_0, double t0, double t1,
                            int steps, double x0, double x1, int nx)
{
	if (steps < 64)
		throw InvariantViolation("solve_affine needs at least 64 steps");
	if (nx < 2 || !(x1 > x0) || !(t1 != t0))
		throw InvariantViolation("empty solution grid");
	const Compiled gamma(sys.gamma, sys.params), a0(sys.alpha0, sys.params), a1(sys.alpha1, sys.params),
	    b1(sys.beta1, sys.params), b0(sys.beta0, sys.params);
	using State = std::array<double, 2>;
	auto rhs = [&](double t, const State &p) {
		double g = gamma(t, 0), al = a0(t, 0);
		return State{al * p[0] + b1(t, 0) - g * p[0] * p[0], al * p[1] + a1(t, 0) * p[0] + b0(t, 0) - g * p[0] * p[1]};
	};
	auto axpy = [](const State &p, double h, const State &k) { return State{p[0] + h * k[0], p[1] + h * k[1]}; };

	AffineSolution out;
	const double h = (t1 - t0) / steps;
	State p{phi1_0, phi0_0};
	for (int s = 0;; ++s)
	{
		double t = t0 + s * h;
		if (!(std::fabs(p[0]) <= 1e6 && std::fabs(p[1]) <= 1e6))
			throw Blowup(t);
		out.t.push_back(t);
		out.phi1.push_back(p[0]);
		out.phi0.push_back(p[1]);
		if (s == steps)
			break;
		State k1 = rhs(t, p);
		State k2 = rhs(t + h / 2, axpy(p, h / 2, k1));
		State k3 = rhs(t + h / 2, axpy(p, h / 2, k2));
		State k4 = rhs(t + h, axpy(p, h, k3));
		for (int i = 0; i < 2; ++i)
			p[std::size_t(i)] += h / 6 * (k1[std::size_t(i)] + 2 * k2[std::size_t(i)] + 2 * k3[std::size_t(i)] + k4[std::size_t(i)]);
	}

	GridSolution &g = out.grid;
	g.t0 = t0;
	g.t1 = t1;
	g.nt = steps + 1;
	g.x0 = x0;
	g.x1 = x1;
	g.nx = nx;
	g.u.resize(std::size_t(g.nt) * std::size_t(nx));
	for (int i = 0; i < g.nt; ++i)
		for (int j = 0; j < nx; ++j)
			g.at(i, j) = out.phi1[std::size_t(i)] * g.x(j) + out.phi0[std::size_t(i)];
	return out;
}

double verify_solution(const Equation &eq, const GridSolution &sol)
{
	sol.validate();
	const int r = eq.r;
	const int mt = half_width(1), mx = half_width(r);
	if (sol.nt < 2 * mt + 1 || sol.nx < 2 * mx + 1)
		throw GridTooCoarse("grid " + std::to_string(sol.nt) + "x" + std::to_string(sol.nx) +
		                    " is too small for the derivative stencils");

	std::vector<std::vector<double>> wx(std::size_t(r + 1));
	for (int k = 1; k <= r; ++k)
		wx[std::size_t(k)] = central_weights(k, half_width(k));
	const std::vector<double> wt = central_weights(1, mt);
	const Compiled C(eq.C, eq.params), B(eq.B, eq.params);
	std::vector<Compiled> A;
	for (const auto &a : eq.A)
		A.emplace_back(a, eq.params);

	const double dt = sol.dt(), dx = sol.dx();
	double worst = 0;
	std::size_t checked = 0;
	for (int i = mt; i < sol.nt - mt; ++i)
		for (int j = mx; j < sol.nx - mx; ++j)
		{
			const double t = sol.t(i), x = sol.x(j);
			double ut = 0;
			for (int s = -mt; s <= mt; ++s)
				ut += wt[std::size_t(s + mt)] * sol.at(i + s, j);
			ut /= dt;
			const double u = sol.at(i, j);
			double res = ut - B.try_eval(t, x) - A[0].try_eval(t, x) * u;
			double ux = 0;
			for (int k = 1; k <= r; ++k)
			{
				const int m = half_width(k);
				double d = 0;
				for (int s = -m; s <= m; ++s)
					d += wx[std::size_t(k)][std::size_t(s + m)] * sol.at(i, j + s);
				d /= std::pow(dx, k);
				if (k == 1)
					ux = d;
				if (k < int(A.size()))
					res -= A[std::size_t(k)].try_eval(t, x) * d;
			}
			res += C.try_eval(t, x) * u * ux;
			if (std::isfinite(res))
			{
				worst = std::max(worst, std::fabs(res));
				++checked;
			}
		}
	if (checked == 0)
		throw DomainError("the coefficients are undefined at every interior node");
	return worst;
}

double verify_solution(const GaugedEquation &eq, const GridSolution &sol)
{
	return verify_solution(eq.to_equation(), sol);
}

} // namespace bkdv
