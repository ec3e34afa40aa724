#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bkdv/classify.hpp"
#include "bkdv/equivalence.hpp"
#include "bkdv/reduction.hpp"

#include <algorithm>
#include <cmath>

using namespace bkdv;

namespace {

Expr P(const std::string &s) { return parse(s); }
Expr phi(int k = 0) { return Expr::phi(k); }

bool same(const Expr &a, const Expr &b, const ParamValues &pv = {})
{
	return is_zero(simplify(a - b), pv) == ZeroTest::Zero;
}

GaugedEquation burgers(const Expr &a2 = Expr(1))
{
	return GaugedEquation::make(Expr(0), {a2}, Expr(0));
}

CaseParams params(int r, std::vector<Rational> a, Rational b, Rational nu = 1)
{
	CaseParams p = CaseParams::unit(r);
	for (std::size_t j = 0; j < a.size(); ++j)
		p.a[j] = Expr(a[j]);
	p.b = Expr(b);
	p.nu = Expr(nu);
	return p;
}

double falling(double top, int j)
{
	double f = 1;
	for (int i = 0; i < j; ++i)
		f *= top - i;
	return f;
}

} // namespace

TEST_CASE("falling factorial")
{
	CHECK(falling_factorial(Expr(4), 2) == Expr(12));
	CHECK(falling_factorial(Expr(4), 0) == Expr(1));
	CHECK(same(falling_factorial(P("nu+1"), 3), P("(nu+1)*nu*(nu-1)")));
}

TEST_CASE("subalgebra labels")
{
	CHECK(parse_reduction_1d("S(exp(t))") == Reduction1D::SExp);
	CHECK(parse_reduction_1d(" P(1) ") == Reduction1D::P1);
	CHECK(parse_reduction_2d("<D(1), D(t) - S(1/nu)>") == Reduction2D::D1_DtS);
	CHECK(parse_reduction_2d("D(1),P(e^t)") == Reduction2D::D1_PExp);
	CHECK_THROWS_AS(parse_reduction_1d("D(t)"), InvariantViolation);
	for (auto s : {Reduction1D::D1, Reduction1D::S1, Reduction1D::SExp, Reduction1D::P1})
		CHECK(parse_reduction_1d(to_string(s)) == s);
}

TEST_CASE("one-dimensional reductions")
{
	SUBCASE("P(1) on a function-coefficient equation")
	{
		CaseParams p = CaseParams::unit(3);
		p.alpha[2] = P("sin(t)");
		p.alpha[3] = P("exp(t)");
		auto res = reduce_1d(Reduction1D::P1, instantiate_case(CaseId::C6, p).eq);
		CHECK(same(res.reduced, phi(1)));
		CHECK(res.omega.value() == Expr::t());
	}
	SUBCASE("S(1)")
	{
		auto eq = GaugedEquation::make(Expr(0), {P("(1+t^2)*x^2")}, P("cos(t)*x"));
		auto res = reduce_1d(Reduction1D::S1, eq);
		CHECK(same(res.reduced, phi(1) + phi() * phi() - P("cos(w)")));
		CHECK(res.factor == Expr::x());
	}
	SUBCASE("S(e^t)")
	{
		CaseParams p = CaseParams::unit(4);
		p.alpha[2] = P("t");
		p.alpha[3] = P("exp(t)");
		p.alpha[4] = P("2+sin(t)");
		p.beta = P("t^2");
		auto res = reduce_1d(Reduction1D::SExp, instantiate_case(CaseId::C4b, p).eq);
		// sum (-1)^j (j-2)! alpha^j + beta
		Expr rhs = P("w - exp(w) + 2*(2+sin(w)) + w^2");
		CHECK(same(res.reduced, phi(1) + phi() * phi() - rhs));
	}
	SUBCASE("D(1)")
	{
		auto res = reduce_1d(Reduction1D::D1, burgers(P("1+x^2")));
		CHECK(same(res.reduced, phi() * phi(1) - P("1+w^2") * phi(2)));
		CHECK(res.omega.value() == Expr::x());

		CaseParams p = CaseParams::unit(3);
		p.alpha[0] = P("cos(x)");
		p.alpha[2] = P("x");
		p.alpha[3] = P("2+x^2");
		p.beta = P("x^3");
		res = reduce_1d(Reduction1D::D1, instantiate_case(CaseId::C1, p).eq);
		Expr rhs = P("w")*phi(2) + P("2+w^2")*phi(3) + P("cos(w)")*phi() + P("w^3");
		CHECK(same(res.reduced, phi() * phi(1) - rhs));
	}
	SUBCASE("generator must be a symmetry")
	{
		CHECK_THROWS_AS(reduce_1d(Reduction1D::S1, burgers()), NotInvariant);
		CHECK_THROWS_AS(reduce_1d(Reduction1D::D1, burgers(P("1+t^2"))), NotInvariant);
	}
}

TEST_CASE("two-dimensional reductions")
{
	SUBCASE("<D(1), S(1)> with b = 4")
	{
		auto eq = instantiate_case(CaseId::C5a, params(2, {0, 0, 1}, 4)).eq;
		auto res = reduce_2d(Reduction2D::D1_S1, eq);
		CHECK(same(res.reduced, phi() * phi() - Expr(4)));
		REQUIRE(res.roots.size() == 2);
		CHECK(res.roots[0] == doctest::Approx(-2));
		CHECK(res.roots[1] == doctest::Approx(2));
		CHECK(same(res.solutions[1], P("2*x")));
	}
	SUBCASE("<D(1), D(t)-P(1)>")
	{
		auto eq = instantiate_case(CaseId::C2a, params(3, {1, 0, -2, 1}, 1)).eq;
		auto res = reduce_2d(Reduction2D::D1_DtP, eq);
		CHECK(same(res.reduced, phi() * phi() - Expr(1)));
		CHECK(res.roots.size() == 2);

		eq = instantiate_case(CaseId::C2a, params(2, {3, 0, 2}, Rational(-5))).eq;
		res = reduce_2d(Reduction2D::D1_DtP, eq);
		CHECK(same(res.reduced, phi() * phi() - Expr(5) * phi() + Expr(5)));
	}
	SUBCASE("<D(1), D(t)-S(1/nu)> carries the falling factorial")
	{
		for (Rational nu : {Rational(3), Rational(1, 2), Rational(-2, 3)})
		{
			std::vector<Rational> a = {Rational(1, 2), 0, 2, -1, Rational(3, 2)};
			auto eq = instantiate_case(CaseId::C2b, params(4, a, 3, nu)).eq;
			auto res = reduce_2d(Reduction2D::D1_DtS, eq, Expr(nu));
			double n1 = nu.to_double() + 1;
			double lin = a[0].to_double();
			for (int j = 2; j <= 4; ++j)
				lin += falling(n1, j) * a[std::size_t(j)].to_double();
			for (double v : {-1.5, 0.25, 2.0})
			{
				Point pt;
				pt.phi = {v};
				CHECK(eval(res.reduced, pt) == doctest::Approx(n1 * v * v - lin * v - 3).epsilon(1e-12));
			}
		}
	}
	SUBCASE("<D(1), S(e^t)>")
	{
		auto eq = instantiate_case(CaseId::C5b, params(3, {0, 0, 2, -1}, 1)).eq;
		auto res = reduce_2d(Reduction2D::D1_SExp, eq);
		// a2 - a3 + b
		CHECK(same(res.reduced, phi() * phi() - Expr(4)));
	}
	SUBCASE("<D(1), P(1)> and <D(1), P(e^t)>")
	{
		auto eq = instantiate_case(CaseId::C7, params(2, {3, 0, 1}, 0)).eq;
		auto res = reduce_2d(Reduction2D::D1_P1, eq);
		CHECK(same(res.reduced, Expr(3) * phi()));
		REQUIRE(res.roots.size() == 1);
		CHECK(res.roots[0] == 0);

		eq = instantiate_case(CaseId::C7, params(2, {Rational(-1), 0, 1}, 2)).eq;
		res = reduce_2d(Reduction2D::D1_PExp, eq);
		CHECK(same(res.reduced, Expr(2) * phi()));
		CHECK(same(res.solutions.at(0), Expr::x()));
	}
	SUBCASE("no real root and identities")
	{
		auto eq = instantiate_case(CaseId::C5a, params(2, {0, 0, 1}, -1)).eq;
		auto res = reduce_2d(Reduction2D::D1_S1, eq);
		CHECK(res.no_real_root);
		CHECK(res.roots.empty());

		eq = instantiate_case(CaseId::C7, params(2, {0, 0, 1}, 0)).eq;
		res = reduce_2d(Reduction2D::D1_P1, eq);
		CHECK(res.identically);
	}
	SUBCASE("not invariant")
	{
		auto eq = instantiate_case(CaseId::C5a, params(2, {0, 0, 1}, 4)).eq;
		CHECK_THROWS_AS(reduce_2d(Reduction2D::D1_DtP, eq), NotInvariant);
	}
}

TEST_CASE("lifted roots solve the equation")
{
	struct Item
	{
		CaseId id;
		Reduction2D s;
		CaseParams p;
	};
	std::vector<Item> items = {
	    {CaseId::C2a, Reduction2D::D1_DtP, params(3, {1, 0, -2, 3}, 2)},
	    {CaseId::C2a, Reduction2D::D1_DtP, params(5, {1, 0, -2, 3, 1, 1}, 2)},
	    {CaseId::C2b, Reduction2D::D1_DtS, params(3, {1, 0, 2, 1}, 5, Rational(1, 2))},
	    {CaseId::C2b, Reduction2D::D1_DtS, params(4, {1, 0, 2, 1, 1}, 5, Rational(-1, 3))},
	    {CaseId::C5a, Reduction2D::D1_S1, params(3, {0, 0, 1, 2}, 9)},
	    {CaseId::C5a, Reduction2D::D1_S1, params(4, {0, 0, 1, 0, 2}, 9)},
	    {CaseId::C5b, Reduction2D::D1_SExp, params(2, {0, 0, 3}, 1)},
	    {CaseId::C7, Reduction2D::D1_PExp, params(3, {Rational(1, 2), 0, 1, 1}, Rational(1, 2))},
	};
	for (auto &it : items)
	{
		CAPTURE(std::string(to_string(it.s)));
		CAPTURE(it.p.r);
		auto eq = instantiate_case(it.id, it.p).eq;
		auto res = reduce_2d(it.s, eq, it.p.nu);
		REQUIRE(!res.solutions.empty());
		for (const auto &u : res.solutions)
		{
			Expr pde = diff(u, VarKind::T) + u * diff(u, VarKind::X) - eq.B;
			Expr d = u;
			for (int k = 0; k <= it.p.r; ++k, d = diff(d, VarKind::X))
				pde = pde - eq.A[std::size_t(k)] * d;
			CHECK(is_zero(simplify(pde)) == ZeroTest::Zero);
			// Rounding in the r-th difference grows like 1/h^r, so the
			// numeric check is limited to low orders.
			if (it.p.r <= 3)
			{
				auto grid = GridSolution::sample(u, 0, 1, 40, 0.5, 1.5, 40);
				CHECK(verify_solution(eq, grid) < 1e-8);
			}
		}
	}
}

TEST_CASE("affine system")
{
	Equation eq = burgers().to_equation();
	auto sys = affine_system(eq);
	CHECK(sys.gamma == Expr(1));

	eq.B = P("t*x + sin(t)");
	eq.A[0] = P("t");
	sys = affine_system(eq);
	CHECK(same(sys.beta1, P("t")));
	CHECK(same(sys.beta0, P("sin(t)")));

	eq.B = P("x^2");
	CHECK_THROWS_AS(affine_system(eq), NonAffineEquation);
}

TEST_CASE("solve_affine")
{
	auto sys = affine_system(burgers().to_equation());
	SUBCASE("Burgers against 1/(t + c0)")
	{
		const double c0 = 2, c1 = -0.5;
		auto sol = solve_affine(sys, 1 / c0, c1 / c0, 0, 1, 128);
		REQUIRE(sol.t.size() == 129);
		double worst = 0;
		for (std::size_t i = 0; i < sol.t.size(); ++i)
		{
			worst = std::max(worst, std::fabs(sol.phi1[i] - 1 / (sol.t[i] + c0)));
			worst = std::max(worst, std::fabs(sol.phi0[i] - c1 / (sol.t[i] + c0)));
		}
		CHECK(worst < 1e-9);
		CHECK(verify_solution(burgers(), sol.grid) < 1e-8);
	}
	SUBCASE("constant solution")
	{
		auto sol = solve_affine(sys, 0, 3, 0, 1, 64);
		CHECK(std::all_of(sol.grid.u.begin(), sol.grid.u.end(), [](double v) { return v == 3; }));
	}
	SUBCASE("fixed point of phi_t + phi^2 = phi")
	{
		AffineSystem s;
		s.alpha0 = Expr(1);
		auto sol = solve_affine(s, 1, 0, 0, 2, 64);
		CHECK(sol.phi1.back() == doctest::Approx(1).epsilon(1e-14));
	}
	SUBCASE("escape to infinity")
	{
		// phi1 = 1/(t - 1)
		try
		{
			solve_affine(sys, -1, 0, 0, 2, 400);
			FAIL("no blow-up reported");
		}
		catch (const Blowup &e)
		{
			CHECK(e.time() == doctest::Approx(1).epsilon(0.01));
		}
	}
	CHECK_THROWS_AS(solve_affine(sys, 1, 0, 0, 1, 32), InvariantViolation);
}

TEST_CASE("verify_solution")
{
	auto eq = burgers();
	auto exact = GridSolution::sample(P("(x+1)/(t+1)"), 0, 1, 128, -1, 1, 128);
	CHECK(verify_solution(eq, exact) < 1e-8);
	auto constant = GridSolution::sample(Expr(Rational(7, 3)), 0, 1, 32, -1, 1, 32);
	CHECK(verify_solution(eq, constant) < 1e-12);
	auto wrong = GridSolution::sample(P("x^2"), 0, 1, 32, -1, 1, 32);
	CHECK(verify_solution(eq, wrong) > 0.1);

	// Travelling front of u_t + u u_x = u_xx.
	Expr xi = P("x - t/2");
	Expr th = (exp(xi) - exp(-xi)) / (exp(xi) + exp(-xi));
	auto kink = GridSolution::sample(simplify(Expr(Rational(1, 2)) - Expr(2) * th), 0, 1, 200, -3, 3, 300);
	CHECK(verify_solution(eq, kink) < 1e-6);

	auto tiny = GridSolution::sample(Expr(1), 0, 1, 6, -1, 1, 40);
	CHECK_THROWS_AS(verify_solution(eq, tiny), GridTooCoarse);
}

TEST_CASE("mapped affine solution")
{
	auto sol = solve_affine(affine_system(burgers().to_equation()), 0.5, 0.25, 0, 1, 128, -1, 1, 128);
	EquivTransformation g;
	g.X0 = P("3/2*t");
	auto image = apply_gauged(g, burgers());
	CHECK(verify_solution(image, map_solution(g, sol.grid)) < 1e-6);
}
