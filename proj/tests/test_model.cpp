#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bkdv/model.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace bkdv;

namespace {

std::string tmp_path(const std::string &name)
{
	return (std::filesystem::temp_directory_path() / ("bkdv_model_" + name)).string();
}

void write(const std::string &path, const std::string &text)
{
	std::ofstream(path) << text;
}

template <class E, class F> std::string error_kind(F &&f)
{
	try
	{
		f();
	}
	catch (const E &e)
	{
		return e.kind();
	}
	return "none";
}

} // namespace

TEST_CASE("burgers file loads as gauged")
{
	auto p = tmp_path("burgers.txt");
	write(p, "# Burgers\nr = 2\nC = 1\nA1 = 0\nA0 = 0\nA2 = 1\nB = 0\n");
	auto v = load(p);
	REQUIRE(std::holds_alternative<GaugedEquation>(v));
	const auto &g = std::get<GaugedEquation>(v);
	CHECK(g.r == 2);
	CHECK(g.A[2] == Expr(1));
	CHECK(g.A[0] == Expr(0));
	CHECK(g.B == Expr(0));
}

TEST_CASE("vanishing leading coefficient is rejected")
{
	auto p = tmp_path("bad.txt");
	write(p, "r = 2\nA2 = 0\n");
	CHECK(error_kind<Error>([&] { load(p); }) == "InvariantViolation");
	CHECK(error_kind<Error>([] { parse_equation("r = 2\nA2 = x\n"); }) == "none");
	CHECK(error_kind<Error>([] { parse_equation("r = 2\nA2 = 1\nC = t - t\n"); }) == "InvariantViolation");
}

TEST_CASE("ungauged file with parameters")
{
	auto eq = parse_equation("r = 3\nC = \"exp(x)\"\nA3 = \"a3\"\nA2 = 0\nA1 = 0\nA0 = 0\nB = 0\nparam.a3 = 1\n");
	CHECK(eq.r == 3);
	CHECK(eq.params.at("a3") == 1.0);
	CHECK_FALSE(is_gauged(eq));
	CHECK(eq.C == simplify(parse("exp(x)")));
}

TEST_CASE("missing keys and syntax errors")
{
	CHECK(error_kind<Error>([] { parse_equation("A2 = 1\n"); }) == "MissingKey");
	CHECK(error_kind<Error>([] { parse_equation("r = 3\nA2 = 1\n"); }) == "MissingKey");
	CHECK(error_kind<Error>([] { parse_equation("r = 2\nA2 1\n"); }) == "SyntaxError");
	CHECK(error_kind<Error>([] { parse_equation("r = 2\nA2 = 2x\n"); }) == "SyntaxError");
	CHECK(error_kind<Error>([] { parse_equation("r = 2\nA2 = 1\nQ = 1\n"); }) == "SyntaxError");
	CHECK(error_kind<Error>([] { parse_equation("r = 2\nA2 = 1\nA5 = 1\n"); }) == "InvariantViolation");
	try
	{
		parse_equation("r = 2\nA2 = x^-3\n");
		FAIL("expected SyntaxError");
	}
	catch (const SyntaxError &e)
	{
		// "r = 2\n" is 6 bytes, the value starts at byte 11, the sign at 13
		CHECK(e.offset() == 13);
	}
}

TEST_CASE("defaults for absent keys")
{
	auto eq = parse_equation("r = 4\nA4 = 1\n");
	CHECK(eq.C == Expr(1));
	for (int k = 0; k < 4; ++k)
		CHECK(eq.A[std::size_t(k)].is_zero_const());
	CHECK(eq.B.is_zero_const());
	CHECK(is_gauged(eq));
}

TEST_CASE("is_gauged")
{
	CHECK(is_gauged(parse_equation("r = 2\nA2 = 1\n")));
	CHECK_FALSE(is_gauged(parse_equation("r = 2\nA2 = 1\nC = 2\n")));
	CHECK_FALSE(is_gauged(parse_equation("r = 2\nA2 = 1\nA1 = x\n")));
	CHECK(is_gauged(parse_equation("r = 2\nA2 = 1\nC = exp(x)*exp(-x)\nA1 = x - x\n")));
	CHECK(error_kind<Error>([] { as_gauged(parse_equation("r = 2\nA2 = 1\nC = 2\n")); }) == "NotGauged");
}

TEST_CASE("save and load round trip")
{
	auto eq = parse_equation("r = 3\nC = exp(x)\nA3 = a3*x^2 + 1\nA1 = sin(t)\nA0 = ln(abs(x))\nB = t*x/(1+x^2)\n"
	                         "param.a3 = 2.5\n");
	auto p = tmp_path("rt.txt");
	save(eq, p);
	auto back = load_equation(p);
	CHECK(back.r == eq.r);
	CHECK(back.C == eq.C);
	for (int k = 0; k <= eq.r; ++k)
		CHECK(back.A[std::size_t(k)] == eq.A[std::size_t(k)]);
	CHECK(back.B == eq.B);
	CHECK(back.params == eq.params);

	auto g = GaugedEquation::make(parse("x"), {parse("exp(x)")}, parse("t"));
	save(g, p);
	auto v = load(p);
	REQUIRE(std::holds_alternative<GaugedEquation>(v));
	CHECK(std::get<GaugedEquation>(v).A[2] == g.A[2]);
}

TEST_CASE("gauged equation construction")
{
	auto g = GaugedEquation::make(Expr(0), {Expr(0), Expr(1)}, Expr(0));
	CHECK(g.r == 3);
	CHECK(g.A[1].is_zero_const());
	CHECK(error_kind<Error>([] { GaugedEquation::make(Expr(0), {Expr(0)}, Expr(0)); }) == "InvariantViolation");
	auto e = g.to_equation();
	CHECK(is_gauged(e));
}

TEST_CASE("grid solution io")
{
	auto g = GridSolution::sample(parse("(x+1)/(t+1)"), 0, 1, 5, -1, 1, 7);
	CHECK(g.u.size() == 35);
	CHECK(g.at(4, 6) == doctest::Approx(1.0));
	CHECK(g.at(0, 0) == doctest::Approx(0.0));
	auto p = tmp_path("sol.grid");
	save_grid(g, p);
	auto h = load_grid(p);
	CHECK(h.nt == 5);
	CHECK(h.nx == 7);
	CHECK(h.u == g.u);

	write(p, "0 1 3 0 1 3\n1 2 3\n4 5\n");
	CHECK(error_kind<Error>([&] { load_grid(p); }) == "SyntaxError");
	write(p, "0 1 2 0 1 2\n1 2 nan 4\n");
	CHECK(error_kind<Error>([&] { load_grid(p); }) != "none");
	write(p, "1 0 2 0 1 2\n1 2 3 4\n");
	CHECK(error_kind<Error>([&] { load_grid(p); }) == "InvariantViolation");
}
