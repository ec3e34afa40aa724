#pragma once

#include "bkdv/expr.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bkdv {

/// u_t + C u u_x = sum_{k=0}^r A^k u_k + B.
struct Equation
{
	int r = 2;
	Expr C = Expr(1);
	std::vector<Expr> A; // A[0] .. A[r]
	Expr B;
	ParamValues params;

	/// Throws InvariantViolation unless r >= 2 and C*A^r is nonzero at
	/// every probe point where it is defined.
	void validate() const;
};

/// Equation with C = 1 and A^1 = 0; A[1] is kept as the zero expression so
/// that A is indexed by derivative order.
struct GaugedEquation
{
	int r = 2;
	std::vector<Expr> A; // A[0] .. A[r], A[1] == 0
	Expr B;
	ParamValues params;

	const Expr &A0() const { return A[0]; }

	/// Build from A^0, {A^2..A^r} and B; simplifies and validates.
	static GaugedEquation make(const Expr &A0, const std::vector<Expr> &A2r, const Expr &B,
	                           ParamValues params = {});

	void validate() const;
	Equation to_equation() const;
};

/// Gauged iff C - 1 and A^1 simplify to zero.
bool is_gauged(const Equation &eq);
/// Throws NotGauged.
GaugedEquation as_gauged(const Equation &eq);

Equation parse_equation(const std::string &text);
Equation load_equation(const std::string &path);
/// Returns the gauged form when the file describes a gauged equation.
std::variant<Equation, GaugedEquation> load(const std::string &path);
std::string format_equation(const Equation &eq);
void save(const Equation &eq, const std::string &path);
void save(const GaugedEquation &eq, const std::string &path);

/// Samples of u on a uniform (t, x) grid, row-major by time.
struct GridSolution
{
	double t0 = 0, t1 = 1, x0 = 0, x1 = 1;
	int nt = 2, nx = 2;
	std::vector<double> u;

	double dt() const { return (t1 - t0) / (nt - 1); }
	double dx() const { return (x1 - x0) / (nx - 1); }
	double t(int i) const { return t0 + i * dt(); }
	double x(int j) const { return x0 + j * dx(); }
	double &at(int i, int j) { return u[std::size_t(i) * std::size_t(nx) + std::size_t(j)]; }
	double at(int i, int j) const { return u[std::size_t(i) * std::size_t(nx) + std::size_t(j)]; }

	void validate() const;
	static GridSolution sample(const Expr &u, double t0, double t1, int nt, double x0, double x1, int nx,
	                           const ParamValues &params = {});
};

GridSolution load_grid(const std::string &path);
void save_grid(const GridSolution &g, const std::string &path);

/// key = value reader shared by the equation and transformation files.
/// Keys map to (value, byte offset of the value).
std::vector<std::pair<std::string, std::pair<std::string, std::size_t>>> read_key_values(const std::string &text);
std::string read_file(const std::string &path);

} // namespace bkdv
