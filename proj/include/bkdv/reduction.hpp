#pragma once

#include "bkdv/model.hpp"
#include "bkdv/symmetry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bkdv {

/// One-dimensional subalgebras up to equivalence.
enum class Reduction1D { D1, S1, SExp, P1 };
/// Two-dimensional subalgebras giving algebraic reductions.
///   D1_DtP:   <D(1), D(t) - P(1)>
///   D1_DtS:   <D(1), D(t) - S(1/nu)>
///   D1_S1:    <D(1), S(1)>
///   D1_SExp:  <D(1), S(e^t)>
///   D1_P1:    <D(1), P(1)>
///   D1_PExp:  <D(1), P(e^t)>
enum class Reduction2D { D1_DtP, D1_DtS, D1_S1, D1_SExp, D1_P1, D1_PExp };

const char *to_string(Reduction1D s);
const char *to_string(Reduction2D s);
/// Accepts the generator text ("S(e^t)", "D(1),S(1)", "<D(1), D(t)-S(1/nu)>")
/// with whitespace and angle brackets ignored. Throws InvariantViolation.
Reduction1D parse_reduction_1d(const std::string &label);
Reduction2D parse_reduction_2d(const std::string &label);

/// Generators of the subalgebra; nu is used by D1_DtS only.
std::vector<VectorField> generators(Reduction1D s);
std::vector<VectorField> generators(Reduction2D s, const Expr &nu = Expr(1));

/// (nu + 1)(nu)...(nu - j + 2), j factors.
Expr falling_factorial(const Expr &nu_plus_1, int j);

struct ReductionResult
{
	std::string label;
	/// u in terms of x and phi (the symbol phi).
	Expr ansatz;
	/// The invariant variable w as a function of (t, x); empty for algebraic
	/// reductions.
	std::optional<Expr> omega;
	/// Reduced equation "= 0", in w, phi and its w-derivatives; for algebraic
	/// reductions a polynomial in phi.
	Expr reduced;
	/// PDE residual of the ansatz = factor * reduced.
	Expr factor;

	// Algebraic reductions only.
	/// Real roots of the relation in phi.
	std::vector<double> roots;
	/// The relation holds for every phi.
	bool identically = false;
	/// Nonzero relation without real roots.
	bool no_real_root = false;
	/// Ansatz with phi replaced by each root.
	std::vector<Expr> solutions;
};

/// Throws NotInvariant if the generator is not a symmetry of eq or the
/// substitution leaves the reduction variables.
ReductionResult reduce_1d(Reduction1D s, const GaugedEquation &eq);
ReductionResult reduce_2d(Reduction2D s, const GaugedEquation &eq, const Expr &nu = Expr(1));

/// Equation with A0 = alpha0(t), A1 = alpha1(t), B = beta1(t) x + beta0(t),
/// C = gamma(t). The ansatz u = phi1(t) x + phi0(t) gives
///   phi1_t + gamma phi1^2      = alpha0 phi1 + beta1,
///   phi0_t + gamma phi1 phi0   = alpha0 phi0 + alpha1 phi1 + beta0.
struct AffineSystem
{
	Expr gamma = Expr(1), alpha0 = Expr(0), alpha1 = Expr(0), beta1 = Expr(0), beta0 = Expr(0);
	ParamValues params;
};

/// Throws NonAffineEquation unless A0_x = A1_x = B_xx = C_x = 0.
AffineSystem affine_system(const Equation &eq);

struct AffineSolution
{
	std::vector<double> t, phi1, phi0;
	/// u = phi1 x + phi0 on the time nodes.
	GridSolution grid;
};

/// Fixed-step RK4 from t0 to t1 with `steps` >= 64 steps. Throws Blowup when
/// |phi1| or |phi0| exceeds 1e6 and DomainError if a coefficient is undefined.
AffineSolution solve_affine(const AffineSystem &sys, double phi1_0, double phi0_0, double t0, double t1,
                            int steps, double x0 = -1, double x1 = 1, int nx = 129);

/// Largest |u_t + C u u_x - sum A^k u_k - B| over the interior nodes, with
/// eighth-order central differences in t and x. Nodes within the stencil
/// half-width of an edge are skipped, as are nodes where a coefficient is
/// undefined. Throws GridTooCoarse if no interior node remains.
double verify_solution(const Equation &eq, const GridSolution &sol);
double verify_solution(const GaugedEquation &eq, const GridSolution &sol);

} // namespace bkdv
