#pragma once

#include "bkdv/model.hpp"
#include "bkdv/symmetry.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bkdv {

/// t~ = T(t), x~ = X1(t) x + X0(t),
/// u~ = (X1 u + X1_t x + X0_t) / T_t.
struct EquivTransformation
{
	Expr T = Expr::t(), X1 = Expr(1), X0 = Expr(0);
	ParamValues params;

	static EquivTransformation identity() { return {}; }
	/// Throws Degenerate if T_t * X1 vanishes at a probe point, and
	/// InvariantViolation if a component depends on x.
	void validate() const;
	EquivTransformation simplified() const;
	bool same(const EquivTransformation &o) const;
};

/// Record of the A1 gauge of a C = 1 equation:
/// t~ = T, x~ = X1 x + X0, u~ = X1/T_t u + U0(t, x).
struct C1Transformation
{
	Expr T = Expr::t(), X1 = Expr(1), X0 = Expr(0), U0 = Expr(0);
};

/// Record of the C gauge: t~ = t, x~ = X(t, x), u~ = u, with the inverse
/// x = Xinv(t, x~) written in terms of x.
struct CGaugeTransformation
{
	Expr X = Expr::x(), Xinv = Expr::x();
};

/// Inverse of a time map from the closed catalog (affine, Moebius,
/// exponential, power, tangent), as an expression in t standing for t~.
/// Returns nullopt outside the catalog.
std::optional<Expr> invert_time(const Expr &T, const ParamValues &params = {});
/// Same, throwing InverseUnavailable.
Expr require_time_inverse(const Expr &T, const ParamValues &params = {});
/// Solve T(t) = s for t in [lo, hi] by bisection. Throws NonMonotoneT if
/// T(lo) - s and T(hi) - s have the same sign.
double invert_time_numeric(const Expr &T, double s, double lo, double hi, const ParamValues &params = {});

/// Transformed coefficients A~ (0..r) and B~ still written in the old
/// variables (t, x), i.e. evaluated at the image point of (t, x).
struct Coefficients
{
	std::vector<Expr> A;
	Expr B;
};
Coefficients transformed_coefficients(const EquivTransformation &g, const GaugedEquation &eq);

/// Image equation in the new variables. Throws InverseUnavailable if T is
/// outside the inversion catalog.
GaugedEquation apply_gauged(const EquivTransformation &g, const GaugedEquation &eq);

/// g2 after g1.
EquivTransformation compose(const EquivTransformation &g2, const EquivTransformation &g1);
EquivTransformation invert(const EquivTransformation &g);

/// Pushforward of Q, composed from the elementary actions of S(X1), P(X0)
/// and D(T) in that order.
VectorField pushforward(const EquivTransformation &g, const VectorField &q);
VectorField pushforward_scaling(const Expr &X1, const VectorField &q);
VectorField pushforward_shift(const Expr &X0, const VectorField &q);
VectorField pushforward_time(const Expr &T, const VectorField &q, const ParamValues &params = {});

/// Maps an equation to C = 1. Throws AnalyticIntegrationUnsupported when 1/C
/// is not a single monomial in x with an invertible antiderivative.
std::pair<Equation, CGaugeTransformation> gauge_C_to_1(const Equation &eq);
/// Requires C = 1; removes A1.
std::pair<GaugedEquation, C1Transformation> gauge_A1_to_0(const Equation &eq);

struct GaugeResult
{
	GaugedEquation eq;
	CGaugeTransformation c_step;
	C1Transformation a1_step;
};
GaugeResult gauge(const Equation &eq);

/// Coefficients of D^(tau), S^(zeta) or P^(chi) from the equivalence
/// algebra. The arbitrary elements appear as parameters "A0", "A2".."Ar",
/// "B" and the dependent variable as "u"; phi[j] is the A^j component
/// (phi[1] unused).
enum class AlgebraKind { D, S, P };
struct AlgebraField
{
	Expr tau, xi, eta;
	std::vector<Expr> phi;
	Expr psi;
};
AlgebraField equivalence_algebra_field(AlgebraKind kind, const Expr &param, int r);
/// Replace the placeholders by the coefficients of eq.
AlgebraField on_equation(const AlgebraField &f, const GaugedEquation &eq);

/// u~ on a uniform grid over the image of the source rectangle. Source
/// values are interpolated with degree-5 Lagrange stencils.
GridSolution map_solution(const EquivTransformation &g, const GridSolution &sol);

EquivTransformation parse_transformation(const std::string &text);
EquivTransformation load_transformation(const std::string &path);
std::string format_transformation(const EquivTransformation &g);

} // namespace bkdv
