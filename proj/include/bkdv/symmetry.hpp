#pragma once

#include "bkdv/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bkdv {

/// Q = D(tau) + S(zeta) + P(chi) with
///   D(tau)  = tau d_t - tau_t u d_u,
///   S(zeta) = zeta x d_x + (zeta u + zeta_t x) d_u,
///   P(chi)  = chi d_x + chi_t d_u.
/// All three components are functions of t only.
struct VectorField
{
	Expr tau = Expr(0), zeta = Expr(0), chi = Expr(0);

	static VectorField D(const Expr &tau) { return {tau, Expr(0), Expr(0)}; }
	static VectorField S(const Expr &zeta) { return {Expr(0), zeta, Expr(0)}; }
	static VectorField P(const Expr &chi) { return {Expr(0), Expr(0), chi}; }

	/// Throws InvariantViolation if a component depends on x.
	void validate() const;
	VectorField simplified() const;
	/// Structural equality after simplification.
	bool same(const VectorField &o) const;
	bool is_zero() const;
	/// "D(1) + S(1/2)" style text; parse_generator reads it back.
	std::string str() const;

	Expr xi() const;  // zeta x + chi
	Expr eta() const; // (zeta - tau_t) u + zeta_t x + chi_t, with u as parameter "u"
};

VectorField operator+(const VectorField &a, const VectorField &b);
VectorField operator-(const VectorField &a, const VectorField &b);
VectorField operator*(const Expr &c, const VectorField &q);

/// Parse sums like "D(t^2)+S(t)", "D(t)-S(1/2)", "2*P(exp(t))".
VectorField parse_generator(const std::string &text);

VectorField commutator(const VectorField &a, const VectorField &b);

/// Residuals of the classifying equations; R[j] for j = 2..r (R[0], R[1]
/// unused), R0 for the A0 equation and RB for the B equation.
struct Residuals
{
	std::vector<Expr> R;
	Expr R0, RB;

	std::vector<Expr> all() const;
};

Residuals determining_residuals(const VectorField &q, const GaugedEquation &eq);

enum class Verdict { Yes, No, Unknown };
const char *to_string(Verdict v);

Verdict is_symmetry(const VectorField &q, const GaugedEquation &eq);
/// Per-residual zero tests in the order of Residuals::all().
std::vector<ZeroTest> residual_tests(const Residuals &res, const ParamValues &params);

struct KInvariants
{
	int k1 = 0, k2 = 0, k3 = 0;

	int dim() const { return k1 + k2 + k3; }
	/// The structural restrictions every appropriate subalgebra obeys.
	bool admissible(int r) const;
	friend bool operator==(const KInvariants &, const KInvariants &) = default;
};

/// Dimensions from sampling the components at 8 Chebyshev points on
/// [0.25, 1.75]. Throws DependentBasis if the fields are linearly dependent.
KInvariants k_invariants(const std::vector<VectorField> &basis, const ParamValues &params = {});

/// Numerical rank of the sampled component tuples selected by `mask`
/// (bit 0 tau, bit 1 zeta, bit 2 chi).
int sampled_rank(const std::vector<VectorField> &fields, unsigned mask, const ParamValues &params = {});

/// Coefficients c with q = sum c_i basis_i at the sample points, or nullopt
/// if q is not in the span.
std::optional<std::vector<double>> span_coefficients(const std::vector<VectorField> &basis, const VectorField &q,
                                      const ParamValues &params = {});

} // namespace bkdv
