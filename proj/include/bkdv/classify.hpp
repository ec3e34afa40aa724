#pragma once

#include "bkdv/equivalence.hpp"
#include "bkdv/symmetry.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bkdv {

/// Rows of the classification table, in table order.
enum class CaseId { C0, C1, C2a, C2b, C3, C4a, C4b, C5a, C5b, C6, C7, C8 };

const char *to_string(CaseId id);
/// Three-digit table label such as "002b".
const char *case_label(CaseId id);
const char *case_description(CaseId id);
CaseId parse_case_id(const std::string &s);
/// Algebra dimension of the table row; C8 depends on r.
int case_dimension(CaseId id, int r);
const std::vector<CaseId> &all_cases();

/// Parameter slots of a template. Constants are expressions free of t and x;
/// `alpha` and `beta` hold functions (of t for C4a, C4b, C6; of x for C1; of
/// t and x for C0, where alpha[0] is A0).
struct CaseParams
{
	int r = 2;
	std::vector<Expr> a; // a[0] = a0, a[j] = a_j for j = 2..r
	Expr b = Expr(0);
	Expr nu = Expr(1);
	std::vector<Expr> alpha; // indexed like a
	Expr beta = Expr(0);
	ParamValues params;

	/// a_j = 0 for j < r, a_r = 1, everything else zero.
	static CaseParams unit(int r);
};

struct CaseInstance
{
	GaugedEquation eq;
	std::vector<VectorField> basis;
};

/// Throws InadmissibleParams for a_r = 0, alpha^r = 0 or nu = 0 (C2b).
CaseInstance instantiate_case(CaseId id, const CaseParams &p);

/// Basis of the P-part of C7: two solutions of chi'' - a0 chi' - b chi = 0.
std::pair<Expr, Expr> case7_chi(const Expr &a0, const Expr &b, const ParamValues &params = {});

enum class Maximality { Certified, NotCertified };
const char *to_string(Maximality m);

struct ClassificationResult
{
	CaseId id = CaseId::C0;
	int r = 2;
	/// Fitted constants or functions by slot name ("a0", "a2", "b", "nu",
	/// "alpha2", "beta", ...), in insertion order.
	std::vector<std::pair<std::string, Expr>> constants;
	std::vector<VectorField> basis;
	KInvariants k;
	int dim = 0;
	Maximality maximal = Maximality::NotCertified;
	/// False when the algebra was identified numerically but the equation is
	/// not in the canonical form of its row, so no symbolic basis is given.
	bool basis_complete = true;
	/// Template rows whose form the equation matches, most symmetric first.
	std::vector<CaseId> matched_forms;
};

/// Dimension and k-invariants of the maximal Lie invariance algebra computed
/// numerically: the classifying equations are closed into a linear ODE for
/// (tau, tau_t, zeta, zeta_t, chi, chi_t) and the remaining constraints are
/// imposed on its fundamental matrix.
struct NumericAlgebra
{
	int dim = 0;
	KInvariants k;
	CaseId id = CaseId::C0;
	/// -1/nu for the two-dimensional nonabelian rows, 0 for C2a.
	double invariant = 0;
	double t0 = 0, t1 = 0;
	/// Component samples of the basis fields: samples[i][c][m] for field i,
	/// component c (tau, tau_t, zeta, zeta_t, chi, chi_t) and time index m.
	std::vector<double> times;
	std::vector<std::vector<std::vector<double>>> samples;
};

NumericAlgebra numeric_algebra(const GaugedEquation &eq);

ClassificationResult classify(const GaugedEquation &eq);

enum class Case6Extension { NoExtension, Extension, Unknown };
const char *to_string(Case6Extension e);

struct Case6Check
{
	Case6Extension verdict = Case6Extension::Unknown;
	/// Extra generator D(zeta1 t^2 + tau1 t + tau0) + S(zeta1 t + zeta0) when
	/// an extension was confirmed symbolically.
	std::vector<VectorField> extra;
};

/// Extension test for A^j = alpha^j(t), A0 = B = 0; alpha is indexed by j
/// (entries 0 and 1 ignored).
Case6Check maximality_check_case6(const std::vector<Expr> &alpha, const ParamValues &params = {});

enum class AltSubcase { A_to_B, B_to_A, C_to_C };

struct AltTransformation
{
	EquivTransformation g;
	Expr sigma;
};

/// Maps the C7 instance with constants (a0, b) onto the alternative form
/// with A0 = B = 0. Throws InadmissibleParams if the sign of a0^2 - 4b does
/// not fit the subcase.
AltTransformation alt_case_transformation(AltSubcase s, const Expr &a0, const Expr &b,
                                          const ParamValues &params = {});

} // namespace bkdv
