#include "bkdv/symmetry.hpp"

#include <Eigen/Dense>

#include <cctype>
#include <cmath>
#include <numbers>

namespace bkdv {

namespace {

const Expr &X() { static const Expr e = Expr::x(); return e; }
Expr dt(const Expr &e) { return diff(e, VarKind::T); }
Expr dx(const Expr &e) { return diff(e, VarKind::X); }

std::string strip(const std::string &s)
{
	std::string out;
	for (char c : s)
		if (!std::isspace(static_cast<unsigned char>(c)))
			out.push_back(c);
	return out;
}

VectorField parse_term(const std::string &term, std::size_t base)
{
	// term = [coef '*'] K '(' inner ')'
	std::size_t open = term.find('(');
	std::size_t kpos = std::string::npos;
	int depth = 0;
	for (std::size_t i = 0; i < term.size(); ++i)
	{
		char c = term[i];
		if (c == '(')
		{
			if (depth == 0 && i > 0 && (term[i - 1] == 'D' || term[i - 1] == 'S' || term[i - 1] == 'P') &&
			    (i == 1 || term[i - 2] == '*'))
			{
				kpos = i - 1;
				open = i;
				break;
			}
			++depth;
		}
		else if (c == ')')
			--depth;
	}
	if (kpos == std::string::npos || term.back() != ')')
		throw SyntaxError("expected D(...), S(...) or P(...)", base);
	Expr coef(1);
	if (kpos > 0)
		coef = parse(term.substr(0, kpos - 1));
	Expr inner;
	try
	{
		inner = parse(term.substr(open + 1, term.size() - open - 2));
	}
	catch (const SyntaxError &e)
	{
		throw SyntaxError("in generator argument", base + open + 1 + e.offset());
	}
	Expr f = simplify(coef * inner);
	switch (term[kpos])
	{
	case 'D': return VectorField::D(f);
	case 'S': return VectorField::S(f);
	default: return VectorField::P(f);
	}
}

std::vector<double> chebyshev_points()
{
	std::vector<double> ts(8);
	for (int i = 0; i < 8; ++i)
		ts[std::size_t(i)] = 1.0 + 0.75 * std::cos((2.0 * i + 1.0) * std::numbers::pi / 16.0);
	return ts;
}

Eigen::MatrixXd sample_matrix(const std::vector<VectorField> &fields, unsigned mask, const ParamValues &params)
{
	auto ts = chebyshev_points();
	int per = 0;
	for (unsigned b = 0; b < 3; ++b)
		per += (mask >> b) & 1u;
	Eigen::MatrixXd M(Eigen::Index(fields.size()), Eigen::Index(per * 8));
	for (std::size_t i = 0; i < fields.size(); ++i)
	{
		const Expr *comp[3] = {&fields[i].tau, &fields[i].zeta, &fields[i].chi};
		int col = 0;
		for (unsigned b = 0; b < 3; ++b)
		{
			if (!((mask >> b) & 1u))
				continue;
			Compiled c(simplify(*comp[b]), params);
			for (double t : ts)
				M(Eigen::Index(i), col++) = c(t, 0.0);
		}
	}
	return M;
}

int numeric_rank(const Eigen::MatrixXd &M)
{
	if (M.rows() == 0 || M.cols() == 0)
		return 0;
	Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
	const auto &s = svd.singularValues();
	if (s.size() == 0 || s(0) == 0.0)
		return 0;
	int rank = 0;
	for (Eigen::Index i = 0; i < s.size(); ++i)
		if (s(i) > 1e-9 * s(0))
			++rank;
	return rank;
}

} // namespace

void VectorField::validate() const
{
	for (const Expr *e : {&tau, &zeta, &chi})
		if (simplify(*e).depends_on(VarKind::X))
			throw InvariantViolation("vector field components must not depend on x");
}

VectorField VectorField::simplified() const { return {simplify(tau), simplify(zeta), simplify(chi)}; }

bool VectorField::same(const VectorField &o) const
{
	auto a = simplified(), b = o.simplified();
	return a.tau == b.tau && a.zeta == b.zeta && a.chi == b.chi;
}

bool VectorField::is_zero() const
{
	auto a = simplified();
	return a.tau.is_zero_const() && a.zeta.is_zero_const() && a.chi.is_zero_const();
}

std::string VectorField::str() const
{
	auto a = simplified();
	std::string out;
	const std::pair<const char *, const Expr *> parts[] = {{"D", &a.tau}, {"S", &a.zeta}, {"P", &a.chi}};
	for (const auto &[k, e] : parts)
	{
		if (e->is_zero_const())
			continue;
		if (!out.empty())
			out += " + ";
		out += std::string(k) + "(" + e->pretty() + ")";
	}
	return out.empty() ? "0" : out;
}

Expr VectorField::xi() const { return simplify(zeta * X() + chi); }

Expr VectorField::eta() const
{
	return simplify((zeta - dt(tau)) * Expr::param("u") + dt(zeta) * X() + dt(chi));
}

VectorField operator+(const VectorField &a, const VectorField &b)
{
	return VectorField{a.tau + b.tau, a.zeta + b.zeta, a.chi + b.chi}.simplified();
}

VectorField operator-(const VectorField &a, const VectorField &b)
{
	return VectorField{a.tau - b.tau, a.zeta - b.zeta, a.chi - b.chi}.simplified();
}

VectorField operator*(const Expr &c, const VectorField &q)
{
	return VectorField{c * q.tau, c * q.zeta, c * q.chi}.simplified();
}

VectorField parse_generator(const std::string &text)
{
	std::string s = strip(text);
	if (s.empty())
		throw SyntaxError("empty generator", 0);
	VectorField out;
	std::size_t start = 0;
	int depth = 0;
	bool negate_next = false;
	if (s[0] == '+' || s[0] == '-')
	{
		negate_next = s[0] == '-';
		start = 1;
	}
	for (std::size_t i = start; i <= s.size(); ++i)
	{
		char c = i < s.size() ? s[i] : '\0';
		if (c == '(')
			++depth;
		else if (c == ')')
			--depth;
		if (depth < 0)
			throw SyntaxError("unbalanced parenthesis", i);
		if (i == s.size() || (depth == 0 && (c == '+' || c == '-') && i > start && s[i - 1] != '*' &&
		                      s[i - 1] != '/' && s[i - 1] != '^'))
		{
			if (i == start)
				throw SyntaxError("empty term", i);
			VectorField q = parse_term(s.substr(start, i - start), start);
			out = negate_next ? out - q : out + q;
			negate_next = c == '-';
			start = i + 1;
		}
	}
	if (depth != 0)
		throw SyntaxError("unbalanced parenthesis", s.size());
	return out;
}

VectorField commutator(const VectorField &a, const VectorField &b)
{
	Expr tau = a.tau * dt(b.tau) - b.tau * dt(a.tau);
	Expr zeta = a.tau * dt(b.zeta) - b.tau * dt(a.zeta);
	Expr chi = a.tau * dt(b.chi) - b.tau * dt(a.chi) - a.zeta * b.chi + b.zeta * a.chi;
	return VectorField{tau, zeta, chi}.simplified();
}

std::vector<Expr> Residuals::all() const
{
	std::vector<Expr> out;
	for (std::size_t j = 2; j < R.size(); ++j)
		out.push_back(R[j]);
	out.push_back(R0);
	out.push_back(RB);
	return out;
}

Residuals determining_residuals(const VectorField &q, const GaugedEquation &eq)
{
	const Expr &tau = q.tau, &zeta = q.zeta, &chi = q.chi;
	Expr tau_t = dt(tau), tau_tt = dt(tau_t);
	Expr zeta_t = dt(zeta), zeta_tt = dt(zeta_t);
	Expr chi_t = dt(chi), chi_tt = dt(chi_t);
	Expr xi = zeta * X() + chi;

	Residuals res;
	res.R.assign(std::size_t(eq.r) + 1, Expr(0));
	for (int j = 2; j <= eq.r; ++j)
	{
		const Expr &A = eq.A[std::size_t(j)];
		res.R[std::size_t(j)] = simplify(tau * dt(A) + xi * dx(A) + (tau_t - Expr(j) * zeta) * A);
	}
	const Expr &A0 = eq.A[0];
	res.R0 = simplify(tau * dt(A0) + xi * dx(A0) + tau_t * A0 - Expr(2) * zeta_t + tau_tt);
	const Expr &B = eq.B;
	res.RB = simplify(tau * dt(B) + xi * dx(B) - (zeta - Expr(2) * tau_t) * B + (zeta_t * X() + chi_t) * A0 -
	                  zeta_tt * X() - chi_tt);
	return res;
}

const char *to_string(Verdict v)
{
	switch (v)
	{
	case Verdict::Yes: return "Yes";
	case Verdict::No: return "No";
	case Verdict::Unknown: return "Unknown";
	}
	return "?";
}

std::vector<ZeroTest> residual_tests(const Residuals &res, const ParamValues &params)
{
	std::vector<ZeroTest> out;
	for (const auto &r : res.all())
		out.push_back(is_zero(r, params));
	return out;
}

Verdict is_symmetry(const VectorField &q, const GaugedEquation &eq)
{
	bool unknown = false;
	for (auto z : residual_tests(determining_residuals(q, eq), eq.params))
	{
		if (z == ZeroTest::NonZero)
			return Verdict::No;
		if (z == ZeroTest::Unknown)
			unknown = true;
	}
	return unknown ? Verdict::Unknown : Verdict::Yes;
}

bool KInvariants::admissible(int r) const
{
	bool pair_ok = (k1 == 0 && k2 == 0) || (k1 == 0 && k2 == 1) || (k1 == 2 && k2 == 0);
	if (!pair_ok || k3 < 0 || k3 > 3 || dim() > 5)
		return false;
	if (k2 == 1 && k3 > 1)
		return false;
	if (k1 == 2)
	{
		if (r > 2 && k3 > 2)
			return false;
		if (r == 2 && k3 == 2)
			return false;
	}
	return true;
}

int sampled_rank(const std::vector<VectorField> &fields, unsigned mask, const ParamValues &params)
{
	return numeric_rank(sample_matrix(fields, mask, params));
}

KInvariants k_invariants(const std::vector<VectorField> &basis, const ParamValues &params)
{
	for (const auto &q : basis)
		q.validate();
	int n = int(basis.size());
	if (sampled_rank(basis, 7u, params) < n)
		throw DependentBasis("basis vector fields are linearly dependent");
	KInvariants k;
	k.k3 = sampled_rank(basis, 1u, params);
	int tz = sampled_rank(basis, 3u, params);
	k.k1 = n - tz;
	k.k2 = tz - k.k3;
	return k;
}

std::optional<std::vector<double>> span_coefficients(const std::vector<VectorField> &basis, const VectorField &q,
                                                     const ParamValues &params)
{
	Eigen::VectorXd v = sample_matrix({q}, 7u, params).transpose().col(0);
	if (basis.empty())
	{
		if (v.norm() < 1e-12)
			return std::vector<double>{};
		return std::nullopt;
	}
	Eigen::MatrixXd M = sample_matrix(basis, 7u, params).transpose();
	Eigen::VectorXd c = M.colPivHouseholderQr().solve(v);
	double err = (M * c - v).norm();
	if (err > 1e-8 * (1.0 + v.norm()))
		return std::nullopt;
	return std::vector<double>(c.data(), c.data() + c.size());
}

} // namespace bkdv
