#pragma once

#include "bkdv/errors.hpp"
#include "bkdv/rational.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace bkdv {

enum class Kind : std::uint8_t { Const, Var, Param, Func, Pow, Mul, Add, Neg, Div };

/// Independent variables. W is the reduction variable omega; Phi is the
/// unknown of a reduced equation, carrying its derivative order w.r.t. W.
enum class VarKind : std::uint8_t { T, X, W, Phi };

enum class Fn : std::uint8_t { Exp, Ln, Abs, Sign, Sin, Cos, Arctan, Sqrt };

const char *fn_name(Fn f);

struct Node;

/// Immutable expression handle. Copies share the underlying tree.
///
/// The arithmetic operators build raw (unsimplified) trees; call simplify()
/// to obtain the canonical form.
class Expr
{
  public:
	Expr();
	Expr(Rational c); // NOLINT
	Expr(int c) : Expr(Rational(c)) {} // NOLINT
	Expr(long c) : Expr(Rational(c)) {} // NOLINT
	Expr(long long c) : Expr(Rational(static_cast<std::int64_t>(c))) {} // NOLINT

	static Expr t();
	static Expr x();
	static Expr w();
	static Expr phi(int order = 0);
	static Expr var(VarKind v, int order = 0);
	static Expr param(const std::string &name);
	static Expr add(std::vector<Expr> terms);
	static Expr mul(std::vector<Expr> factors);
	static Expr neg(const Expr &e);
	static Expr div(const Expr &a, const Expr &b);
	static Expr pow(const Expr &base, const Rational &exponent);
	static Expr fn(Fn f, const Expr &arg);

	Kind kind() const;
	/// Const value or Pow exponent.
	const Rational &value() const;
	VarKind var_kind() const;
	int phi_order() const;
	const std::string &name() const;
	Fn func() const;
	const std::vector<Expr> &args() const;
	const Expr &arg(std::size_t i = 0) const { return args()[i]; }
	std::size_t hash() const;

	bool is_const() const { return kind() == Kind::Const; }
	bool is_zero_const() const { return is_const() && value().is_zero(); }
	bool is_one_const() const { return is_const() && value().is_one(); }
	/// True if the tree was produced by simplify().
	bool is_canonical() const;

	/// Fully parenthesized text that parses back to the same tree.
	std::string str() const;
	/// Compact human-readable text; parses to an equivalent expression.
	std::string pretty() const;

	bool depends_on(VarKind v) const;
	bool depends_on_param(const std::string &name) const;
	bool has_vars() const;
	void collect_params(std::vector<std::string> &out) const;

	const Node *get() const { return node_.get(); }

	friend bool operator==(const Expr &a, const Expr &b);
	friend bool operator!=(const Expr &a, const Expr &b) { return !(a == b); }

  private:
	explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
	std::shared_ptr<const Node> node_;
	friend struct ExprBuilder;
};

/// Total structural order; returns <0, 0, >0.
int compare(const Expr &a, const Expr &b);

struct ExprLess
{
	bool operator()(const Expr &a, const Expr &b) const { return compare(a, b) < 0; }
};

Expr operator+(const Expr &a, const Expr &b);
Expr operator-(const Expr &a, const Expr &b);
Expr operator*(const Expr &a, const Expr &b);
Expr operator/(const Expr &a, const Expr &b);
Expr operator-(const Expr &a);
Expr pow(const Expr &base, const Rational &q);
Expr exp(const Expr &a);
Expr ln(const Expr &a);
Expr abs(const Expr &a);
Expr sign(const Expr &a);
Expr sin(const Expr &a);
Expr cos(const Expr &a);
Expr arctan(const Expr &a);
Expr sqrt(const Expr &a);

/// Parameter values for numeric evaluation.
using ParamValues = std::map<std::string, double>;
/// Symbol substitutions: keys are "t", "x", "w", "phi", "phi_<k>" or
/// parameter names.
using Bindings = std::map<std::string, Expr>;

struct Point
{
	double t = 0, x = 0, w = 0;
	std::vector<double> phi; // phi, phi_1, ...
};

Expr parse(const std::string &text);
Expr simplify(const Expr &e);
Expr diff(const Expr &e, VarKind v);
Expr subst(const Expr &e, const Bindings &b);
/// subst without the final simplify.
Expr subst_raw(const Expr &e, const Bindings &b);
double eval(const Expr &e, const Point &p, const ParamValues &params = {});
double eval(const Expr &e, double t, double x, const ParamValues &params = {});

enum class ZeroTest { Zero, NonZero, Unknown };
const char *to_string(ZeroTest z);

ZeroTest is_zero(const Expr &e, const ParamValues &params = {});

/// Deterministic probe points used by is_zero and by the invariant checks
/// of the model types; coordinates lie in [-2,-0.1] u [0.1,2].
std::vector<Point> probe_points(int n = 32);

/// True if e is free of t, x, w, phi (parameters allowed).
bool is_constant(const Expr &e);

/// One factor |base|^e * sign(base)^s of a canonical monomial. Exponentials
/// carry their argument in `base` (an exp call) and radicals a prime constant.
struct FactorView
{
	Expr base;
	Rational e;
	int s = 0;
};

struct TermView
{
	Rational coef;
	std::vector<FactorView> factors;
};

/// Monomials of a simplified expression in canonical order.
std::vector<TermView> terms_of(const Expr &e);
/// Rebuild an expression from a monomial.
Expr term_expr(const TermView &t);

/// The random probe seed; BKDV_PROBE_SEED overrides the default 0x42.
std::uint64_t probe_seed();

/// Flattened evaluator with parameters bound at construction. Intended for
/// inner loops of numeric routines; throws DomainError like eval().
class Compiled
{
  public:
	Compiled() = default;
	Compiled(const Expr &e, const ParamValues &params);
	double operator()(double t, double x) const;
	/// Like operator() but returns NaN instead of throwing.
	double try_eval(double t, double x) const noexcept;
	/// Value and first partials (d/dt, d/dx) by forward-mode differentiation;
	/// all three are NaN outside the domain.
	void try_eval_grad(double t, double x, double out[3]) const noexcept;

  private:
	/// One register per distinct subexpression; operands are earlier registers.
	struct Op
	{
		std::uint8_t code;
		std::uint8_t aux;
		std::uint32_t first; // into args_
		std::uint32_t n;
		double value;
	};
	std::vector<Op> ops_;
	std::vector<std::uint32_t> args_;
	std::uint32_t emit(const Expr &e, const ParamValues &params, void *memo);
	double run(double t, double x, bool &ok) const noexcept;
};

} // namespace bkdv
