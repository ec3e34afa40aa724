#include "bkdv/expr.hpp"

#include "expr_node.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace bkdv {

namespace {

std::size_t mix(std::size_t h, std::size_t v)
{
	return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

std::size_t compute_hash(const Node &n)
{
	std::size_t h = std::size_t(n.kind) * 1315423911u;
	switch (n.kind)
	{
	case Kind::Const:
		h = mix(h, std::hash<Rational>()(n.value));
		break;
	case Kind::Var:
		h = mix(h, std::size_t(n.var) * 31 + std::size_t(n.order));
		break;
	case Kind::Param:
		h = mix(h, std::hash<std::string>()(n.name));
		break;
	case Kind::Func:
		h = mix(h, std::size_t(n.fn));
		break;
	case Kind::Pow:
		h = mix(h, std::hash<Rational>()(n.value));
		break;
	default:
		break;
	}
	for (const auto &a : n.args)
		h = mix(h, a.hash());
	return h;
}

const Expr &zero_expr()
{
	static const Expr z = ExprBuilder::make(Node{}, true);
	return z;
}

} // namespace

Expr ExprBuilder::make(Node &&n, bool canonical)
{
	n.hash = compute_hash(n);
	n.canonical = canonical;
	return Expr(std::make_shared<const Node>(std::move(n)));
}

const char *fn_name(Fn f)
{
	switch (f)
	{
	case Fn::Exp: return "exp";
	case Fn::Ln: return "ln";
	case Fn::Abs: return "abs";
	case Fn::Sign: return "sign";
	case Fn::Sin: return "sin";
	case Fn::Cos: return "cos";
	case Fn::Arctan: return "arctan";
	case Fn::Sqrt: return "sqrt";
	}
	return "?";
}

Expr::Expr() : Expr(zero_expr()) {}

Expr::Expr(Rational c)
{
	Node n;
	n.kind = Kind::Const;
	n.value = c;
	*this = ExprBuilder::make(std::move(n), true);
}

Expr Expr::var(VarKind v, int order)
{
	Node n;
	n.kind = Kind::Var;
	n.var = v;
	n.order = v == VarKind::Phi ? order : 0;
	return ExprBuilder::make(std::move(n), true);
}

Expr Expr::t() { return var(VarKind::T); }
Expr Expr::x() { return var(VarKind::X); }
Expr Expr::w() { return var(VarKind::W); }
Expr Expr::phi(int order) { return var(VarKind::Phi, order); }

Expr Expr::param(const std::string &name)
{
	Node n;
	n.kind = Kind::Param;
	n.name = name;
	return ExprBuilder::make(std::move(n), true);
}

Expr Expr::add(std::vector<Expr> terms)
{
	if (terms.empty())
		return Expr(0);
	if (terms.size() == 1)
		return terms[0];
	Node n;
	n.kind = Kind::Add;
	for (auto &a : terms)
	{
		if (a.kind() == Kind::Add && !a.is_canonical())
			n.args.insert(n.args.end(), a.args().begin(), a.args().end());
		else
			n.args.push_back(std::move(a));
	}
	return ExprBuilder::make(std::move(n));
}

Expr Expr::mul(std::vector<Expr> factors)
{
	if (factors.empty())
		return Expr(1);
	if (factors.size() == 1)
		return factors[0];
	Node n;
	n.kind = Kind::Mul;
	for (auto &a : factors)
	{
		if (a.kind() == Kind::Mul && !a.is_canonical())
			n.args.insert(n.args.end(), a.args().begin(), a.args().end());
		else
			n.args.push_back(std::move(a));
	}
	return ExprBuilder::make(std::move(n));
}

Expr Expr::neg(const Expr &e)
{
	Node n;
	n.kind = Kind::Neg;
	n.args = {e};
	return ExprBuilder::make(std::move(n));
}

Expr Expr::div(const Expr &a, const Expr &b)
{
	Node n;
	n.kind = Kind::Div;
	n.args = {a, b};
	return ExprBuilder::make(std::move(n));
}

Expr Expr::pow(const Expr &base, const Rational &exponent)
{
	Node n;
	n.kind = Kind::Pow;
	n.value = exponent;
	n.args = {base};
	return ExprBuilder::make(std::move(n));
}

Expr Expr::fn(Fn f, const Expr &arg)
{
	Node n;
	n.kind = Kind::Func;
	n.fn = f;
	n.args = {arg};
	return ExprBuilder::make(std::move(n));
}

Kind Expr::kind() const { return node_->kind; }
const Rational &Expr::value() const { return node_->value; }
VarKind Expr::var_kind() const { return node_->var; }
int Expr::phi_order() const { return node_->order; }
const std::string &Expr::name() const { return node_->name; }
Fn Expr::func() const { return node_->fn; }
const std::vector<Expr> &Expr::args() const { return node_->args; }
std::size_t Expr::hash() const { return node_->hash; }
bool Expr::is_canonical() const { return node_->canonical; }

int compare(const Expr &a, const Expr &b)
{
	const Node *na = a.get(), *nb = b.get();
	if (na == nb)
		return 0;
	if (na->kind != nb->kind)
		return na->kind < nb->kind ? -1 : 1;
	switch (na->kind)
	{
	case Kind::Const:
		if (na->value == nb->value)
			return 0;
		return na->value < nb->value ? -1 : 1;
	case Kind::Var:
		if (na->var != nb->var)
			return na->var < nb->var ? -1 : 1;
		return na->order == nb->order ? 0 : (na->order < nb->order ? -1 : 1);
	case Kind::Param:
		return na->name.compare(nb->name) < 0 ? -1 : (na->name == nb->name ? 0 : 1);
	case Kind::Func:
		if (na->fn != nb->fn)
			return na->fn < nb->fn ? -1 : 1;
		break;
	case Kind::Pow:
		if (int c = compare(na->args[0], nb->args[0]))
			return c;
		if (na->value == nb->value)
			return 0;
		return na->value < nb->value ? -1 : 1;
	default:
		break;
	}
	std::size_t n = std::min(na->args.size(), nb->args.size());
	for (std::size_t i = 0; i < n; ++i)
		if (int c = compare(na->args[i], nb->args[i]))
			return c;
	if (na->args.size() != nb->args.size())
		return na->args.size() < nb->args.size() ? -1 : 1;
	return 0;
}

bool operator==(const Expr &a, const Expr &b)
{
	if (a.get() == b.get())
		return true;
	if (a.hash() != b.hash())
		return false;
	return compare(a, b) == 0;
}

Expr operator+(const Expr &a, const Expr &b) { return Expr::add({a, b}); }
Expr operator-(const Expr &a, const Expr &b) { return Expr::add({a, Expr::neg(b)}); }
Expr operator*(const Expr &a, const Expr &b) { return Expr::mul({a, b}); }
Expr operator/(const Expr &a, const Expr &b) { return Expr::div(a, b); }
Expr operator-(const Expr &a) { return Expr::neg(a); }
Expr pow(const Expr &base, const Rational &q) { return Expr::pow(base, q); }
Expr exp(const Expr &a) { return Expr::fn(Fn::Exp, a); }
Expr ln(const Expr &a) { return Expr::fn(Fn::Ln, a); }
Expr abs(const Expr &a) { return Expr::fn(Fn::Abs, a); }
Expr sign(const Expr &a) { return Expr::fn(Fn::Sign, a); }
Expr sin(const Expr &a) { return Expr::fn(Fn::Sin, a); }
Expr cos(const Expr &a) { return Expr::fn(Fn::Cos, a); }
Expr arctan(const Expr &a) { return Expr::fn(Fn::Arctan, a); }
Expr sqrt(const Expr &a) { return Expr::fn(Fn::Sqrt, a); }

bool Expr::depends_on(VarKind v) const
{
	if (kind() == Kind::Var)
		return var_kind() == v;
	for (const auto &a : args())
		if (a.depends_on(v))
			return true;
	return false;
}

bool Expr::depends_on_param(const std::string &n) const
{
	if (kind() == Kind::Param)
		return name() == n;
	for (const auto &a : args())
		if (a.depends_on_param(n))
			return true;
	return false;
}

bool Expr::has_vars() const
{
	if (kind() == Kind::Var)
		return true;
	for (const auto &a : args())
		if (a.has_vars())
			return true;
	return false;
}

void Expr::collect_params(std::vector<std::string> &out) const
{
	if (kind() == Kind::Param)
	{
		if (std::find(out.begin(), out.end(), name()) == out.end())
			out.push_back(name());
		return;
	}
	for (const auto &a : args())
		a.collect_params(out);
}

bool is_constant(const Expr &e) { return !e.has_vars(); }

// ---------------------------------------------------------------- printing

namespace {

std::string var_name(VarKind v, int order)
{
	switch (v)
	{
	case VarKind::T: return "t";
	case VarKind::X: return "x";
	case VarKind::W: return "w";
	case VarKind::Phi: return order == 0 ? "phi" : "phi_" + std::to_string(order);
	}
	return "?";
}

std::string rational_atom(const Rational &q)
{
	if (q.is_integer() && q.sign() >= 0)
		return q.str();
	return "(" + q.str() + ")";
}

void print_full(const Expr &e, std::string &out, bool bare)
{
	switch (e.kind())
	{
	case Kind::Const:
		out += rational_atom(e.value());
		return;
	case Kind::Var:
		out += var_name(e.var_kind(), e.phi_order());
		return;
	case Kind::Param:
		out += e.name();
		return;
	case Kind::Func:
		out += fn_name(e.func());
		out += '(';
		print_full(e.arg(), out, true);
		out += ')';
		return;
	case Kind::Pow:
	{
		const Expr &b = e.arg();
		bool atom = b.kind() == Kind::Var || b.kind() == Kind::Param || b.kind() == Kind::Func ||
		            (b.kind() == Kind::Const && b.value().is_integer() && b.value().sign() >= 0);
		if (!atom)
			out += '(';
		print_full(b, out, true);
		if (!atom)
			out += ')';
		out += '^';
		out += rational_atom(e.value());
		return;
	}
	case Kind::Add:
	case Kind::Mul:
	{
		if (!bare)
			out += '(';
		const char *sep = e.kind() == Kind::Add ? " + " : "*";
		for (std::size_t i = 0; i < e.args().size(); ++i)
		{
			if (i)
				out += sep;
			print_full(e.args()[i], out, false);
		}
		if (!bare)
			out += ')';
		return;
	}
	case Kind::Neg:
		out += "(-";
		print_full(e.arg(), out, false);
		out += ')';
		return;
	case Kind::Div:
		out += '(';
		print_full(e.arg(0), out, false);
		out += '/';
		print_full(e.arg(1), out, false);
		out += ')';
		return;
	}
}

// Precedence levels for pretty printing.
enum Prec { PSum = 1, PProd = 2, PUnary = 3, PPow = 4, PAtom = 5 };

struct Pretty
{
	std::string text;
	int prec;
	bool negative; // leading minus sign that can be folded into a sum
};

Pretty pretty_of(const Expr &e);

std::string wrap(const Pretty &p, int need)
{
	if (p.prec < need)
		return "(" + p.text + ")";
	return p.text;
}

Pretty pretty_rational(const Rational &q)
{
	if (q.sign() < 0)
		return {q.str(), q.is_integer() ? PUnary : PUnary, true};
	return {q.str(), q.is_integer() ? PAtom : PProd, false};
}

Pretty pretty_of(const Expr &e)
{
	switch (e.kind())
	{
	case Kind::Const:
		return pretty_rational(e.value());
	case Kind::Var:
		return {var_name(e.var_kind(), e.phi_order()), PAtom, false};
	case Kind::Param:
		return {e.name(), PAtom, false};
	case Kind::Func:
		return {std::string(fn_name(e.func())) + "(" + pretty_of(e.arg()).text + ")", PAtom, false};
	case Kind::Pow:
	{
		Pretty b = pretty_of(e.arg());
		std::string s = wrap(b, PAtom) + "^";
		const Rational &q = e.value();
		s += (q.is_integer() && q.sign() > 0) ? q.str() : "(" + q.str() + ")";
		return {s, PPow, false};
	}
	case Kind::Mul:
	{
		std::string s;
		bool neg = false;
		std::size_t start = 0;
		const auto &as = e.args();
		if (as[0].is_const())
		{
			Rational c = as[0].value();
			if (c.sign() < 0)
			{
				neg = true;
				c = -c;
			}
			if (!c.is_one())
				s = c.str();
			start = 1;
		}
		for (std::size_t i = start; i < as.size(); ++i)
		{
			if (!s.empty())
				s += "*";
			s += wrap(pretty_of(as[i]), PPow);
		}
		if (s.empty())
			s = "1";
		if (neg)
			return {"-" + s, PUnary, true};
		return {s, PProd, false};
	}
	case Kind::Add:
	{
		std::string s;
		for (std::size_t i = 0; i < e.args().size(); ++i)
		{
			Pretty p = pretty_of(e.args()[i]);
			if (i == 0)
				s = p.prec == PSum ? "(" + p.text + ")" : p.text;
			else if (p.negative)
				s += " - " + wrap({p.text.substr(1), p.prec == PUnary ? PProd : p.prec, false}, PProd);
			else
				s += " + " + wrap(p, PProd);
		}
		return {s, PSum, false};
	}
	case Kind::Neg:
		return {"-" + wrap(pretty_of(e.arg()), PPow), PUnary, true};
	case Kind::Div:
		return {wrap(pretty_of(e.arg(0)), PProd) + "/" + wrap(pretty_of(e.arg(1)), PPow), PProd, false};
	}
	return {"?", PAtom, false};
}

} // namespace

std::string Expr::str() const
{
	std::string out;
	print_full(*this, out, true);
	return out;
}

std::string Expr::pretty() const { return pretty_of(*this).text; }

// ---------------------------------------------------------------- parsing

namespace {

class Parser
{
  public:
	explicit Parser(const std::string &s) : s_(s) {}

	Expr parse_all()
	{
		Expr e = parse_sum();
		skip();
		if (pos_ != s_.size())
			throw SyntaxError("unexpected '" + std::string(1, s_[pos_]) + "'", pos_);
		return e;
	}

  private:
	const std::string &s_;
	std::size_t pos_ = 0;

	void skip()
	{
		while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
			++pos_;
	}

	bool accept(char c)
	{
		skip();
		if (pos_ < s_.size() && s_[pos_] == c)
		{
			++pos_;
			return true;
		}
		return false;
	}

	char peek()
	{
		skip();
		return pos_ < s_.size() ? s_[pos_] : '\0';
	}

	Expr parse_sum()
	{
		std::vector<Expr> terms{parse_product()};
		for (;;)
		{
			char c = peek();
			if (c == '+')
			{
				++pos_;
				terms.push_back(parse_product());
			}
			else if (c == '-')
			{
				++pos_;
				Expr p = parse_product();
				terms.push_back(p.is_const() ? Expr(-p.value()) : Expr::neg(p));
			}
			else
				break;
		}
		return Expr::add(std::move(terms));
	}

	Expr parse_product()
	{
		std::vector<Expr> factors{parse_unary()};
		for (;;)
		{
			char c = peek();
			if (c == '*')
			{
				++pos_;
				factors.push_back(parse_unary());
			}
			else if (c == '/')
			{
				std::size_t at = pos_++;
				Expr den = parse_unary();
				Expr num = Expr::mul(std::move(factors));
				factors.clear();
				if (num.is_const() && den.is_const())
				{
					if (den.value().is_zero())
						throw SyntaxError("division by zero literal", at);
					factors.push_back(Expr(num.value() / den.value()));
				}
				else
					factors.push_back(Expr::div(num, den));
			}
			else
				break;
		}
		return Expr::mul(std::move(factors));
	}

	Expr parse_unary()
	{
		char c = peek();
		if (c == '-')
		{
			++pos_;
			Expr e = parse_unary();
			return e.is_const() ? Expr(-e.value()) : Expr::neg(e);
		}
		if (c == '+')
		{
			++pos_;
			return parse_unary();
		}
		return parse_power();
	}

	Expr parse_power()
	{
		Expr base = parse_primary();
		skip();
		if (pos_ < s_.size() && s_[pos_] == '^')
		{
			++pos_;
			char c = peek();
			if (c == '-' || c == '+')
				throw SyntaxError("signed exponent must be parenthesized", pos_);
			Expr ex = parse_power();
			if (!ex.has_vars())
			{
				std::vector<std::string> ps;
				ex.collect_params(ps);
				if (ps.empty())
				{
					Expr v = simplify(ex);
					if (v.is_const())
						return Expr::pow(base, v.value());
				}
			}
			return exp(ex * ln(base));
		}
		return base;
	}

	Expr parse_primary()
	{
		skip();
		if (pos_ >= s_.size())
			throw SyntaxError("unexpected end of input", pos_);
		char c = s_[pos_];
		if (c == '(')
		{
			++pos_;
			Expr e = parse_sum();
			if (!accept(')'))
				throw SyntaxError("expected ')'", pos_);
			return e;
		}
		if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
		{
			std::size_t start = pos_;
			bool dot = false;
			while (pos_ < s_.size() &&
			       (std::isdigit(static_cast<unsigned char>(s_[pos_])) || (s_[pos_] == '.' && !dot)))
			{
				if (s_[pos_] == '.')
					dot = true;
				++pos_;
			}
			std::string lit = s_.substr(start, pos_ - start);
			if (lit == ".")
				throw SyntaxError("malformed number", start);
			if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
				throw SyntaxError("implicit multiplication is not allowed", pos_);
			return Expr(Rational::parse(lit));
		}
		if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
		{
			std::size_t start = pos_;
			while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
				++pos_;
			std::string id = s_.substr(start, pos_ - start);
			static const std::map<std::string, Fn> fns = {
			    {"exp", Fn::Exp},   {"ln", Fn::Ln},     {"log", Fn::Ln},        {"abs", Fn::Abs},
			    {"sign", Fn::Sign}, {"sin", Fn::Sin},   {"cos", Fn::Cos},       {"arctan", Fn::Arctan},
			    {"sqrt", Fn::Sqrt},
			};
			if (peek() == '(')
			{
				auto it = fns.find(id);
				if (it == fns.end())
					throw UnknownFunction("unknown function '" + id + "' at byte " + std::to_string(start));
				++pos_;
				Expr a = parse_sum();
				if (!accept(')'))
					throw SyntaxError("expected ')'", pos_);
				return Expr::fn(it->second, a);
			}
			if (fns.count(id))
				throw SyntaxError("function '" + id + "' needs an argument", start);
			if (id == "t")
				return Expr::t();
			if (id == "x")
				return Expr::x();
			if (id == "w")
				return Expr::w();
			if (id == "phi")
				return Expr::phi(0);
			if (id.rfind("phi_", 0) == 0 && id.size() > 4 &&
			    std::all_of(id.begin() + 4, id.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
				return Expr::phi(std::stoi(id.substr(4)));
			return Expr::param(id);
		}
		throw SyntaxError("unexpected '" + std::string(1, c) + "'", pos_);
	}
};

} // namespace

Expr parse(const std::string &text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------- calculus

namespace {

Expr diff_raw(const Expr &e, VarKind v)
{
	switch (e.kind())
	{
	case Kind::Const:
	case Kind::Param:
		return Expr(0);
	case Kind::Var:
		if (e.var_kind() == VarKind::Phi)
			return v == VarKind::W ? Expr::phi(e.phi_order() + 1) : Expr(0);
		return Expr(e.var_kind() == v ? 1 : 0);
	case Kind::Add:
	{
		std::vector<Expr> ts;
		for (const auto &a : e.args())
			if (a.depends_on(v) || a.depends_on(VarKind::Phi))
				ts.push_back(diff_raw(a, v));
		return Expr::add(std::move(ts));
	}
	case Kind::Neg:
		return -diff_raw(e.arg(), v);
	case Kind::Mul:
	{
		std::vector<Expr> ts;
		const auto &as = e.args();
		for (std::size_t i = 0; i < as.size(); ++i)
		{
			if (!as[i].depends_on(v) && !(v == VarKind::W && as[i].depends_on(VarKind::Phi)))
				continue;
			std::vector<Expr> fs = as;
			fs[i] = diff_raw(as[i], v);
			ts.push_back(Expr::mul(std::move(fs)));
		}
		return Expr::add(std::move(ts));
	}
	case Kind::Div:
	{
		const Expr &a = e.arg(0), &b = e.arg(1);
		return diff_raw(a, v) / b - a * diff_raw(b, v) * pow(b, -2);
	}
	case Kind::Pow:
	{
		const Rational &q = e.value();
		return Expr(q) * pow(e.arg(), q - 1) * diff_raw(e.arg(), v);
	}
	case Kind::Func:
	{
		const Expr &u = e.arg();
		Expr du = diff_raw(u, v);
		switch (e.func())
		{
		case Fn::Exp: return e * du;
		case Fn::Ln: return du / u;
		case Fn::Abs: return sign(u) * du;
		case Fn::Sign: return Expr(0);
		case Fn::Sin: return cos(u) * du;
		case Fn::Cos: return -(sin(u) * du);
		case Fn::Arctan: return du * pow(Expr(1) + pow(u, 2), -1);
		case Fn::Sqrt: return Expr(Rational(1, 2)) * pow(u, Rational(-1, 2)) * du;
		}
	}
	}
	return Expr(0);
}

} // namespace

Expr diff(const Expr &e, VarKind v) { return simplify(diff_raw(e, v)); }

Expr subst_raw(const Expr &e, const Bindings &b)
{
	switch (e.kind())
	{
	case Kind::Const:
		return e;
	case Kind::Var:
	{
		auto it = b.find(var_name(e.var_kind(), e.phi_order()));
		return it == b.end() ? e : it->second;
	}
	case Kind::Param:
	{
		auto it = b.find(e.name());
		return it == b.end() ? e : it->second;
	}
	default:
		break;
	}
	std::vector<Expr> as;
	bool changed = false;
	for (const auto &a : e.args())
	{
		as.push_back(subst_raw(a, b));
		changed = changed || as.back().get() != a.get();
	}
	if (!changed)
		return e;
	switch (e.kind())
	{
	case Kind::Add: return Expr::add(std::move(as));
	case Kind::Mul: return Expr::mul(std::move(as));
	case Kind::Neg: return Expr::neg(as[0]);
	case Kind::Div: return Expr::div(as[0], as[1]);
	case Kind::Pow: return Expr::pow(as[0], e.value());
	case Kind::Func: return Expr::fn(e.func(), as[0]);
	default: return e;
	}
}

Expr subst(const Expr &e, const Bindings &b) { return simplify(subst_raw(e, b)); }

// ---------------------------------------------------------------- evaluation

namespace {

double real_pow(double b, const Rational &q)
{
	if (q.is_integer())
	{
		if (b == 0.0 && q.sign() < 0)
			throw DomainError("division by zero");
		return std::pow(b, double(q.num()));
	}
	if (b > 0)
		return std::pow(b, q.to_double());
	if (b == 0.0)
	{
		if (q.sign() > 0)
			return 0.0;
		throw DomainError("division by zero");
	}
	if (q.den() % 2 == 0)
		throw DomainError("even root of a negative number");
	double m = std::pow(-b, q.to_double());
	return (q.num() % 2 != 0) ? -m : m;
}

double apply_fn(Fn f, double u)
{
	switch (f)
	{
	case Fn::Exp: return std::exp(u);
	case Fn::Ln:
		if (!(u > 0))
			throw DomainError("logarithm of a nonpositive number");
		return std::log(u);
	case Fn::Abs: return std::fabs(u);
	case Fn::Sign: return double((u > 0) - (u < 0));
	case Fn::Sin: return std::sin(u);
	case Fn::Cos: return std::cos(u);
	case Fn::Arctan: return std::atan(u);
	case Fn::Sqrt:
		if (u < 0)
			throw DomainError("square root of a negative number");
		return std::sqrt(u);
	}
	return 0;
}

double eval_rec(const Expr &e, const Point &p, const ParamValues &params)
{
	switch (e.kind())
	{
	case Kind::Const:
		return e.value().to_double();
	case Kind::Var:
		switch (e.var_kind())
		{
		case VarKind::T: return p.t;
		case VarKind::X: return p.x;
		case VarKind::W: return p.w;
		case VarKind::Phi:
			if (std::size_t(e.phi_order()) >= p.phi.size())
				throw UnboundParameter("no value for " + var_name(VarKind::Phi, e.phi_order()));
			return p.phi[std::size_t(e.phi_order())];
		}
		return 0;
	case Kind::Param:
	{
		auto it = params.find(e.name());
		if (it == params.end())
			throw UnboundParameter("parameter '" + e.name() + "' is not bound");
		return it->second;
	}
	case Kind::Add:
	{
		double s = 0;
		for (const auto &a : e.args())
			s += eval_rec(a, p, params);
		return s;
	}
	case Kind::Mul:
	{
		double s = 1;
		for (const auto &a : e.args())
			s *= eval_rec(a, p, params);
		return s;
	}
	case Kind::Neg:
		return -eval_rec(e.arg(), p, params);
	case Kind::Div:
	{
		double d = eval_rec(e.arg(1), p, params);
		if (d == 0.0)
			throw DomainError("division by zero");
		return eval_rec(e.arg(0), p, params) / d;
	}
	case Kind::Pow:
		return real_pow(eval_rec(e.arg(), p, params), e.value());
	case Kind::Func:
		return apply_fn(e.func(), eval_rec(e.arg(), p, params));
	}
	return 0;
}

} // namespace

double eval(const Expr &e, const Point &p, const ParamValues &params)
{
	double v = eval_rec(e, p, params);
	if (!std::isfinite(v))
		throw DomainError("non-finite value");
	return v;
}

double eval(const Expr &e, double t, double x, const ParamValues &params)
{
	Point p;
	p.t = t;
	p.x = x;
	return eval(e, p, params);
}

// ---------------------------------------------------------------- compiled

namespace {

enum Code : std::uint8_t { OConst, OT, OX, OAdd, OMul, ONeg, ODiv, OPowInt, OPowOdd, OPowEven, OFn };

struct ExprHash
{
	std::size_t operator()(const Expr &e) const { return e.hash(); }
};

struct ExprEq
{
	bool operator()(const Expr &a, const Expr &b) const { return a == b; }
};

using Memo = std::unordered_map<Expr, std::uint32_t, ExprHash, ExprEq>;

double fast_pow(double b, double q)
{
	if (q == 2.0)
		return b * b;
	if (q == 3.0)
		return b * b * b;
	if (q == -1.0)
		return 1 / b;
	if (q == -2.0)
		return 1 / (b * b);
	if (q == 0.5)
		return std::sqrt(b);
	return std::pow(b, q);
}

} // namespace

Compiled::Compiled(const Expr &e, const ParamValues &params)
{
	Memo memo;
	emit(e, params, &memo);
}

std::uint32_t Compiled::emit(const Expr &e, const ParamValues &params, void *memo_ptr)
{
	Memo &memo = *static_cast<Memo *>(memo_ptr);
	if (auto it = memo.find(e); it != memo.end())
		return it->second;
	Op op{OConst, 0, 0, 0, 0};
	switch (e.kind())
	{
	case Kind::Const: op.value = e.value().to_double(); break;
	case Kind::Var:
		if (e.var_kind() == VarKind::T)
			op.code = OT;
		else if (e.var_kind() == VarKind::X)
			op.code = OX;
		else
			throw UnboundParameter("compiled evaluation supports only t and x");
		break;
	case Kind::Param:
	{
		auto it = params.find(e.name());
		if (it == params.end())
			throw UnboundParameter("parameter '" + e.name() + "' is not bound");
		op.value = it->second;
		break;
	}
	default:
	{
		std::vector<std::uint32_t> operands;
		for (const auto &a : e.args())
			operands.push_back(emit(a, params, memo_ptr));
		op.first = static_cast<std::uint32_t>(args_.size());
		op.n = static_cast<std::uint32_t>(operands.size());
		args_.insert(args_.end(), operands.begin(), operands.end());
		switch (e.kind())
		{
		case Kind::Add: op.code = OAdd; break;
		case Kind::Mul: op.code = OMul; break;
		case Kind::Neg: op.code = ONeg; break;
		case Kind::Div: op.code = ODiv; break;
		case Kind::Pow:
		{
			const Rational &q = e.value();
			op.code = q.is_integer() ? OPowInt : (q.den() % 2 == 0 ? OPowEven : OPowOdd);
			op.aux = std::uint8_t(q.num() % 2 != 0);
			op.value = q.to_double();
			break;
		}
		case Kind::Func:
			op.code = OFn;
			op.aux = std::uint8_t(e.func());
			break;
		default: break;
		}
	}
	}
	ops_.push_back(op);
	auto slot = static_cast<std::uint32_t>(ops_.size() - 1);
	memo.emplace(e, slot);
	return slot;
}

double Compiled::run(double t, double x, bool &ok) const noexcept
{
	thread_local std::vector<double> reg;
	reg.resize(ops_.size());
	ok = true;
	for (std::size_t k = 0; k < ops_.size(); ++k)
	{
		const Op &op = ops_[k];
		const std::uint32_t *in = args_.data() + op.first;
		double v = 0;
		switch (op.code)
		{
		case OConst: v = op.value; break;
		case OT: v = t; break;
		case OX: v = x; break;
		case OAdd:
			for (std::uint32_t i = 0; i < op.n; ++i)
				v += reg[in[i]];
			break;
		case OMul:
			v = 1;
			for (std::uint32_t i = 0; i < op.n; ++i)
				v *= reg[in[i]];
			break;
		case ONeg: v = -reg[in[0]]; break;
		case ODiv:
			if (reg[in[1]] == 0.0)
				ok = false;
			v = reg[in[0]] / reg[in[1]];
			break;
		case OPowInt:
		{
			double b = reg[in[0]];
			if (b == 0.0 && op.value < 0)
				ok = false;
			v = fast_pow(b, op.value);
			break;
		}
		case OPowOdd:
		{
			double b = reg[in[0]];
			if (b == 0.0 && op.value < 0)
				ok = false;
			double m = fast_pow(std::fabs(b), op.value);
			v = (b < 0 && op.aux) ? -m : m;
			break;
		}
		case OPowEven:
		{
			double b = reg[in[0]];
			if (b < 0 || (b == 0.0 && op.value < 0))
				ok = false;
			v = fast_pow(b, op.value);
			break;
		}
		case OFn:
		{
			double u = reg[in[0]];
			switch (static_cast<Fn>(op.aux))
			{
			case Fn::Exp: v = std::exp(u); break;
			case Fn::Ln:
				if (!(u > 0))
					ok = false;
				v = std::log(u);
				break;
			case Fn::Abs: v = std::fabs(u); break;
			case Fn::Sign: v = double((u > 0) - (u < 0)); break;
			case Fn::Sin: v = std::sin(u); break;
			case Fn::Cos: v = std::cos(u); break;
			case Fn::Arctan: v = std::atan(u); break;
			case Fn::Sqrt:
				if (u < 0)
					ok = false;
				v = std::sqrt(u);
				break;
			}
			break;
		}
		}
		reg[k] = v;
	}
	double v = ops_.empty() ? 0.0 : reg.back();
	if (!std::isfinite(v))
		ok = false;
	return v;
}

double Compiled::operator()(double t, double x) const
{
	bool ok;
	double v = run(t, x, ok);
	if (!ok)
		throw DomainError("evaluation outside the domain");
	return v;
}

double Compiled::try_eval(double t, double x) const noexcept
{
	bool ok;
	double v = run(t, x, ok);
	return ok ? v : std::nan("");
}

void Compiled::try_eval_grad(double t, double x, double out[3]) const noexcept
{
	struct D
	{
		double v, dt, dx;
	};
	thread_local std::vector<D> reg;
	reg.resize(ops_.size());
	bool ok = true;
	// Chain rule for a unary op with value v and derivative factor k.
	auto chain = [](const D &a, double v, double k) { return D{v, a.dt * k, a.dx * k}; };
	for (std::size_t j = 0; j < ops_.size(); ++j)
	{
		const Op &op = ops_[j];
		const std::uint32_t *in = args_.data() + op.first;
		D r{0, 0, 0};
		switch (op.code)
		{
		case OConst: r.v = op.value; break;
		case OT: r = {t, 1, 0}; break;
		case OX: r = {x, 0, 1}; break;
		case OAdd:
			for (std::uint32_t i = 0; i < op.n; ++i)
			{
				const D &a = reg[in[i]];
				r = {r.v + a.v, r.dt + a.dt, r.dx + a.dx};
			}
			break;
		case OMul:
			r.v = 1;
			for (std::uint32_t i = 0; i < op.n; ++i)
			{
				const D &f = reg[in[i]];
				r = {r.v * f.v, r.dt * f.v + r.v * f.dt, r.dx * f.v + r.v * f.dx};
			}
			break;
		case ONeg: r = {-reg[in[0]].v, -reg[in[0]].dt, -reg[in[0]].dx}; break;
		case ODiv:
		{
			const D &a = reg[in[0]], &b = reg[in[1]];
			if (b.v == 0.0)
				ok = false;
			double q = a.v / b.v;
			r = {q, (a.dt - q * b.dt) / b.v, (a.dx - q * b.dx) / b.v};
			break;
		}
		case OPowInt:
		case OPowOdd:
		case OPowEven:
		{
			const D &a = reg[in[0]];
			double b = a.v;
			if (b == 0.0 && op.value < 0)
				ok = false;
			if (op.code == OPowEven && b < 0)
				ok = false;
			double v, k;
			if (op.code == OPowOdd)
			{
				double m = fast_pow(std::fabs(b), op.value);
				v = (b < 0 && op.aux) ? -m : m;
			}
			else
				v = fast_pow(b, op.value);
			if (op.value == 1.0)
				k = 1;
			else if (b == 0.0)
				k = op.value > 1 ? 0.0 : std::nan("");
			else
				k = op.value * v / b;
			r = chain(a, v, k);
			break;
		}
		case OFn:
		{
			const D &a = reg[in[0]];
			double u = a.v;
			switch (static_cast<Fn>(op.aux))
			{
			case Fn::Exp:
			{
				double e = std::exp(u);
				r = chain(a, e, e);
				break;
			}
			case Fn::Ln:
				if (!(u > 0))
					ok = false;
				r = chain(a, std::log(u), 1 / u);
				break;
			case Fn::Abs: r = chain(a, std::fabs(u), u < 0 ? -1.0 : 1.0); break;
			case Fn::Sign: r = chain(a, double((u > 0) - (u < 0)), 0); break;
			case Fn::Sin: r = chain(a, std::sin(u), std::cos(u)); break;
			case Fn::Cos: r = chain(a, std::cos(u), -std::sin(u)); break;
			case Fn::Arctan: r = chain(a, std::atan(u), 1 / (1 + u * u)); break;
			case Fn::Sqrt:
				if (u < 0)
					ok = false;
				r = chain(a, std::sqrt(u), 0.5 / std::sqrt(u));
				break;
			}
			break;
		}
		}
		reg[j] = r;
	}
	D r = ops_.empty() ? D{0, 0, 0} : reg.back();
	if (!ok || !std::isfinite(r.v) || !std::isfinite(r.dt) || !std::isfinite(r.dx))
		r = {std::nan(""), std::nan(""), std::nan("")};
	out[0] = r.v;
	out[1] = r.dt;
	out[2] = r.dx;
}

} // namespace bkdv
