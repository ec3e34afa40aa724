#include "bkdv/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace bkdv {

namespace {

void check_nonvanishing(const Expr &e, const ParamValues &params, const std::string &what)
{
	Expr s = simplify(e);
	if (s.is_zero_const() || is_zero(s, params) == ZeroTest::Zero)
		throw InvariantViolation(what + " vanishes identically");
	std::vector<std::string> names;
	s.collect_params(names);
	ParamValues pv = params;
	for (const auto &n : names)
		if (!pv.count(n))
			pv[n] = 0.7;
	for (const auto &p : probe_points())
	{
		double v;
		try
		{
			v = eval(s, p, pv);
		}
		catch (const DomainError &)
		{
			continue;
		}
		if (v == 0.0)
			throw InvariantViolation(what + " vanishes at a probe point");
	}
}

std::string trim(const std::string &s)
{
	std::size_t a = s.find_first_not_of(" \t\r");
	if (a == std::string::npos)
		return "";
	std::size_t b = s.find_last_not_of(" \t\r");
	return s.substr(a, b - a + 1);
}

} // namespace

void Equation::validate() const
{
	if (r < 2)
		throw InvariantViolation("order r must be at least 2");
	if (int(A.size()) != r + 1)
		throw InvariantViolation("coefficient list does not match r");
	check_nonvanishing(C * A[std::size_t(r)], params, "C*A" + std::to_string(r));
}

GaugedEquation GaugedEquation::make(const Expr &A0, const std::vector<Expr> &A2r, const Expr &B, ParamValues params)
{
	GaugedEquation g;
	g.r = int(A2r.size()) + 1;
	g.A.push_back(simplify(A0));
	g.A.push_back(Expr(0));
	for (const auto &a : A2r)
		g.A.push_back(simplify(a));
	g.B = simplify(B);
	g.params = std::move(params);
	g.validate();
	return g;
}

void GaugedEquation::validate() const
{
	if (r < 2)
		throw InvariantViolation("order r must be at least 2");
	if (int(A.size()) != r + 1)
		throw InvariantViolation("coefficient list does not match r");
	if (!simplify(A[1]).is_zero_const())
		throw InvariantViolation("gauged equation must have A1 = 0");
	check_nonvanishing(A[std::size_t(r)], params, "A" + std::to_string(r));
}

Equation GaugedEquation::to_equation() const
{
	Equation e;
	e.r = r;
	e.C = Expr(1);
	e.A = A;
	e.B = B;
	e.params = params;
	return e;
}

bool is_gauged(const Equation &eq)
{
	return simplify(eq.C - Expr(1)).is_zero_const() && simplify(eq.A[1]).is_zero_const();
}

GaugedEquation as_gauged(const Equation &eq)
{
	if (!is_gauged(eq))
		throw NotGauged("equation is not in the gauge C = 1, A1 = 0");
	GaugedEquation g;
	g.r = eq.r;
	for (const auto &a : eq.A)
		g.A.push_back(simplify(a));
	g.A[1] = Expr(0);
	g.B = simplify(eq.B);
	g.params = eq.params;
	return g;
}

std::string read_file(const std::string &path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw Error("IOError", "cannot open " + path);
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

std::vector<std::pair<std::string, std::pair<std::string, std::size_t>>> read_key_values(const std::string &text)
{
	std::vector<std::pair<std::string, std::pair<std::string, std::size_t>>> out;
	std::size_t pos = 0;
	while (pos <= text.size())
	{
		std::size_t end = text.find('\n', pos);
		if (end == std::string::npos)
			end = text.size();
		std::string line = text.substr(pos, end - pos);
		std::size_t hash = line.find('#');
		if (hash != std::string::npos)
			line = line.substr(0, hash);
		if (!trim(line).empty())
		{
			std::size_t eq = line.find('=');
			if (eq == std::string::npos)
				throw SyntaxError("expected 'key = value'", pos);
			std::string key = trim(line.substr(0, eq));
			std::string val = trim(line.substr(eq + 1));
			std::size_t voff = pos + eq + 1 + line.substr(eq + 1).find_first_not_of(" \t");
			if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
			{
				val = val.substr(1, val.size() - 2);
				++voff;
			}
			if (key.empty())
				throw SyntaxError("empty key", pos);
			out.push_back({key, {val, voff}});
		}
		if (end == text.size())
			break;
		pos = end + 1;
	}
	return out;
}

namespace {

Expr parse_at(const std::string &val, std::size_t offset)
{
	try
	{
		return parse(val);
	}
	catch (const SyntaxError &e)
	{
		throw SyntaxError(std::string("in value '") + val + "'", offset + e.offset());
	}
}

} // namespace

Equation parse_equation(const std::string &text)
{
	auto kv = read_key_values(text);
	std::map<std::string, std::pair<std::string, std::size_t>> m;
	ParamValues params;
	for (const auto &[k, v] : kv)
	{
		if (k.rfind("param.", 0) == 0)
		{
			try
			{
				std::size_t used = 0;
				params[k.substr(6)] = std::stod(v.first, &used);
				if (used != v.first.size())
					throw std::invalid_argument(v.first);
			}
			catch (const std::logic_error &)
			{
				throw SyntaxError("parameter value must be a real number", v.second);
			}
			continue;
		}
		if (m.count(k))
			throw SyntaxError("duplicate key '" + k + "'", v.second);
		m[k] = v;
	}
	auto it = m.find("r");
	if (it == m.end())
		throw MissingKey("missing key 'r'");
	int r;
	try
	{
		std::size_t used = 0;
		r = std::stoi(it->second.first, &used);
		if (used != it->second.first.size())
			throw std::invalid_argument("r");
	}
	catch (const std::logic_error &)
	{
		throw SyntaxError("r must be an integer", it->second.second);
	}
	if (r < 2)
		throw InvariantViolation("order r must be at least 2");
	std::string rk = "A" + std::to_string(r);
	if (!m.count(rk))
		throw MissingKey("missing key '" + rk + "'");

	Equation eq;
	eq.r = r;
	eq.params = params;
	eq.A.assign(std::size_t(r) + 1, Expr(0));
	for (const auto &[k, v] : m)
	{
		if (k == "r")
			continue;
		Expr e = simplify(parse_at(v.first, v.second));
		if (k == "C")
			eq.C = e;
		else if (k == "B")
			eq.B = e;
		else if (k.size() >= 2 && k[0] == 'A' && std::all_of(k.begin() + 1, k.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
		{
			int j = std::stoi(k.substr(1));
			if (j > r)
				throw InvariantViolation("coefficient " + k + " exceeds the order r = " + std::to_string(r));
			eq.A[std::size_t(j)] = e;
		}
		else
			throw SyntaxError("unknown key '" + k + "'", v.second);
	}
	eq.validate();
	return eq;
}

Equation load_equation(const std::string &path) { return parse_equation(read_file(path)); }

std::variant<Equation, GaugedEquation> load(const std::string &path)
{
	Equation eq = load_equation(path);
	if (is_gauged(eq))
		return as_gauged(eq);
	return eq;
}

std::string format_equation(const Equation &eq)
{
	std::ostringstream out;
	out << "r = " << eq.r << "\n";
	out << "C = " << simplify(eq.C).str() << "\n";
	for (int k = eq.r; k >= 0; --k)
		out << "A" << k << " = " << simplify(eq.A[std::size_t(k)]).str() << "\n";
	out << "B = " << simplify(eq.B).str() << "\n";
	for (const auto &[k, v] : eq.params)
		out << "param." << k << " = " << std::setprecision(17) << v << "\n";
	return out.str();
}

void save(const Equation &eq, const std::string &path)
{
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw Error("IOError", "cannot write " + path);
	out << format_equation(eq);
}

void save(const GaugedEquation &eq, const std::string &path) { save(eq.to_equation(), path); }

void GridSolution::validate() const
{
	if (nt < 2 || nx < 2 || !(t1 > t0) || !(x1 > x0))
		throw InvariantViolation("grid must have at least two increasing points per axis");
	if (u.size() != std::size_t(nt) * std::size_t(nx))
		throw InvariantViolation("grid value count does not match nt*nx");
	for (double v : u)
		if (!std::isfinite(v))
			throw InvariantViolation("grid contains non-finite values");
}

GridSolution GridSolution::sample(const Expr &u, double t0, double t1, int nt, double x0, double x1, int nx,
                                  const ParamValues &params)
{
	GridSolution g{t0, t1, x0, x1, nt, nx, {}};
	g.u.resize(std::size_t(nt) * std::size_t(nx));
	Compiled c(simplify(u), params);
	for (int i = 0; i < nt; ++i)
		for (int j = 0; j < nx; ++j)
			g.at(i, j) = c(g.t(i), g.x(j));
	g.validate();
	return g;
}

GridSolution load_grid(const std::string &path)
{
	std::istringstream in(read_file(path));
	GridSolution g;
	if (!(in >> g.t0 >> g.t1 >> g.nt >> g.x0 >> g.x1 >> g.nx))
		throw SyntaxError("bad grid header", 0);
	if (g.nt < 2 || g.nx < 2)
		throw InvariantViolation("grid must have at least two points per axis");
	g.u.resize(std::size_t(g.nt) * std::size_t(g.nx));
	for (auto &v : g.u)
		if (!(in >> v))
			throw SyntaxError("grid has fewer values than nt*nx", 0);
	g.validate();
	return g;
}

void save_grid(const GridSolution &g, const std::string &path)
{
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw Error("IOError", "cannot write " + path);
	out << std::setprecision(17);
	out << g.t0 << " " << g.t1 << " " << g.nt << " " << g.x0 << " " << g.x1 << " " << g.nx << "\n";
	for (int i = 0; i < g.nt; ++i)
	{
		for (int j = 0; j < g.nx; ++j)
			out << (j ? " " : "") << g.at(i, j);
		out << "\n";
	}
}

} // namespace bkdv
