#pragma once

#include "bkdv/expr.hpp"

namespace bkdv {

struct Node
{
	Kind kind = Kind::Const;
	VarKind var = VarKind::T;
	Fn fn = Fn::Exp;
	int order = 0;
	Rational value;
	std::string name;
	std::vector<Expr> args;
	std::size_t hash = 0;
	bool canonical = false;
};

struct ExprBuilder
{
	static Expr make(Node &&n, bool canonical = false);
	static const std::shared_ptr<const Node> &ptr(const Expr &e) { return e.node_; }
};

} // namespace bkdv
