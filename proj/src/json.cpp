#include "bkdv/json.hpp"

#include <algorithm>

namespace bkdv {

namespace {

Json params_json(const ParamValues &pv)
{
	Json out = Json::object();
	for (const auto &[k, v] : pv)
		out[k] = v;
	return out;
}

} // namespace

int case_number(CaseId id)
{
	const auto &all = all_cases();
	return int(std::find(all.begin(), all.end(), id) - all.begin()) + 1;
}

bool is_canonical(const ClassificationResult &res)
{
	const auto &m = res.matched_forms;
	return res.basis_complete && std::find(m.begin(), m.end(), res.id) != m.end();
}

Json to_json(const VectorField &q)
{
	VectorField s = q.simplified();
	return Json{{"tau", s.tau.pretty()}, {"zeta", s.zeta.pretty()}, {"chi", s.chi.pretty()}};
}

Json to_json(const Equation &eq)
{
	Json a = Json::array();
	for (const auto &e : eq.A)
		a.push_back(e.pretty());
	return Json{{"r", eq.r}, {"C", eq.C.pretty()}, {"A", a}, {"B", eq.B.pretty()}, {"params", params_json(eq.params)}};
}

Json to_json(const GaugedEquation &eq) { return to_json(eq.to_equation()); }

Json to_json(const EquivTransformation &g)
{
	return Json{{"T", g.T.pretty()}, {"X1", g.X1.pretty()}, {"X0", g.X0.pretty()}};
}

Json to_json(const GaugeResult &g)
{
	return Json{{"equation", to_json(g.eq)},
	            {"c_step", {{"X", g.c_step.X.pretty()}, {"Xinv", g.c_step.Xinv.pretty()}}},
	            {"a1_step",
	             {{"T", g.a1_step.T.pretty()},
	              {"X1", g.a1_step.X1.pretty()},
	              {"X0", g.a1_step.X0.pretty()},
	              {"U0", g.a1_step.U0.pretty()}}}};
}

Json to_json(const ClassificationResult &res)
{
	Json constants = Json::object();
	for (const auto &[name, value] : res.constants)
		constants[name] = value.pretty();
	Json gens = Json::array();
	for (const auto &q : res.basis)
		gens.push_back(to_json(q));
	return Json{{"case", case_number(res.id)},
	            {"label", case_label(res.id)},
	            {"canonical", is_canonical(res)},
	            {"r", res.r},
	            {"constants", constants},
	            {"generators", gens},
	            {"basis_complete", res.basis_complete},
	            {"dim", res.dim},
	            {"k", {res.k.k1, res.k.k2, res.k.k3}},
	            {"maximal", res.maximal == Maximality::Certified}};
}

Json to_json(const ReductionResult &res)
{
	Json out{{"subalgebra", res.label}, {"ansatz", res.ansatz.pretty()}};
	out["omega"] = res.omega ? Json(res.omega->pretty()) : Json(nullptr);
	out["reduced"] = res.reduced.pretty();
	out["factor"] = res.factor.pretty();
	if (!res.omega)
	{
		out["roots"] = res.roots;
		Json sols = Json::array();
		for (const auto &u : res.solutions)
			sols.push_back(u.pretty());
		out["solutions"] = sols;
		out["identically"] = res.identically;
		out["no_real_root"] = res.no_real_root;
	}
	return out;
}

Json symmetry_report(const VectorField &q, const GaugedEquation &eq)
{
	Residuals res = determining_residuals(q, eq);
	std::vector<ZeroTest> tests = residual_tests(res, eq.params);
	std::vector<std::string> names;
	for (int j = 2; j <= eq.r; ++j)
		names.push_back("R" + std::to_string(j));
	names.push_back("R0");
	names.push_back("RB");
	Json residuals = Json::array();
	const auto all = res.all();
	bool unknown = false, nonzero = false;
	for (std::size_t i = 0; i < tests.size(); ++i)
	{
		residuals.push_back({{"name", names[i]}, {"residual", all[i].pretty()}, {"test", to_string(tests[i])}});
		nonzero = nonzero || tests[i] == ZeroTest::NonZero;
		unknown = unknown || tests[i] == ZeroTest::Unknown;
	}
	Verdict v = nonzero ? Verdict::No : unknown ? Verdict::Unknown : Verdict::Yes;
	return Json{{"generator", to_json(q)}, {"residuals", residuals}, {"verdict", to_string(v)}};
}

} // namespace bkdv
