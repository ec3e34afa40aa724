// Command-line front end: gauge, classify, verify, transform, reduce and
// solve-affine on equation files.
//
// Exit codes: 0 success, 2 usage, 3 unreadable or malformed input,
// 4 domain errors raised by the library.

#include "bkdv/classify.hpp"
#include "bkdv/equivalence.hpp"
#include "bkdv/json.hpp"
#include "bkdv/reduction.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>

using namespace bkdv;

namespace {

constexpr int kUsage = 2, kParse = 3, kDomain = 4;

GaugedEquation require_gauged(const std::string &path)
{
	auto v = load(path);
	if (auto *g = std::get_if<GaugedEquation>(&v))
		return *g;
	return as_gauged(std::get<Equation>(v));
}

std::string join_k(const Json &k)
{
	std::ostringstream s;
	s << "(" << k[0].get<int>() << "," << k[1].get<int>() << "," << k[2].get<int>() << ")";
	return s.str();
}

std::string generator_text(const Json &g)
{
	VectorField q{parse(g["tau"].get<std::string>()), parse(g["zeta"].get<std::string>()),
	              parse(g["chi"].get<std::string>())};
	return q.str();
}

void print_classification(const Json &j)
{
	std::cout << "Case " << j["case"].get<int>() << " (" << (j["canonical"].get<bool>() ? "canonical" : "equivalent")
	          << "), r=" << j["r"].get<int>() << ", dim g = " << j["dim"].get<int>() << ", k=" << join_k(j["k"])
	          << "\n";
	std::cout << "row " << j["label"].get<std::string>() << "\n";
	if (!j["constants"].empty())
	{
		std::cout << "constants:";
		for (const auto &[name, value] : j["constants"].items())
			std::cout << " " << name << " = " << value.get<std::string>() << ";";
		std::cout << "\n";
	}
	if (!j["generators"].empty())
	{
		std::cout << (j["basis_complete"].get<bool>() ? "generators:\n" : "generators (partial):\n");
		for (const auto &g : j["generators"])
			std::cout << "  " << generator_text(g) << "\n";
	}
	std::cout << "maximal: " << (j["maximal"].get<bool>() ? "certified" : "not certified") << "\n";
}

void print_reduction(const Json &j)
{
	std::cout << "subalgebra: " << j["subalgebra"].get<std::string>() << "\n";
	std::cout << "ansatz: u = " << j["ansatz"].get<std::string>();
	if (!j["omega"].is_null())
		std::cout << ", w = " << j["omega"].get<std::string>();
	std::cout << "\n";
	std::cout << "reduced: " << j["reduced"].get<std::string>() << " = 0\n";
	if (j["omega"].is_null())
	{
		if (j["identically"].get<bool>())
			std::cout << "roots: every phi\n";
		else if (j["no_real_root"].get<bool>())
			std::cout << "roots: none real\n";
		else
			for (const auto &u : j["solutions"])
				std::cout << "solution: u = " << u.get<std::string>() << "\n";
	}
}

} // namespace

int main(int argc, char **argv)
{
	CLI::App app{"Group classification toolkit for general Burgers-KdV equations"};
	app.require_subcommand(1);
	bool json = false;

	std::string eq_path, trans_path, out_path, generator, subalgebra, nu_text = "1";
	double phi1 = 0, phi0 = 0, t0 = 0, t1 = 1, x0 = -1, x1 = 1;
	int steps = 256, nx = 129;

	auto *gauge_cmd = app.add_subcommand("gauge", "Map an equation to C = 1, A1 = 0 and print the transformation record");
	gauge_cmd->add_option("equation", eq_path, "Equation file")->required();
	gauge_cmd->add_option("--out", out_path, "Write the gauged equation file here");

	auto *classify_cmd = app.add_subcommand("classify", "Classify the Lie symmetries of an equation");
	classify_cmd->add_option("equation", eq_path, "Equation file")->required();
	classify_cmd->add_flag("--json", json, "Print JSON");

	auto *verify_cmd = app.add_subcommand("verify", "Test a generator against the classifying equations");
	verify_cmd->add_option("equation", eq_path, "Gauged equation file")->required();
	verify_cmd->add_option("--generator", generator, "Generator such as \"D(t^2)+S(t)\"")->required();
	verify_cmd->add_flag("--json", json, "Print JSON");

	auto *transform_cmd = app.add_subcommand("transform", "Apply an equivalence transformation");
	transform_cmd->add_option("equation", eq_path, "Gauged equation file")->required();
	transform_cmd->add_option("transformation", trans_path, "Transformation file with T, X1, X0")->required();
	transform_cmd->add_option("--out", out_path, "Write the image equation here");
	transform_cmd->add_flag("--json", json, "Print JSON");

	auto *reduce_cmd = app.add_subcommand("reduce", "Lie reduction with a one- or two-dimensional subalgebra");
	reduce_cmd->add_option("equation", eq_path, "Gauged equation file")->required();
	reduce_cmd->add_option("--subalgebra", subalgebra, "\"S(1)\" or \"D(1),S(1)\" style label")->required();
	reduce_cmd->add_option("--nu", nu_text, "nu for <D(1), D(t)-S(1/nu)>");
	reduce_cmd->add_flag("--json", json, "Print JSON");

	auto *solve_cmd = app.add_subcommand("solve-affine", "Integrate the ansatz u = phi1(t) x + phi0(t)");
	solve_cmd->add_option("equation", eq_path, "Equation file")->required();
	solve_cmd->add_option("--phi1", phi1, "phi1 at t0");
	solve_cmd->add_option("--phi0", phi0, "phi0 at t0");
	solve_cmd->add_option("--t0", t0, "Start time");
	solve_cmd->add_option("--t1", t1, "End time");
	solve_cmd->add_option("--steps", steps, "RK4 steps, at least 64");
	solve_cmd->add_option("--x0", x0, "Left end of the x grid");
	solve_cmd->add_option("--x1", x1, "Right end of the x grid");
	solve_cmd->add_option("--nx", nx, "Number of x nodes");
	solve_cmd->add_option("--out", out_path, "Grid file to write")->required();
	solve_cmd->add_flag("--json", json, "Print JSON");

	try
	{
		app.parse(argc, argv);
	}
	catch (const CLI::ParseError &e)
	{
		return app.exit(e) == 0 ? 0 : kUsage;
	}

	try
	{
		if (*gauge_cmd)
		{
			GaugeResult g = gauge(load_equation(eq_path));
			if (!out_path.empty())
				save(g.eq, out_path);
			std::cout << to_json(g).dump(2) << "\n";
		}
		else if (*classify_cmd)
		{
			auto v = load(eq_path);
			GaugedEquation eq = std::holds_alternative<GaugedEquation>(v) ? std::get<GaugedEquation>(v)
			                                                                : gauge(std::get<Equation>(v)).eq;
			Json j = to_json(classify(eq));
			if (json)
				std::cout << j.dump(2) << "\n";
			else
				print_classification(j);
		}
		else if (*verify_cmd)
		{
			Json j = symmetry_report(parse_generator(generator), require_gauged(eq_path));
			if (json)
				std::cout << j.dump(2) << "\n";
			else
			{
				for (const auto &r : j["residuals"])
					std::cout << r["name"].get<std::string>() << ": " << r["test"].get<std::string>() << "\n";
				std::cout << j["verdict"].get<std::string>() << "\n";
			}
		}
		else if (*transform_cmd)
		{
			EquivTransformation g = load_transformation(trans_path);
			GaugedEquation image = apply_gauged(g, require_gauged(eq_path));
			if (!out_path.empty())
				save(image, out_path);
			if (json)
				std::cout << to_json(image).dump(2) << "\n";
			else if (out_path.empty())
				std::cout << format_equation(image.to_equation());
		}
		else if (*reduce_cmd)
		{
			GaugedEquation eq = require_gauged(eq_path);
			ReductionResult res = subalgebra.find(',') == std::string::npos
			                          ? reduce_1d(parse_reduction_1d(subalgebra), eq)
			                          : reduce_2d(parse_reduction_2d(subalgebra), eq, parse(nu_text));
			Json j = to_json(res);
			if (json)
				std::cout << j.dump(2) << "\n";
			else
				print_reduction(j);
		}
		else if (*solve_cmd)
		{
			AffineSolution sol = solve_affine(affine_system(load_equation(eq_path)), phi1, phi0, t0, t1, steps, x0, x1, nx);
			save_grid(sol.grid, out_path);
			Json j{{"out", out_path},
			       {"nt", sol.grid.nt},
			       {"nx", sol.grid.nx},
			       {"t1", sol.t.back()},
			       {"phi1", sol.phi1.back()},
			       {"phi0", sol.phi0.back()}};
			if (json)
				std::cout << j.dump(2) << "\n";
			else
				std::cout << "wrote " << sol.grid.nt << "x" << sol.grid.nx << " grid to " << out_path
				          << "; at t = " << sol.t.back() << ": phi1 = " << sol.phi1.back()
				          << ", phi0 = " << sol.phi0.back() << "\n";
		}
	}
	catch (const Error &e)
	{
		std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
		const std::string &k = e.kind();
		bool parse_error = k == "SyntaxError" || k == "MissingKey" || k == "UnknownFunction" || k == "IOError";
		return parse_error ? kParse : kDomain;
	}
	catch (const std::exception &e)
	{
		std::cerr << "error: " << e.what() << "\n";
		return kDomain;
	}
	return 0;
}
