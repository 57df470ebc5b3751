// fkent: command-line driver for the FK chain entanglement pipeline.
//
//   fkent sweep-k        ground-state measures along a K grid (fixed lambda)
//   fkent sweep-lambda   ground-state measures along a lambda grid (fixed K)
//   fkent evolve         RK4 evolution of |1> and <C>(t)
//   fkent check-relation closed forms vs pair sums on seeded random states
//   fkent relax          relaxed configuration at one K
//   fkent ground         relaxed configuration, potential and ground state
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure.

#include "fkent/fkent.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>

namespace
{

enum ExitCode
{
	exit_ok = 0,
	exit_usage = 1,
	exit_numeric = 2,
};

struct Cli
{
	fkent::RunConfig cfg;
	int m = 14;
	std::size_t sites = 0;
	std::string out;
};

void add_options(CLI::App& app, Cli& cli)
{
	auto& c = cli.cfg;
	app.add_option("--m", cli.m, "Fibonacci index; N = F_m, L = F_{m-1}")->check(CLI::Range(4, fkent::max_fibonacci_index));
	app.add_option("--sites", cli.sites, "number of sites N (must be a Fibonacci number; overrides --m)");
	app.add_option("--K", c.coupling, "coupling K for sweep-lambda, evolve, relax, ground");
	app.add_option("--lambda", c.lambda, "on-site amplitude for sweep-k, evolve, ground");
	app.add_option("--k-min", c.k_grid.min, "K grid start");
	app.add_option("--k-max", c.k_grid.max, "K grid end");
	app.add_option("--k-steps", c.k_grid.steps, "K grid points");
	app.add_option("--lambda-min", c.lambda_grid.min, "lambda grid start");
	app.add_option("--lambda-max", c.lambda_grid.max, "lambda grid end");
	app.add_option("--lambda-steps", c.lambda_grid.steps, "lambda grid points");
	app.add_option("--dt", c.dt, "RK4 time step");
	app.add_option("--steps", c.steps, "number of RK4 steps");
	app.add_option("--record-every", c.record_every, "record every n-th step");
	app.add_option("--seed", c.seed, "PRNG seed for check-relation");
	app.add_option("--states", c.states, "random states for check-relation");
	app.add_option("--tol", c.tol, "relaxation gradient tolerance (sup norm)");
	app.add_option("--out", cli.out, "output CSV path (default: stdout)");
}

int run(const std::string& command, const Cli& cli, std::ostream& os)
{
	const auto& cfg = cli.cfg;
	if (command == "sweep-k" || command == "sweep-lambda")
	{
		const auto table = command == "sweep-k" ? fkent::sweep_k(cfg) : fkent::sweep_lambda(cfg);
		fkent::write_sweep_csv(os, cfg, command, table);
		return table.ok() ? exit_ok : exit_numeric;
	}
	if (command == "evolve")
	{
		const auto r = fkent::run_evolve(cfg);
		fkent::write_trajectory_csv(os, cfg, r);
		if (!r.ok())
			std::cerr << "fkent: " << r.message << '\n';
		return r.ok() ? exit_ok : exit_numeric;
	}
	if (command == "check-relation")
	{
		const auto r = fkent::check_relation(cfg);
		fkent::write_relation_csv(os, cfg, r);
		std::cerr << "check-relation: max <C> residual " << fkent::csv::number(r.max_concurrence_residual)
		          << ", max <C^2> residual " << fkent::csv::number(r.max_relation_residual) << " -> "
		          << (r.ok() ? "PASS" : "FAIL") << '\n';
		if (!r.ok())
			std::cerr << "fkent: residual above " << fkent::relation_tol << " at seed " << r.seed << ", index "
			          << r.first_failure << '\n';
		return r.ok() ? exit_ok : exit_numeric;
	}
	if (command == "relax" || command == "ground")
	{
		const auto r = fkent::run_ground(cfg, command == "ground");
		if (command == "relax")
			fkent::write_relax_csv(os, cfg, r);
		else
			fkent::write_ground_csv(os, cfg, r);
		if (!r.ok())
			std::cerr << "fkent: " << r.message << '\n';
		return r.ok() ? exit_ok : exit_numeric;
	}
	return exit_usage;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Frenkel-Kontorova chain: relaxation, ground-state entanglement and dynamics"};
	app.require_subcommand(1);
	Cli cli;
	add_options(app, cli);
	const std::pair<const char*, const char*> commands[] = {
	    {"sweep-k", "ground-state entanglement over the K grid (continuation relaxation)"},
	    {"sweep-lambda", "ground-state entanglement over the lambda grid at fixed K"},
	    {"evolve", "RK4 time evolution from a single-site state"},
	    {"check-relation", "closed forms vs pair sums on seeded random states"},
	    {"relax", "relaxed chain positions at fixed K"},
	    {"ground", "relaxed chain, on-site potential and electron ground state"},
	};
	for (const auto& [name, help] : commands)
		app.add_subcommand(name, help)->fallthrough();

	try
	{
		app.parse(argc, argv);
	}
	catch (const CLI::CallForHelp& e)
	{
		return app.exit(e);
	}
	catch (const CLI::ParseError& e)
	{
		app.exit(e);
		return exit_usage;
	}

	try
	{
		if (cli.sites != 0)
		{
			const int m = fkent::fibonacci_index(cli.sites);
			if (m < 4)
				throw fkent::DomainError("--sites " + std::to_string(cli.sites) + " is not a Fibonacci number >= 3");
			if (app.count("--m") > 0 && m != cli.m)
				throw fkent::DomainError("--sites and --m disagree");
			cli.m = m;
		}
		cli.cfg.m = cli.m;
		const std::string command = app.get_subcommands().front()->get_name();

		std::unique_ptr<std::ofstream> file;
		if (!cli.out.empty())
		{
			file = std::make_unique<std::ofstream>(cli.out, std::ios::binary);
			if (!*file)
				throw fkent::DomainError("cannot open " + cli.out + " for writing");
		}
		return run(command, cli, file ? *file : std::cout);
	}
	catch (const fkent::DomainError& e)
	{
		std::cerr << "fkent: " << e.what() << '\n';
		return exit_usage;
	}
	catch (const std::exception& e)
	{
		std::cerr << "fkent: " << e.what() << '\n';
		return exit_numeric;
	}
}
