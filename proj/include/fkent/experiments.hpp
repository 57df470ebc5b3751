#ifndef FKENT_EXPERIMENTS_HPP
#define FKENT_EXPERIMENTS_HPP

// Parameter sweeps over the full pipeline and their CSV serialization.
//
// CSV layout: a '#' provenance line carrying the seed and the canonical
// parameter string, a header row, then data rows. Floats are written in
// scientific notation with 17 significant digits; lines end in '\n'.

#include "fkent/chain.hpp"
#include "fkent/dynamics.hpp"
#include "fkent/electron.hpp"
#include "fkent/measures.hpp"
#include "fkent/relax.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace fkent
{

/// Uniform grid of `steps` points from min to max inclusive.
struct Grid
{
	double min = 0.0;
	double max = 0.0;
	std::size_t steps = 1;

	std::vector<double> values() const
	{
		if (steps == 0)
			throw DomainError("grid: need at least one point");
		if (steps > 1 && !(max > min))
			throw DomainError("grid: max must exceed min");
		std::vector<double> v(steps);
		if (steps == 1)
		{
			v[0] = min;
			return v;
		}
		const double h = (max - min) / static_cast<double>(steps - 1);
		for (std::size_t i = 0; i < steps; ++i)
			v[i] = min + static_cast<double>(i) * h;
		v.back() = max;
		return v;
	}
};

struct RunConfig
{
	int m = 14; // N = F_m = 377
	double coupling = 0.1;
	double lambda = 3.0;
	Grid k_grid{0.0, 0.30, 61};
	Grid lambda_grid{0.0, 6.0, 61};
	double dt = 0.01;
	std::size_t steps = 20000;
	std::size_t record_every = 10;
	std::uint64_t seed = 0;
	std::size_t states = 1000;
	double tol = 1e-12;
	std::size_t max_iters = 10'000'000;

	RelaxOptions relax_options() const
	{
		RelaxOptions o;
		o.grad_tol = tol;
		o.max_iters = max_iters;
		return o;
	}
};

namespace csv
{

inline std::string number(double x)
{
	if (std::isnan(x))
		return "nan";
	if (std::isinf(x))
		return x > 0 ? "inf" : "-inf";
	char buf[40];
	std::snprintf(buf, sizeof buf, "%.16e", x);
	return buf;
}

inline std::string number(std::size_t x) { return std::to_string(x); }

/// key=value pairs joined by ';' in a fixed order.
inline std::string canonical_params(const RunConfig& c, std::string_view command)
{
	const ChainGeometry g(c.m);
	std::string s;
	auto put = [&s](std::string_view key, const std::string& value) {
		if (!s.empty())
			s += ';';
		s += key;
		s += '=';
		s += value;
	};
	put("cmd", std::string(command));
	put("m", std::to_string(c.m));
	put("N", number(g.n_sites()));
	put("L", number(g.n_wells()));
	put("K", number(c.coupling));
	put("lambda", number(c.lambda));
	put("k_min", number(c.k_grid.min));
	put("k_max", number(c.k_grid.max));
	put("k_steps", number(c.k_grid.steps));
	put("lambda_min", number(c.lambda_grid.min));
	put("lambda_max", number(c.lambda_grid.max));
	put("lambda_steps", number(c.lambda_grid.steps));
	put("dt", number(c.dt));
	put("steps", number(c.steps));
	put("record_every", number(c.record_every));
	put("states", number(c.states));
	put("tol", number(c.tol));
	return s;
}

inline void write_provenance(std::ostream& os, const RunConfig& c, std::string_view command)
{
	os << "# fk-entangle v1, seed=" << c.seed << ", params=" << canonical_params(c, command) << '\n';
}

} // namespace csv

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn)
{
	const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
	if (workers <= 1)
	{
		for (std::size_t i = 0; i < n; ++i)
			fn(i);
		return;
	}
	std::atomic<std::size_t> next{0};
	std::vector<std::thread> pool;
	pool.reserve(workers);
	for (std::size_t w = 0; w < workers; ++w)
		pool.emplace_back([&] {
			for (std::size_t i = next++; i < n; i = next++)
				fn(i);
		});
	for (auto& t : pool)
		t.join();
}

struct SweepRecord
{
	std::string status = "ok";
	double coupling = 0.0;
	double lambda = 0.0;
	std::size_t n_sites = 0;
	double energy = std::numeric_limits<double>::quiet_NaN();
	double avg_concurrence = std::numeric_limits<double>::quiet_NaN();
	double avg_sq_concurrence = std::numeric_limits<double>::quiet_NaN();
	double participation_ratio = std::numeric_limits<double>::quiet_NaN();
	double hull_gap = std::numeric_limits<double>::quiet_NaN();
	std::size_t relax_iterations = 0;
	bool degenerate = false;

	bool ok() const noexcept { return status == "ok"; }
};

struct SweepTable
{
	std::vector<SweepRecord> rows;

	bool ok() const noexcept
	{
		return std::all_of(rows.begin(), rows.end(), [](const SweepRecord& r) { return r.ok(); });
	}
};

inline void write_sweep_csv(std::ostream& os, const RunConfig& c, std::string_view command, const SweepTable& t)
{
	csv::write_provenance(os, c, command);
	os << "status,K,lambda,N,E0,avg_concurrence,avg_sq_concurrence,participation_ratio,hull_gap,relax_iterations,"
	      "degenerate\n";
	for (const auto& r : t.rows)
		os << r.status << ',' << csv::number(r.coupling) << ',' << csv::number(r.lambda) << ',' << r.n_sites << ','
		   << csv::number(r.energy) << ',' << csv::number(r.avg_concurrence) << ','
		   << csv::number(r.avg_sq_concurrence) << ',' << csv::number(r.participation_ratio) << ','
		   << csv::number(r.hull_gap) << ',' << r.relax_iterations << ',' << (r.degenerate ? 1 : 0) << '\n';
}

namespace detail
{

inline void fill_ground(SweepRecord& r, const Configuration& c)
{
	try
	{
		const auto gs = ground_state(hamiltonian(potential(c, r.lambda)));
		const auto s = summarize(gs.psi);
		r.energy = gs.energy;
		r.degenerate = gs.degenerate;
		r.avg_concurrence = s.avg_concurrence;
		r.avg_sq_concurrence = s.avg_sq_concurrence;
		r.participation_ratio = s.participation_ratio;
	}
	catch (const NumericError&)
	{
		r.status = "eigen_failed";
	}
}

} // namespace detail

/// Ground-state measures along the K grid at fixed lambda. Configurations
/// follow the K grid by continuation; a failed relaxation is marked in its
/// row and its last iterate seeds the next K.
inline SweepTable sweep_k(const RunConfig& cfg)
{
	const ChainGeometry g(cfg.m);
	const auto ks = cfg.k_grid.values();
	for (std::size_t i = 1; i < ks.size(); ++i)
		if (!(ks[i] > ks[i - 1]))
			throw DomainError("sweep_k: K grid must be increasing");
	if (ks.front() < 0.0)
		throw DomainError("sweep_k: K must be >= 0");

	const auto opts = cfg.relax_options();
	SweepTable t;
	std::vector<Configuration> configs;
	Configuration seed = initial_configuration(g);
	for (double k : ks)
	{
		SweepRecord r;
		r.coupling = k;
		r.lambda = cfg.lambda;
		r.n_sites = g.n_sites();
		try
		{
			auto rep = relax(g, k, opts, seed);
			r.relax_iterations = rep.iterations;
			seed = rep.config;
		}
		catch (const ConvergenceError& e)
		{
			r.status = "relax_failed";
			r.relax_iterations = e.last_iterate().iterations;
			seed = e.last_iterate().config;
		}
		r.hull_gap = hull_gap(seed);
		configs.push_back(seed);
		t.rows.push_back(std::move(r));
	}
	parallel_for(t.rows.size(), [&](std::size_t i) {
		if (t.rows[i].ok())
			detail::fill_ground(t.rows[i], configs[i]);
	});
	return t;
}

/// Ground-state measures along the lambda grid for one relaxed configuration
/// at cfg.coupling (relaxed from equal spacing).
inline SweepTable sweep_lambda(const RunConfig& cfg)
{
	const ChainGeometry g(cfg.m);
	const auto lambdas = cfg.lambda_grid.values();
	if (!(cfg.coupling >= 0.0))
		throw DomainError("sweep_lambda: K must be >= 0");

	std::string status = "ok";
	std::size_t iterations = 0;
	Configuration config = initial_configuration(g);
	try
	{
		auto rep = relax(g, cfg.coupling, cfg.relax_options(), config);
		iterations = rep.iterations;
		config = rep.config;
	}
	catch (const ConvergenceError& e)
	{
		status = "relax_failed";
		iterations = e.last_iterate().iterations;
		config = e.last_iterate().config;
	}
	const double gap = hull_gap(config);

	SweepTable t;
	t.rows.resize(lambdas.size());
	for (std::size_t i = 0; i < lambdas.size(); ++i)
	{
		auto& r = t.rows[i];
		r.status = status;
		r.coupling = cfg.coupling;
		r.lambda = lambdas[i];
		r.n_sites = g.n_sites();
		r.hull_gap = gap;
		r.relax_iterations = iterations;
	}
	parallel_for(t.rows.size(), [&](std::size_t i) {
		if (t.rows[i].ok())
			detail::fill_ground(t.rows[i], config);
	});
	return t;
}

struct EvolveResult
{
	Trajectory trajectory;
	std::string status = "ok";
	std::string message;
	bool ok() const noexcept { return status == "ok"; }
};

/// Evolution from |1> on the chain relaxed at cfg.coupling with amplitude cfg.lambda.
inline EvolveResult run_evolve(const RunConfig& cfg, const WaveFunction* initial = nullptr)
{
	const ChainGeometry g(cfg.m);
	EvolveResult out;
	Configuration config = initial_configuration(g);
	try
	{
		config = relax(g, cfg.coupling, cfg.relax_options(), config).config;
	}
	catch (const ConvergenceError& e)
	{
		out.status = "relax_failed";
		out.message = e.what();
		return out;
	}
	EvolutionSpec spec;
	spec.dt = cfg.dt;
	spec.n_steps = cfg.steps;
	spec.record_every = cfg.record_every;
	spec.initial = initial ? *initial : WaveFunction::basis(g.n_sites(), 0);
	try
	{
		out.trajectory = evolve(spec, potential(config, cfg.lambda));
	}
	catch (const NormDriftError& e)
	{
		out.trajectory = e.partial();
		out.status = "norm_drift";
		out.message = e.what();
	}
	return out;
}

inline void write_trajectory_csv(std::ostream& os, const RunConfig& c, const EvolveResult& r)
{
	csv::write_provenance(os, c, "evolve");
	os << "t,avg_concurrence,participation_ratio,norm\n";
	for (const auto& p : r.trajectory.points)
		os << csv::number(p.time) << ',' << csv::number(p.avg_concurrence) << ','
		   << csv::number(p.participation_ratio) << ',' << csv::number(p.norm) << '\n';
	os << "# status=" << r.status;
	if (!r.message.empty())
		os << ", " << r.message;
	os << '\n';
}

/// SplitMix64 (Steele, Lea, Flood). Small, fast and splittable by seeding.
class SplitMix64
{
public:
	explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

	std::uint64_t operator()() noexcept
	{
		std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
		z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
		z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
		return z ^ (z >> 31);
	}

	/// Uniform in (0, 1].
	double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

	/// Standard normal by Box-Muller (one draw per call).
	double normal() noexcept
	{
		const double u1 = uniform();
		const double u2 = uniform();
		return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
	}

	/// Independent stream for item `index`.
	static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) noexcept
	{
		SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ull * (index + 1)));
		return SplitMix64(mix());
	}

private:
	std::uint64_t state_;
};

/// Unit-norm state with moduli |g_n| / sqrt(sum g^2) for Gaussian g and
/// uniformly random phases.
inline WaveFunction random_state(std::size_t n, std::uint64_t seed, std::uint64_t index)
{
	auto rng = SplitMix64::stream(seed, index);
	std::vector<double> mod(n);
	double s = 0.0;
	for (auto& a : mod)
	{
		a = std::abs(rng.normal());
		s += a * a;
	}
	const double scale = 1.0 / std::sqrt(s);
	std::vector<Complex> psi(n);
	for (std::size_t i = 0; i < n; ++i)
		psi[i] = std::polar(mod[i] * scale, 2.0 * std::numbers::pi * rng.uniform());
	return WaveFunction(std::move(psi));
}

struct RelationRow
{
	std::size_t index = 0;
	std::string kind;
	double avg_concurrence = 0.0;       // closed form
	double avg_concurrence_pairs = 0.0; // O(N^2) pair sum
	double avg_sq_pairs = 0.0;          // O(N^2) pair sum of C_ij^2
	double avg_sq_relation = 0.0;       // from the participation ratio
	double participation_ratio = 0.0;

	double concurrence_residual() const noexcept { return std::abs(avg_concurrence - avg_concurrence_pairs); }
	double relation_residual() const noexcept { return std::abs(avg_sq_pairs - avg_sq_relation); }
};

struct RelationReport
{
	std::vector<RelationRow> rows;
	std::uint64_t seed = 0;
	double max_concurrence_residual = 0.0;
	double max_relation_residual = 0.0;
	/// First row whose residual exceeds the tolerance, if any.
	std::size_t first_failure = std::numeric_limits<std::size_t>::max();

	bool ok() const noexcept { return first_failure == std::numeric_limits<std::size_t>::max(); }
};

inline RelationRow relation_row(std::size_t index, std::string kind, const WaveFunction& psi)
{
	RelationRow r;
	r.index = index;
	r.kind = std::move(kind);
	r.avg_concurrence = average_concurrence(psi);
	r.avg_concurrence_pairs = pair_sum_average_concurrence(psi);
	r.avg_sq_pairs = pair_sum_average_squared_concurrence(psi);
	r.participation_ratio = participation_ratio(psi);
	r.avg_sq_relation = squared_concurrence_from_participation(r.participation_ratio, psi.size());
	return r;
}

/// Checks the closed forms for <C> and <C^2> against pair sums on |1>, the
/// uniform state and cfg.states seeded random states.
inline RelationReport check_relation(const RunConfig& cfg)
{
	const ChainGeometry g(cfg.m);
	const std::size_t n = g.n_sites();
	RelationReport rep;
	rep.seed = cfg.seed;
	rep.rows.resize(cfg.states + 2);
	rep.rows[0] = relation_row(0, "basis", WaveFunction::basis(n, 0));
	rep.rows[1] = relation_row(1, "uniform", WaveFunction::uniform(n));
	parallel_for(cfg.states, [&](std::size_t i) {
		rep.rows[i + 2] = relation_row(i + 2, "random", random_state(n, cfg.seed, i));
	});
	for (const auto& r : rep.rows)
	{
		rep.max_concurrence_residual = std::max(rep.max_concurrence_residual, r.concurrence_residual());
		rep.max_relation_residual = std::max(rep.max_relation_residual, r.relation_residual());
		if (rep.ok() && !(r.concurrence_residual() <= relation_tol && r.relation_residual() <= relation_tol))
			rep.first_failure = r.index;
	}
	return rep;
}

inline void write_relation_csv(std::ostream& os, const RunConfig& c, const RelationReport& r)
{
	csv::write_provenance(os, c, "check-relation");
	os << "index,kind,avg_concurrence,avg_concurrence_pairs,avg_sq_concurrence_pairs,avg_sq_concurrence_relation,"
	      "participation_ratio\n";
	for (const auto& row : r.rows)
		os << row.index << ',' << row.kind << ',' << csv::number(row.avg_concurrence) << ','
		   << csv::number(row.avg_concurrence_pairs) << ',' << csv::number(row.avg_sq_pairs) << ','
		   << csv::number(row.avg_sq_relation) << ',' << csv::number(row.participation_ratio) << '\n';
	os << "# max_concurrence_residual=" << csv::number(r.max_concurrence_residual)
	   << ", max_relation_residual=" << csv::number(r.max_relation_residual) << ", status=" << (r.ok() ? "pass" : "fail");
	if (!r.ok())
		os << ", seed=" << r.seed << ", index=" << r.first_failure;
	os << '\n';
}

/// Relaxed configuration and, with a potential, its ground state.
struct GroundResult
{
	std::string status = "ok";
	std::string message;
	RelaxReport relax;
	OnSitePotential potential;
	GroundState ground;
	EntanglementSummary summary;
	bool ok() const noexcept { return status == "ok"; }
};

inline GroundResult run_ground(const RunConfig& cfg, bool solve_electron = true)
{
	const ChainGeometry g(cfg.m);
	GroundResult out{"ok", {}, RelaxReport{initial_configuration(g), 0.0, 0.0, 0}, {}, {}, {}};
	try
	{
		out.relax = relax(g, cfg.coupling, cfg.relax_options(), initial_configuration(g));
	}
	catch (const ConvergenceError& e)
	{
		out.status = "relax_failed";
		out.message = e.what();
		out.relax = e.last_iterate();
		return out;
	}
	if (!solve_electron)
		return out;
	out.potential = potential(out.relax.config, cfg.lambda);
	try
	{
		out.ground = ground_state(hamiltonian(out.potential));
		out.summary = summarize(out.ground.psi);
	}
	catch (const NumericError& e)
	{
		out.status = "eigen_failed";
		out.message = e.what();
	}
	return out;
}

inline void write_relax_csv(std::ostream& os, const RunConfig& c, const GroundResult& r)
{
	csv::write_provenance(os, c, "relax");
	os << "n,x,frac_x\n";
	const auto& conf = r.relax.config;
	for (std::size_t i = 0; i < conf.size(); ++i)
		os << (i + 1) << ',' << csv::number(conf[i]) << ',' << csv::number(fractional_part(conf[i])) << '\n';
	os << "# status=" << r.status << ", energy=" << csv::number(r.relax.final_energy)
	   << ", grad_norm=" << csv::number(r.relax.final_grad_norm) << ", iterations=" << r.relax.iterations
	   << ", hull_gap=" << csv::number(hull_gap(conf)) << '\n';
}

inline void write_ground_csv(std::ostream& os, const RunConfig& c, const GroundResult& r)
{
	csv::write_provenance(os, c, "ground");
	os << "n,x,V,psi\n";
	const auto& conf = r.relax.config;
	const bool have_psi = r.ok();
	for (std::size_t i = 0; i < conf.size(); ++i)
		os << (i + 1) << ',' << csv::number(conf[i]) << ','
		   << csv::number(i < r.potential.size() ? r.potential[i] : std::numeric_limits<double>::quiet_NaN()) << ','
		   << csv::number(have_psi ? r.ground.psi[i].real() : std::numeric_limits<double>::quiet_NaN()) << '\n';
	os << "# status=" << r.status;
	if (have_psi)
		os << ", E0=" << csv::number(r.ground.energy) << ", avg_concurrence=" << csv::number(r.summary.avg_concurrence)
		   << ", avg_sq_concurrence=" << csv::number(r.summary.avg_sq_concurrence)
		   << ", participation_ratio=" << csv::number(r.summary.participation_ratio)
		   << ", hull_gap=" << csv::number(hull_gap(conf)) << ", degenerate=" << (r.ground.degenerate ? 1 : 0);
	else if (!r.message.empty())
		os << ", " << r.message;
	os << '\n';
}

} // namespace fkent

#endif // FKENT_EXPERIMENTS_HPP
