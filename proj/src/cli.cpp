#include "covhom/cli.hpp"

#include "covhom/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>

namespace covhom {

namespace {

constexpr double kConvexityTolerance = 1e-6;

void fail(RunResult& r, const std::string& path, const std::string& message) {
    r.errors.push_back({"tolerance", path, message});
}

std::string num(double v) { return format_number(v); }

void tolerance_records(RunResult& r, const ExperimentReport& rep) {
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
        const auto& p = rep.points[i];
        if (p.pass) continue;
        const std::string path = "experiment.points[" + std::to_string(i) + "]";
        if (!(p.final_error < rep.threshold))
            fail(r, path, "final error " + num(p.final_error) + " is not below " + num(rep.threshold));
        if (!p.monotone) fail(r, path, "errors do not decrease along the ladder");
        if (!p.fit.exact && !(p.fit.defined && p.fit.rate > 0.0)) fail(r, path, "no positive convergence rate");
    }
    if (!rep.spaces.pass) fail(r, "compute.spaces", "cover distortion does not shrink below tolerance");
    if (!rep.datum.pass) fail(r, "datum", "cover datum does not converge to the limit datum");
    if (rep.subcover) {
        const auto& c = *rep.subcover;
        if (!c.lift_pass) fail(r, "experiment.tolerances.lift", "lift residual " + num(c.lift_residual));
        if (!c.invariance_pass)
            fail(r, "experiment.tolerances.invariance", "invariance residual " + num(c.invariance_residual));
        if (!c.duality_pass)
            fail(r, "experiment.tolerances.duality", "duality residual " + num(c.duality_residual));
    }
}

std::size_t grid_nodes(const GridSpec& g, int dim) {
    double n = std::pow(static_cast<double>(g.points), dim);
    return n > 4e6 ? 0 : static_cast<std::size_t>(n);
}

void emit(RunResult& r, const ScenarioConfig& c, const std::string& name, bool is_json, const std::string& text) {
    if (is_json ? !c.output.json : !c.output.csv) return;
    r.artifacts.push_back(write_artifact(c.output.dir, name, text));
}

void grid_command(RunResult& r, const ScenarioConfig& c, const std::string& label) {
    const Scenario& s = c.scenario;
    const int dim = s.system.rank();
    if (grid_nodes(c.table_grid, dim) == 0)
        throw ConfigError("compute.table_grid", "grid has too many nodes for rank " + std::to_string(dim));
    const auto f = label == "alpha" ? make_alpha(s.system, s.minimax) : make_beta(s.system, s.beta_grid, s.minimax);
    const GridTable table = tabulate(*f, c.table_grid);
    GridSummary summary;
    summary.scenario = s.name;
    summary.label = label;
    summary.convexity_residual = midpoint_convexity_residual(table);
    summary.convexity_tolerance = kConvexityTolerance;
    summary.pass = summary.convexity_residual < kConvexityTolerance;
    emit(r, c, label + ".csv", false, grid_csv(table, label));
    emit(r, c, label + ".json", true, grid_json(table, summary));
    if (!summary.pass)
        fail(r, "compute.table_grid", label + " midpoint convexity residual " + num(summary.convexity_residual));
    r.summary = label + " table with " + std::to_string(table.size()) + " nodes, convexity residual " +
                num(summary.convexity_residual);
}

std::optional<MatpReport> maybe_matp(const ScenarioConfig& c) {
    if (!c.matp.enabled) return std::nullopt;
    const Scenario& s = c.scenario;
    const auto beta = make_beta(s.system, s.beta_grid, s.minimax);
    if (s.system.kind == SystemKind::Graph)
        return matp_check(GraphCover::maximal(s.system.graph), s.system.lagrangian, *beta, c.matp.options);
    return matp_check(*s.system.torus, *beta, c.matp.options);
}

void experiment_command(RunResult& r, const ScenarioConfig& c, bool subcover) {
    const Scenario& s = c.scenario;
    if (subcover && !s.subcover) throw ConfigError("cover.subcover", "required by the subcover command");
    const ExperimentReport rep = subcover ? run_subcover_experiment(s) : run_experiment(s);
    const auto matp = maybe_matp(c);
    const bool pass = rep.pass && (!matp || matp->pass);
    emit(r, c, "experiment.csv", false, experiment_csv(rep));
    emit(r, c, "report.json", true, experiment_json(rep, matp, pass));
    tolerance_records(r, rep);
    if (matp && !matp->pass)
        fail(r, "experiment.matp", "averaged action gap " + num(matp->delta.empty() ? NAN : matp->delta.back()) +
                                       (matp->decreasing ? "" : ", not decreasing"));
    r.summary = std::to_string(rep.rows.size()) + " rows, threshold " + num(rep.threshold);
    for (const auto& p : rep.points) r.summary += ", final error " + num(p.final_error);
}

void spaces_command(RunResult& r, const ScenarioConfig& c) {
    const Scenario& s = c.scenario;
    SpaceConvergenceReport cover;
    std::optional<SpaceConvergenceReport> quotient;
    if (s.system.kind == SystemKind::Torus) {
        cover = estimate_space_convergence(TorusCover{s.system.rank()}, s.epsilons, s.norm, s.spaces);
    } else {
        const GraphCover maximal = GraphCover::maximal(s.system.graph);
        cover = estimate_space_convergence(maximal, s.epsilons, s.norm, s.spaces);
        if (s.subcover) {
            const SubcoverMap sub(*s.subcover, s.norm);
            quotient = estimate_space_convergence(sub.quotient(maximal), s.epsilons, s.norm, s.spaces);
        }
    }
    const bool pass = cover.pass && (!quotient || quotient->pass);
    const SpaceConvergenceReport* q = quotient ? &*quotient : nullptr;
    emit(r, c, "spaces.csv", false, spaces_csv(cover, q));
    emit(r, c, "spaces.json", true, spaces_json(s.name, cover, q, pass));
    if (!cover.pass) fail(r, "compute.spaces", "maximal cover distortion does not shrink below tolerance");
    if (quotient && !quotient->pass)
        fail(r, "compute.spaces", "quotient cover distortion does not shrink below tolerance");
    r.summary = "K = " + num(cover.k_constant) + ", final A_eps = " +
                num(cover.a_eps.empty() ? NAN : cover.a_eps.back());
}

void validate_command(RunResult& r, const ScenarioConfig& c) {
    const Scenario& s = c.scenario;
    if (s.system.kind == SystemKind::Graph) {
        r.summary = "graph with " + std::to_string(s.system.graph->edge_count()) + " edges and rank " +
                    std::to_string(s.system.rank()) + " is valid";
        return;
    }
    const TonelliReport t = verify_tonelli(*s.system.torus);
    r.summary = tonelli_json(s.name, t);
    if (!t.pass) {
        if (!(t.min_eigenvalue > 0.0)) fail(r, "system.kinetic", "kinetic matrix is not positive definite");
        if (!t.superlinear) fail(r, "system", "Hamiltonian is not superlinear");
        if (t.periodicity_residual > 1e-9) fail(r, "system", "Hamiltonian is not periodic");
        if (r.errors.empty()) fail(r, "system", "Tonelli check failed");
    }
}

}  // namespace

const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> list = {"alpha", "beta", "homogenize", "subcover", "spaces", "validate"};
    return list;
}

RunResult run(const RunOptions& options) {
    RunResult r;
    const auto& cmds = known_commands();
    const bool writes = options.command != "validate";
    std::optional<std::string> out_dir = options.out_dir;

    auto finish = [&](int code) {
        r.exit_code = code;
        if (writes && out_dir) {
            try {
                if (code == kExitPass) {
                    std::error_code ec;
                    std::filesystem::remove(std::filesystem::path(*out_dir) / "errors.json", ec);
                } else {
                    r.artifacts.push_back(write_artifact(*out_dir, "errors.json", errors_json(r.errors)));
                }
            } catch (const std::exception& e) {
                r.errors.push_back({"io", "output.dir", e.what()});
            }
        }
        return r;
    };

    if (std::find(cmds.begin(), cmds.end(), options.command) == cmds.end()) {
        r.errors.push_back({"schema", "--command", "unknown command '" + options.command + "'"});
        return finish(kExitSchema);
    }

    ScenarioConfig config;
    try {
        config = load_config(options.config_path);
        if (options.out_dir) config.output.dir = *options.out_dir;
        if (options.threads) {
            if (*options.threads < 1) throw ConfigError("--threads", "must be at least 1");
            config.scenario.threads = *options.threads;
        }
        if (options.seed) apply_seed(config, *options.seed);
    } catch (const ConfigError& e) {
        r.errors.push_back({"schema", e.path(), e.what()});
        return finish(kExitSchema);
    }
    out_dir = config.output.dir;

    try {
        if (options.command == "alpha" || options.command == "beta")
            grid_command(r, config, options.command);
        else if (options.command == "homogenize")
            experiment_command(r, config, false);
        else if (options.command == "subcover")
            experiment_command(r, config, true);
        else if (options.command == "spaces")
            spaces_command(r, config);
        else
            validate_command(r, config);
    } catch (const ConfigError& e) {
        r.errors.push_back({"schema", e.path(), e.what()});
        return finish(kExitSchema);
    } catch (const ModelError& e) {
        r.errors.push_back({"schema", "system", e.what()});
        return finish(kExitSchema);
    } catch (const std::exception& e) {
        r.errors.push_back({"solver", "", e.what()});
        return finish(kExitSolver);
    }
    return finish(r.errors.empty() ? kExitPass : kExitTolerance);
}

}  // namespace covhom
