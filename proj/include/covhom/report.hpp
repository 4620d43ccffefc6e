#pragma once

#include "covhom/homogenize.hpp"
#include "covhom/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace covhom {

/// Decimal form with 17 significant digits.
std::string format_number(double v);

/// One row per (point, epsilon): h_1..h_k, t, epsilon, v_eps, u_limit, abs_error.
std::string experiment_csv(const ExperimentReport& report);
std::string experiment_json(const ExperimentReport& report, const std::optional<MatpReport>& matp, bool pass);

/// Nodes and values of a grid table: x_1..x_k, <label>.
std::string grid_csv(const GridTable& table, const std::string& label);

struct GridSummary {
    std::string scenario;
    std::string label;
    double convexity_residual = 0.0;
    double convexity_tolerance = 1e-6;
    bool pass = false;
};
std::string grid_json(const GridTable& table, const GridSummary& summary);

/// epsilon, a_eps, covering_radius, a_over_eps; one block per cover when `quotient` is present.
std::string spaces_csv(const SpaceConvergenceReport& cover, const SpaceConvergenceReport* quotient);
std::string spaces_json(const std::string& scenario, const SpaceConvergenceReport& cover,
                        const SpaceConvergenceReport* quotient, bool pass);

std::string tonelli_json(const std::string& scenario, const TonelliReport& report);

struct ErrorRecord {
    std::string kind;  ///< schema, solver, tolerance, io
    std::string path;  ///< offending config field, when known
    std::string message;
};
std::string errors_json(const std::vector<ErrorRecord>& errors);

/// Writes `text` to dir/name, creating dir as needed. Throws std::runtime_error on failure.
std::string write_artifact(const std::string& dir, const std::string& name, const std::string& text);

}  // namespace covhom
