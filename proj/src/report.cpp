#include "covhom/report.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace covhom {

using json = nlohmann::json;

namespace {

json number(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

json array(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
    return a;
}

json array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

json rate_json(const RateFit& f) {
    return {{"defined", f.defined},
            {"exact", f.exact},
            {"rate", number(f.rate)},
            {"constant", number(f.constant)},
            {"residual", number(f.residual)}};
}

json spaces_tree(const SpaceConvergenceReport& s) {
    return {{"k_constant", number(s.k_constant)},
            {"lipschitz_fit", number(s.lipschitz_fit)},
            {"orbit_ratio", number(s.orbit_ratio)},
            {"epsilons", array(s.epsilons)},
            {"a_eps", array(s.a_eps)},
            {"covering_radius", array(s.covering_radius)},
            {"a_over_eps", array(s.a_over_eps)},
            {"tolerance", number(s.tolerance)},
            {"pass", s.pass}};
}

void csv_row(std::ostringstream& out, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) out << ',';
        out << format_number(v);
        first = false;
    }
    out << '\n';
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string experiment_csv(const ExperimentReport& report) {
    std::ostringstream out;
    const int k = report.rows.empty() ? 0 : static_cast<int>(report.rows.front().h.size());
    for (int i = 0; i < k; ++i) out << 'h' << (i + 1) << ',';
    out << "t,epsilon,v_eps,u_limit,abs_error\n";
    for (const auto& r : report.rows) {
        for (int i = 0; i < k; ++i) out << format_number(r.h[i]) << ',';
        csv_row(out, {r.t, r.epsilon, r.v_eps, r.u_limit, r.abs_error});
    }
    return out.str();
}

std::string experiment_json(const ExperimentReport& report, const std::optional<MatpReport>& matp, bool pass) {
    json root;
    root["scenario"] = report.scenario;
    root["pass"] = pass;
    root["threshold"] = number(report.threshold);
    root["mesh_tolerance"] = number(report.mesh_tolerance);

    json points = json::array();
    for (const auto& p : report.points)
        points.push_back({{"h", array(p.h)},
                          {"t", number(p.t)},
                          {"final_error", number(p.final_error)},
                          {"rate", rate_json(p.fit)},
                          {"monotone", p.monotone},
                          {"pass", p.pass}});
    root["points"] = points;

    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"point", r.point},
                        {"h", array(r.h)},
                        {"t", number(r.t)},
                        {"epsilon", number(r.epsilon)},
                        {"cover_point", r.cover_point},
                        {"matching_error", number(r.matching_error)},
                        {"v_eps", number(r.v_eps)},
                        {"u_limit", number(r.u_limit)},
                        {"abs_error", number(r.abs_error)},
                        {"radius", number(r.radius)},
                        {"candidates", r.candidates},
                        {"evaluations", r.evaluations}});
    root["rows"] = rows;

    root["spaces"] = spaces_tree(report.spaces);
    root["datum"] = {{"epsilons", array(report.datum.epsilons)},
                     {"residual", array(report.datum.residual)},
                     {"tolerance", number(report.datum.tolerance)},
                     {"pass", report.datum.pass}};
    if (report.subcover) {
        const auto& c = *report.subcover;
        root["subcover"] = {{"lift_residual", number(c.lift_residual)},
                            {"invariance_residual", number(c.invariance_residual)},
                            {"duality_residual", number(c.duality_residual)},
                            {"p_grid", array(c.p_grid)},
                            {"lift_pass", c.lift_pass},
                            {"invariance_pass", c.invariance_pass},
                            {"duality_pass", c.duality_pass}};
    }
    if (matp) {
        root["matp"] = {{"horizons", array(matp->horizons)},
                        {"delta", array(matp->delta)},
                        {"rate_bound", number(matp->rate_bound)},
                        {"samples", matp->samples},
                        {"decreasing", matp->decreasing},
                        {"tolerance", number(matp->tolerance)},
                        {"pass", matp->pass}};
    }
    return root.dump(2) + "\n";
}

std::string grid_csv(const GridTable& table, const std::string& label) {
    std::ostringstream out;
    for (int i = 0; i < table.dimension; ++i) out << 'x' << (i + 1) << ',';
    out << label << '\n';
    for (std::size_t n = 0; n < table.size(); ++n) {
        const Vec x = table.node(n);
        for (int i = 0; i < table.dimension; ++i) out << format_number(x[i]) << ',';
        out << format_number(table.values[n]) << '\n';
    }
    return out.str();
}

std::string grid_json(const GridTable& table, const GridSummary& s) {
    json root;
    root["scenario"] = s.scenario;
    root["function"] = s.label;
    root["dimension"] = table.dimension;
    root["box"] = number(table.grid.box);
    root["points_per_axis"] = table.grid.points;
    root["convexity_residual"] = number(s.convexity_residual);
    root["convexity_tolerance"] = number(s.convexity_tolerance);
    root["pass"] = s.pass;
    root["values"] = array(table.values);
    return root.dump(2) + "\n";
}

std::string spaces_csv(const SpaceConvergenceReport& cover, const SpaceConvergenceReport* quotient) {
    std::ostringstream out;
    out << "cover,epsilon,a_eps,covering_radius,a_over_eps\n";
    auto block = [&](const char* name, const SpaceConvergenceReport& s) {
        for (std::size_t i = 0; i < s.epsilons.size(); ++i)
            out << name << ',' << format_number(s.epsilons[i]) << ',' << format_number(s.a_eps[i]) << ','
                << format_number(s.covering_radius[i]) << ',' << format_number(s.a_over_eps[i]) << '\n';
    };
    block("maximal", cover);
    if (quotient) block("quotient", *quotient);
    return out.str();
}

std::string spaces_json(const std::string& scenario, const SpaceConvergenceReport& cover,
                        const SpaceConvergenceReport* quotient, bool pass) {
    json root;
    root["scenario"] = scenario;
    root["pass"] = pass;
    root["maximal"] = spaces_tree(cover);
    if (quotient) root["quotient"] = spaces_tree(*quotient);
    return root.dump(2) + "\n";
}

std::string tonelli_json(const std::string& scenario, const TonelliReport& r) {
    json root;
    root["scenario"] = scenario;
    root["min_eigenvalue"] = number(r.min_eigenvalue);
    root["periodicity_residual"] = number(r.periodicity_residual);
    root["superlinearity_ratio"] = number(r.superlinearity_ratio);
    root["probe_radius"] = number(r.probe_radius);
    root["probe_slope"] = number(r.probe_slope);
    root["superlinear"] = r.superlinear;
    root["pass"] = r.pass;
    return root.dump(2) + "\n";
}

std::string errors_json(const std::vector<ErrorRecord>& errors) {
    json list = json::array();
    for (const auto& e : errors) list.push_back({{"kind", e.kind}, {"path", e.path}, {"message", e.message}});
    return json{{"errors", list}}.dump(2) + "\n";
}

std::string write_artifact(const std::string& dir, const std::string& name, const std::string& text) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
    return path.string();
}

}  // namespace covhom
