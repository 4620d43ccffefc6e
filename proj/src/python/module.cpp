#include "covhom/cli.hpp"
#include "covhom/config.hpp"
#include "covhom/homogenize.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace covhom;

namespace {

std::shared_ptr<const MetricGraph> make_graph(int vertices, const std::vector<std::tuple<int, int, double>>& edges) {
    std::vector<Edge> es;
    for (const auto& [tail, head, length] : edges) es.push_back({tail, head, length});
    return std::make_shared<const MetricGraph>(vertices, std::move(es));
}

TrigPolynomial make_poly(int dim, const std::vector<std::tuple<std::vector<std::int64_t>, double, double>>& terms) {
    std::vector<TrigTerm> ts;
    for (const auto& [k, c, s] : terms) {
        TrigTerm t;
        t.frequency = Eigen::Map<const IntVec>(k.data(), static_cast<Eigen::Index>(k.size()));
        t.cos_coef = c;
        t.sin_coef = s;
        ts.push_back(std::move(t));
    }
    return TrigPolynomial(dim, std::move(ts));
}

py::dict row_dict(const ExperimentRow& r) {
    py::dict d;
    d["point"] = r.point;
    d["h"] = r.h;
    d["t"] = r.t;
    d["epsilon"] = r.epsilon;
    d["cover_point"] = r.cover_point;
    d["v_eps"] = r.v_eps;
    d["u_limit"] = r.u_limit;
    d["abs_error"] = r.abs_error;
    return d;
}

}  // namespace

PYBIND11_MODULE(_covhom, m) {
    m.doc() = "Homogenization of Tonelli Hamiltonians on abelian covers";

    py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            config_error((e.path() + ": " + e.what()).c_str());
        }
    });

    py::enum_<Norm>(m, "Norm").value("L1", Norm::L1).value("L2", Norm::L2).value("LInf", Norm::LInf);
    m.def("parse_norm", &parse_norm);

    py::class_<MetricGraph, std::shared_ptr<MetricGraph>>(m, "MetricGraph")
        .def(py::init([](int vertices, const std::vector<std::tuple<int, int, double>>& edges) {
                 return std::const_pointer_cast<MetricGraph>(make_graph(vertices, edges));
             }),
             py::arg("vertices"), py::arg("edges"))
        .def_property_readonly("rank", &MetricGraph::rank)
        .def_property_readonly("vertex_count", &MetricGraph::vertex_count)
        .def_property_readonly("edge_count", &MetricGraph::edge_count);

    py::class_<GraphLagrangian>(m, "GraphLagrangian")
        .def(py::init<std::vector<double>>(), py::arg("potentials"))
        .def_property_readonly("potentials", &GraphLagrangian::potentials);

    py::class_<TorusHamiltonian, std::shared_ptr<TorusHamiltonian>>(m, "TorusHamiltonian")
        .def_static(
            "mechanical",
            [](int dim, const std::vector<std::tuple<std::vector<std::int64_t>, double, double>>& potential) {
                return std::make_shared<TorusHamiltonian>(TorusHamiltonian::mechanical(dim, make_poly(dim, potential)));
            },
            py::arg("dimension"), py::arg("potential") = std::vector<std::tuple<std::vector<std::int64_t>, double, double>>{},
            "H(x,p) = |p|^2/2 + V(x) with V given as (frequency, cos, sin) modes.")
        .def_property_readonly("dimension", &TorusHamiltonian::dimension)
        .def("hamiltonian", &TorusHamiltonian::value, py::arg("x"), py::arg("p"))
        .def("lagrangian", [](const TorusHamiltonian& H, const Vec& x, const Vec& v) { return H.lagrangian(x, v); },
             py::arg("x"), py::arg("v"));

    m.def("alpha_graph", [](const MetricGraph& g, const GraphLagrangian& L, const Vec& P) { return alpha_graph(g, L, P); },
          py::arg("graph"), py::arg("lagrangian"), py::arg("P"));
    m.def("beta_graph", &beta_graph, py::arg("graph"), py::arg("lagrangian"), py::arg("h"));
    m.def(
        "beta_graph_measure",
        [](const MetricGraph& g, const GraphLagrangian& L, const Vec& h) {
            const Circulation c = beta_graph_measure(g, L, h);
            py::dict d;
            d["forward_rate"] = c.forward_rate;
            d["backward_rate"] = c.backward_rate;
            d["speed"] = c.speed;
            d["time_fraction"] = c.time_fraction;
            d["rest_fraction"] = c.rest_fraction;
            d["rest_edge"] = c.rest_edge;
            d["rho"] = c.rho;
            d["action"] = c.action;
            d["residual"] = c.residual;
            return d;
        },
        py::arg("graph"), py::arg("lagrangian"), py::arg("h"));
    m.def(
        "alpha_torus",
        [](const TorusHamiltonian& H, const Vec& P, int mesh) {
            MinimaxOptions o;
            o.mesh = mesh;
            return alpha_torus_minimax(H, P, o).value;
        },
        py::arg("hamiltonian"), py::arg("P"), py::arg("mesh") = 64);
    m.def(
        "minimal_action_torus",
        [](const TorusHamiltonian& H, const Vec& y, const Vec& x, double T) { return minimal_action(H, y, x, T); },
        py::arg("hamiltonian"), py::arg("y"), py::arg("x"), py::arg("T"));
    m.def(
        "minimal_action_graph",
        [](const std::shared_ptr<MetricGraph>& g, const GraphLagrangian& L, const std::vector<std::int64_t>& sheet,
           int edge, double s, double T) {
            const GraphCover cover = GraphCover::maximal(g);
            IntVec z = Eigen::Map<const IntVec>(sheet.data(), static_cast<Eigen::Index>(sheet.size()));
            const GraphPoint x = edge < 0 ? GraphPoint::at_vertex(0, z) : GraphPoint::on_edge(edge, s, z);
            return minimal_action(cover, L, cover.base_point(), x, T);
        },
        py::arg("graph"), py::arg("lagrangian"), py::arg("sheet"), py::arg("edge") = -1, py::arg("s") = 0.0,
        py::arg("T") = 1.0, "Minimal action from the base point to a point of the maximal free abelian cover.");

    py::class_<InitialDatum>(m, "InitialDatum")
        .def_static("affine", &InitialDatum::affine, py::arg("a"), py::arg("P"))
        .def_static("cone", &InitialDatum::cone, py::arg("c"), py::arg("norm"), py::arg("dimension"))
        .def_static("quadratic", &InitialDatum::quadratic, py::arg("a"), py::arg("b"), py::arg("Q"))
        .def("__call__", &InitialDatum::limit, py::arg("h"));

    m.def(
        "hopf_lax_graph",
        [](const std::shared_ptr<MetricGraph>& g, const GraphLagrangian& L, const InitialDatum& f, const Vec& h,
           double t) { return hopf_lax(GraphBeta(g, L), f, h, t); },
        py::arg("graph"), py::arg("lagrangian"), py::arg("datum"), py::arg("h"), py::arg("t"));

    m.def(
        "validate_config",
        [](const std::string& path) {
            const ScenarioConfig c = load_config(path);
            return c.scenario.name;
        },
        py::arg("path"), "Parses a scenario file and returns its name; raises ConfigError on schema errors.");
    m.def(
        "run_experiment",
        [](const std::string& path) {
            const ScenarioConfig c = load_config(path);
            const ExperimentReport r =
                c.scenario.subcover ? run_subcover_experiment(c.scenario) : run_experiment(c.scenario);
            py::list rows;
            for (const auto& row : r.rows) rows.append(row_dict(row));
            py::dict d;
            d["rows"] = rows;
            d["threshold"] = r.threshold;
            d["pass"] = r.pass;
            return d;
        },
        py::arg("path"));
    m.def(
        "run",
        [](const std::string& config, const std::string& command, std::optional<std::string> out_dir,
           std::optional<std::uint64_t> seed) {
            RunOptions o;
            o.config_path = config;
            o.command = command;
            o.out_dir = std::move(out_dir);
            o.seed = seed;
            const RunResult r = run(o);
            py::list errors;
            for (const auto& e : r.errors) {
                py::dict d;
                d["kind"] = e.kind;
                d["path"] = e.path;
                d["message"] = e.message;
                errors.append(d);
            }
            py::dict d;
            d["exit_code"] = r.exit_code;
            d["artifacts"] = r.artifacts;
            d["errors"] = errors;
            d["summary"] = r.summary;
            return d;
        },
        py::arg("config"), py::arg("command"), py::arg("out_dir") = py::none(), py::arg("seed") = py::none());
}
