#include "covhom/config.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace covhom {

using json = nlohmann::json;

namespace {

std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    return j;
}

void allow(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    std::set<std::string> known(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw ConfigError(at(path, it.key()), "unknown field");
}

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

const json& require(const json& j, const std::string& path, const char* key) {
    const json* v = find(j, key);
    if (!v) throw ConfigError(at(path, key), "missing required field");
    return *v;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
}

long long as_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
    return j.get<long long>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
    return j.get<bool>();
}

const json& as_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array");
    return j;
}

double number(const json& j, const std::string& path, const char* key, double fallback) {
    const json* v = find(j, key);
    return v ? as_number(*v, at(path, key)) : fallback;
}

double positive(const json& j, const std::string& path, const char* key, double fallback) {
    const double v = number(j, path, key, fallback);
    if (!(v > 0.0)) throw ConfigError(at(path, key), "must be positive");
    return v;
}

int integer(const json& j, const std::string& path, const char* key, int fallback, int min) {
    const json* v = find(j, key);
    if (!v) return fallback;
    const long long n = as_integer(*v, at(path, key));
    if (n < min || n > (1LL << 30)) throw ConfigError(at(path, key), "must be at least " + std::to_string(min));
    return static_cast<int>(n);
}

Vec vector(const json& j, const std::string& path) {
    as_array(j, path);
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = as_number(j[i], at(path, i));
    return v;
}

std::vector<double> numbers(const json& j, const std::string& path) {
    const Vec v = vector(j, path);
    return {v.data(), v.data() + v.size()};
}

Mat matrix(const json& j, const std::string& path) {
    as_array(j, path);
    if (j.empty()) throw ConfigError(path, "matrix has no rows");
    Mat m;
    for (std::size_t r = 0; r < j.size(); ++r) {
        const Vec row = vector(j[r], at(path, r));
        if (r == 0) m.resize(static_cast<Eigen::Index>(j.size()), row.size());
        if (row.size() != m.cols() || row.size() == 0) throw ConfigError(at(path, r), "ragged or empty row");
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

IntMat int_matrix(const json& j, const std::string& path) {
    as_array(j, path);
    if (j.empty()) throw ConfigError(path, "matrix has no rows");
    IntMat m;
    for (std::size_t r = 0; r < j.size(); ++r) {
        const std::string rp = at(path, r);
        as_array(j[r], rp);
        if (r == 0) m.resize(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[r].size()));
        if (static_cast<Eigen::Index>(j[r].size()) != m.cols() || j[r].empty())
            throw ConfigError(rp, "ragged or empty row");
        for (std::size_t c = 0; c < j[r].size(); ++c) {
            const long long v = as_integer(j[r][c], at(rp, c));
            if (std::llabs(v) > 1000) throw ConfigError(at(rp, c), "entry out of range");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = static_cast<int>(v);
        }
    }
    return m;
}

TrigPolynomial trig(const json& j, const std::string& path, int dim) {
    if (j.is_number()) return TrigPolynomial::constant(dim, as_number(j, path));
    as_array(j, path);
    std::vector<TrigTerm> terms;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string tp = at(path, i);
        object(j[i], tp);
        allow(j[i], tp, {"frequency", "cos", "sin"});
        TrigTerm t;
        const json& k = as_array(require(j[i], tp, "frequency"), at(tp, "frequency"));
        if (static_cast<int>(k.size()) != dim) throw ConfigError(at(tp, "frequency"), "needs one entry per dimension");
        t.frequency.resize(dim);
        for (int d = 0; d < dim; ++d) {
            const long long f = as_integer(k[d], at(at(tp, "frequency"), d));
            if (std::llabs(f) > 64) throw ConfigError(at(at(tp, "frequency"), d), "frequency out of range");
            t.frequency(d) = static_cast<int>(f);
        }
        t.cos_coef = number(j[i], tp, "cos", 0.0);
        t.sin_coef = number(j[i], tp, "sin", 0.0);
        terms.push_back(std::move(t));
    }
    return TrigPolynomial(dim, std::move(terms));
}

System parse_torus(const json& j, const std::string& path) {
    allow(j, path, {"family", "dimension", "potential", "kinetic"});
    const int dim = integer(j, path, "dimension", 1, 1);
    if (dim > 2) throw ConfigError(at(path, "dimension"), "must be 1 or 2");
    TrigPolynomial V = TrigPolynomial::constant(dim, 0.0);
    if (const json* p = find(j, "potential")) V = trig(*p, at(path, "potential"), dim);
    std::vector<TrigPolynomial> kinetic;
    if (const json* k = find(j, "kinetic")) {
        const std::string kp = at(path, "kinetic");
        as_array(*k, kp);
        if (static_cast<int>(k->size()) != dim) throw ConfigError(kp, "needs one row per dimension");
        for (int r = 0; r < dim; ++r) {
            const std::string rp = at(kp, static_cast<std::size_t>(r));
            as_array((*k)[r], rp);
            if (static_cast<int>((*k)[r].size()) != dim) throw ConfigError(rp, "needs one entry per dimension");
            for (int c = 0; c < dim; ++c) kinetic.push_back(trig((*k)[r][c], at(rp, static_cast<std::size_t>(c)), dim));
        }
    } else {
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) kinetic.push_back(TrigPolynomial::constant(dim, r == c ? 1.0 : 0.0));
    }
    try {
        return System::make_torus(TorusHamiltonian(dim, std::move(kinetic), std::move(V)));
    } catch (const ModelError& e) {
        throw ConfigError(path, e.what());
    }
}

System parse_graph(const json& j, const std::string& path) {
    allow(j, path, {"family", "vertices", "edges"});
    const int vertices = integer(j, path, "vertices", 1, 1);
    const std::string ep = at(path, "edges");
    const json& edges = as_array(require(j, path, "edges"), ep);
    if (edges.empty()) throw ConfigError(ep, "graph needs at least one edge");
    std::vector<Edge> list;
    std::vector<double> potentials;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string p = at(ep, i);
        object(edges[i], p);
        allow(edges[i], p, {"tail", "head", "length", "potential"});
        Edge e;
        e.tail = static_cast<int>(as_integer(require(edges[i], p, "tail"), at(p, "tail")));
        e.head = static_cast<int>(as_integer(require(edges[i], p, "head"), at(p, "head")));
        if (e.tail < 0 || e.tail >= vertices) throw ConfigError(at(p, "tail"), "vertex out of range");
        if (e.head < 0 || e.head >= vertices) throw ConfigError(at(p, "head"), "vertex out of range");
        e.length = as_number(require(edges[i], p, "length"), at(p, "length"));
        if (!(e.length > 0.0)) throw ConfigError(at(p, "length"), "edge length must be positive");
        list.push_back(e);
        potentials.push_back(number(edges[i], p, "potential", 0.0));
    }
    try {
        MetricGraph g(vertices, std::move(list));
        if (g.rank() > kMaxRank) throw ConfigError(ep, "homology rank exceeds " + std::to_string(kMaxRank));
        return System::make_graph(std::move(g), GraphLagrangian(std::move(potentials)));
    } catch (const ModelError& e) {
        throw ConfigError(path, e.what());
    }
}

System parse_system(const json& j, const std::string& path) {
    object(j, path);
    const std::string family = as_string(require(j, path, "family"), at(path, "family"));
    if (family == "torus") return parse_torus(j, path);
    if (family == "graph") return parse_graph(j, path);
    throw ConfigError(at(path, "family"), "unknown system family '" + family + "'");
}

Norm norm_tag(const json& j, const std::string& path) {
    const std::string s = as_string(j, path);
    try {
        return parse_norm(s);
    } catch (const std::exception&) {
        throw ConfigError(path, "unknown norm '" + s + "'");
    }
}

InitialDatum parse_datum(const json& j, const std::string& path, Norm norm, int dim) {
    object(j, path);
    const std::string fp = at(path, "family");
    const std::string family = as_string(require(j, path, "family"), fp);
    InitialDatum d;
    if (family == "affine") {
        allow(j, path, {"family", "a", "P", "perturbation"});
        d = InitialDatum::affine(number(j, path, "a", 0.0), vector(require(j, path, "P"), at(path, "P")));
        if (d.P.size() != dim) throw ConfigError(at(path, "P"), "needs " + std::to_string(dim) + " entries");
    } else if (family == "cone") {
        allow(j, path, {"family", "c", "norm", "perturbation"});
        Norm n = norm;
        if (const json* v = find(j, "norm")) n = norm_tag(*v, at(path, "norm"));
        d = InitialDatum::cone(number(j, path, "c", 1.0), n, dim);
    } else if (family == "quadratic") {
        allow(j, path, {"family", "a", "b", "Q", "perturbation"});
        Vec b = Vec::Zero(dim);
        if (const json* v = find(j, "b")) b = vector(*v, at(path, "b"));
        if (b.size() != dim) throw ConfigError(at(path, "b"), "needs " + std::to_string(dim) + " entries");
        const Mat Q = matrix(require(j, path, "Q"), at(path, "Q"));
        if (Q.rows() != dim || Q.cols() != dim) throw ConfigError(at(path, "Q"), "must be square of the homology rank");
        d = InitialDatum::quadratic(number(j, path, "a", 0.0), b, Q);
    } else {
        throw ConfigError(fp, "unknown datum family '" + family + "'");
    }
    d.perturbation = number(j, path, "perturbation", 0.0);
    try {
        d.validate();
    } catch (const std::exception& e) {
        throw ConfigError(path, e.what());
    }
    return d;
}

std::vector<double> parse_ladder(const json& j, const std::string& path) {
    if (j.is_array()) return numbers(j, path);
    object(j, path);
    allow(j, path, {"start", "ratio", "rungs"});
    const double start = positive(j, path, "start", 0.5);
    const double ratio = positive(j, path, "ratio", 0.5);
    if (!(ratio < 1.0)) throw ConfigError(at(path, "ratio"), "must be below 1");
    const int rungs = integer(j, path, "rungs", 6, 1);
    std::vector<double> eps;
    double e = start;
    for (int i = 0; i < rungs; ++i, e *= ratio) eps.push_back(e);
    return eps;
}

void parse_tolerances(const json& j, const std::string& path, ExperimentTolerances& t) {
    object(j, path);
    allow(j, path, {"homogenization", "mesh_factor", "monotone_slack", "lift", "invariance", "duality", "datum"});
    t.homogenization = positive(j, path, "homogenization", t.homogenization);
    t.mesh_factor = positive(j, path, "mesh_factor", t.mesh_factor);
    t.monotone_slack = number(j, path, "monotone_slack", t.monotone_slack);
    if (t.monotone_slack < 0.0) throw ConfigError(at(path, "monotone_slack"), "must be non-negative");
    t.lift = positive(j, path, "lift", t.lift);
    t.invariance = positive(j, path, "invariance", t.invariance);
    t.duality = positive(j, path, "duality", t.duality);
    t.datum = positive(j, path, "datum", t.datum);
}

void parse_matp(const json& j, const std::string& path, MatpConfig& m) {
    object(j, path);
    allow(j, path, {"enabled", "rate_bound", "horizons", "samples", "tolerance"});
    m.enabled = true;
    if (const json* v = find(j, "enabled")) m.enabled = as_bool(*v, at(path, "enabled"));
    m.options.rate_bound = number(j, path, "rate_bound", m.options.rate_bound);
    if (m.options.rate_bound < 0.0) throw ConfigError(at(path, "rate_bound"), "must be non-negative");
    if (const json* v = find(j, "horizons")) {
        m.options.horizons = numbers(*v, at(path, "horizons"));
        if (m.options.horizons.size() < 2) throw ConfigError(at(path, "horizons"), "needs at least two horizons");
        for (std::size_t i = 0; i < m.options.horizons.size(); ++i) {
            if (!(m.options.horizons[i] > 0.0)) throw ConfigError(at(at(path, "horizons"), i), "must be positive");
            if (i > 0 && !(m.options.horizons[i] > m.options.horizons[i - 1]))
                throw ConfigError(at(at(path, "horizons"), i), "horizons must increase");
        }
    }
    m.options.samples = integer(j, path, "samples", m.options.samples, 1);
    m.options.tolerance = positive(j, path, "tolerance", m.options.tolerance);
}

void parse_experiment(const json& j, const std::string& path, ScenarioConfig& c) {
    object(j, path);
    allow(j, path, {"epsilons", "ladder", "points", "tolerances", "seed", "datum_samples", "t_range", "matp"});
    Scenario& s = c.scenario;
    const json* eps = find(j, "epsilons");
    const json* ladder = find(j, "ladder");
    if (eps && ladder) throw ConfigError(at(path, "ladder"), "give either epsilons or ladder, not both");
    if (!eps && !ladder) throw ConfigError(at(path, "epsilons"), "missing required field");
    s.epsilons = eps ? parse_ladder(*eps, at(path, "epsilons")) : parse_ladder(*ladder, at(path, "ladder"));

    double t_lo = 0.25, t_hi = 4.0;
    if (const json* r = find(j, "t_range")) {
        const Vec v = vector(*r, at(path, "t_range"));
        if (v.size() != 2 || !(v(0) > 0.0) || !(v(1) >= v(0)))
            throw ConfigError(at(path, "t_range"), "expected [lo, hi] with 0 < lo <= hi");
        t_lo = v(0);
        t_hi = v(1);
    }
    const std::string pp = at(path, "points");
    const json& pts = as_array(require(j, path, "points"), pp);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::string p = at(pp, i);
        object(pts[i], p);
        allow(pts[i], p, {"h", "t"});
        EvaluationPoint e;
        e.h = vector(require(pts[i], p, "h"), at(p, "h"));
        e.t = number(pts[i], p, "t", 1.0);
        if (e.t < t_lo || e.t > t_hi)
            throw ConfigError(at(p, "t"), "outside the allowed time range [" + std::to_string(t_lo) + ", " +
                                              std::to_string(t_hi) + "]");
        s.points.push_back(std::move(e));
    }
    const json& seed = require(j, path, "seed");
    const long long sv = as_integer(seed, at(path, "seed"));
    if (sv < 0) throw ConfigError(at(path, "seed"), "must be non-negative");
    apply_seed(c, static_cast<std::uint64_t>(sv));
    s.datum_samples = integer(j, path, "datum_samples", s.datum_samples, 1);
    if (const json* t = find(j, "tolerances")) parse_tolerances(*t, at(path, "tolerances"), s.tolerances);
    if (const json* m = find(j, "matp")) parse_matp(*m, at(path, "matp"), c.matp);
}

GridSpec parse_grid(const json& j, const std::string& path, GridSpec g) {
    object(j, path);
    allow(j, path, {"box", "points"});
    g.box = positive(j, path, "box", g.box);
    g.points = integer(j, path, "points", g.points, 3);
    return g;
}

void parse_trajectory(const json& j, const std::string& path, TrajectoryOptions& t) {
    object(j, path);
    allow(j, path, {"initial_segments", "max_segments", "tolerance", "max_iterations", "max_wells"});
    t.initial_segments = integer(j, path, "initial_segments", t.initial_segments, 2);
    t.max_segments = integer(j, path, "max_segments", t.max_segments, t.initial_segments);
    t.tolerance = positive(j, path, "tolerance", t.tolerance);
    t.max_iterations = integer(j, path, "max_iterations", t.max_iterations, 1);
    t.max_wells = integer(j, path, "max_wells", t.max_wells, 0);
}

void parse_minimax(const json& j, const std::string& path, MinimaxOptions& m) {
    object(j, path);
    allow(j, path, {"mesh", "restarts", "temperatures", "polish_temperatures", "max_iterations"});
    m.mesh = integer(j, path, "mesh", m.mesh, 4);
    m.restarts = integer(j, path, "restarts", m.restarts, 0);
    auto temps = [&](const char* key, std::vector<double>& out) {
        if (const json* v = find(j, key)) {
            out = numbers(*v, at(path, key));
            for (std::size_t i = 0; i < out.size(); ++i)
                if (!(out[i] > 0.0)) throw ConfigError(at(at(path, key), i), "must be positive");
        }
    };
    temps("temperatures", m.temperatures);
    temps("polish_temperatures", m.polish_temperatures);
    if (m.temperatures.empty()) throw ConfigError(at(path, "temperatures"), "needs at least one temperature");
    m.max_iterations = integer(j, path, "max_iterations", m.max_iterations, 1);
}

void parse_spaces(const json& j, const std::string& path, SpaceSampling& s) {
    object(j, path);
    allow(j, path, {"samples", "window", "ball_radius", "probes", "tolerance"});
    s.samples = integer(j, path, "samples", s.samples, 1);
    s.window = integer(j, path, "window", s.window, 1);
    s.ball_radius = positive(j, path, "ball_radius", s.ball_radius);
    s.probes = integer(j, path, "probes", s.probes, 1);
    s.tolerance = positive(j, path, "tolerance", s.tolerance);
}

void parse_compute(const json& j, const std::string& path, ScenarioConfig& c) {
    object(j, path);
    allow(j, path, {"mesh", "refine", "rescaled_lagrangian", "max_nodes", "threads", "trajectory", "hopf",
                    "table_grid", "beta_grid", "minimax", "spaces"});
    Scenario& s = c.scenario;
    s.lax.mesh = integer(j, path, "mesh", s.lax.mesh, 2);
    if (const json* v = find(j, "refine")) s.lax.refine = as_bool(*v, at(path, "refine"));
    if (const json* v = find(j, "rescaled_lagrangian"))
        s.lax.rescaled_lagrangian = as_bool(*v, at(path, "rescaled_lagrangian"));
    if (const json* v = find(j, "max_nodes")) {
        const long long n = as_integer(*v, at(path, "max_nodes"));
        if (n < 1) throw ConfigError(at(path, "max_nodes"), "must be positive");
        s.lax.max_nodes = static_cast<std::size_t>(n);
    }
    s.threads = integer(j, path, "threads", s.threads, 1);
    if (const json* v = find(j, "trajectory")) {
        parse_trajectory(*v, at(path, "trajectory"), s.lax.trajectory);
        c.matp.options.trajectory = s.lax.trajectory;
    }
    if (const json* v = find(j, "hopf")) {
        const std::string hp = at(path, "hopf");
        object(*v, hp);
        allow(*v, hp, {"grid_points", "tolerance"});
        s.hopf.grid_points = integer(*v, hp, "grid_points", s.hopf.grid_points, 3);
        s.hopf.tolerance = positive(*v, hp, "tolerance", s.hopf.tolerance);
    }
    if (const json* v = find(j, "table_grid")) c.table_grid = parse_grid(*v, at(path, "table_grid"), c.table_grid);
    if (const json* v = find(j, "beta_grid")) s.beta_grid = parse_grid(*v, at(path, "beta_grid"), s.beta_grid);
    if (const json* v = find(j, "minimax")) parse_minimax(*v, at(path, "minimax"), s.minimax);
    if (const json* v = find(j, "spaces")) parse_spaces(*v, at(path, "spaces"), s.spaces);
}

void parse_output(const json& j, const std::string& path, OutputConfig& o) {
    object(j, path);
    allow(j, path, {"dir", "formats"});
    if (const json* v = find(j, "dir")) {
        o.dir = as_string(*v, at(path, "dir"));
        if (o.dir.empty()) throw ConfigError(at(path, "dir"), "must not be empty");
    }
    if (const json* v = find(j, "formats")) {
        const std::string fp = at(path, "formats");
        as_array(*v, fp);
        o.json = o.csv = false;
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string f = as_string((*v)[i], at(fp, i));
            if (f == "json")
                o.json = true;
            else if (f == "csv")
                o.csv = true;
            else
                throw ConfigError(at(fp, i), "unknown format '" + f + "'");
        }
        if (!o.json && !o.csv) throw ConfigError(fp, "no output format selected");
    }
}

}  // namespace

void apply_seed(ScenarioConfig& config, std::uint64_t seed) {
    config.scenario.seed = seed;
    config.scenario.spaces.seed = seed;
    config.scenario.minimax.seed = seed + 6;
    config.matp.options.seed = seed + 10;
}

ScenarioConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("(root)", std::string("malformed config: ") + e.what());
    }
    object(root, "(root)");
    allow(root, "", {"name", "system", "cover", "datum", "experiment", "compute", "output"});

    ScenarioConfig c;
    Scenario& s = c.scenario;
    if (const json* v = find(root, "name")) s.name = as_string(*v, "name");
    s.system = parse_system(require(root, "", "system"), "system");

    if (const json* cover = find(root, "cover")) {
        object(*cover, "cover");
        allow(*cover, "cover", {"norm", "subcover"});
        if (const json* v = find(*cover, "norm")) s.norm = norm_tag(*v, "cover.norm");
        if (const json* v = find(*cover, "subcover")) {
            s.subcover = int_matrix(*v, "cover.subcover");
            try {
                SubcoverMap check(*s.subcover, s.norm);
                (void)check;
            } catch (const std::exception& e) {
                throw ConfigError("cover.subcover", e.what());
            }
        }
    }
    if (s.subcover && s.system.kind != SystemKind::Graph)
        throw ConfigError("cover.subcover", "subcover maps need a graph system");
    if (s.subcover && s.subcover->cols() != s.system.rank())
        throw ConfigError("cover.subcover", "needs one column per homology generator (" +
                                                std::to_string(s.system.rank()) + ")");

    // the compute block feeds trajectory options into the MatP settings, so it goes first
    if (const json* v = find(root, "compute")) parse_compute(*v, "compute", c);
    parse_experiment(require(root, "", "experiment"), "experiment", c);
    s.datum = parse_datum(require(root, "", "datum"), "datum", s.norm, s.limit_dimension());
    if (const json* v = find(root, "output")) parse_output(*v, "output", c.output);

    s.validate();
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("(file)", "cannot read config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace covhom
