"""Mather alpha/beta functions, Lax-Oleinik and Hopf-Lax solvers on abelian covers."""

from ._covhom import (
    ConfigError,
    GraphLagrangian,
    InitialDatum,
    MetricGraph,
    ModelError,
    Norm,
    SolverError,
    TorusHamiltonian,
    alpha_graph,
    alpha_torus,
    beta_graph,
    beta_graph_measure,
    hopf_lax_graph,
    minimal_action_graph,
    minimal_action_torus,
    parse_norm,
    run,
    run_experiment,
    validate_config,
)

__all__ = [
    "ConfigError",
    "GraphLagrangian",
    "InitialDatum",
    "MetricGraph",
    "ModelError",
    "Norm",
    "SolverError",
    "TorusHamiltonian",
    "alpha_graph",
    "alpha_torus",
    "beta_graph",
    "beta_graph_measure",
    "hopf_lax_graph",
    "minimal_action_graph",
    "minimal_action_torus",
    "parse_norm",
    "run",
    "run_experiment",
    "validate_config",
]
