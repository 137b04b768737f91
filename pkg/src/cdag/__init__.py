"""Causal structure learning with known-cause secondary variables.

The package estimates a DAG over primary variables using conditional-DAG
(CDAG) models: each primary variable has a known upstream cause among the
secondary variables, and those known links make edge directions identifiable.
It provides the c-separation criterion and independence-model machinery,
closed-form g-prior scores for linear-Gaussian data, exact and greedy MAP
structure search, an SEM simulator, and SHD benchmark runners.
"""

__version__ = "0.1.0"

from .errors import CdagError, CollinearityError, InputError, NumericError
from .graphs import (
    Cdag,
    Dag,
    DiGraph,
    NodeRef,
    UndirectedGraph,
    all_dags,
    ancestors,
    is_acyclic,
    moralize,
    separated,
    v,
    w,
)
from .separation import (
    EXTENSION_NODE,
    IndependenceModel,
    Query,
    c_separated,
    d_separated,
    extended_graph,
    independence_model,
    pairwise_relations,
)
from .scoring import (
    Dataset,
    GPriorConfig,
    LocalModel,
    ScoreTable,
    design_matrices,
    log_bayes_factor,
    log_marginal_likelihood,
    log_parent_prior,
    read_dataset_csv,
    score_table,
    write_dataset_csv,
)
from .search import EXACT_NODE_LIMIT, SearchResult, estimate, estimate_with_result, exact_map, greedy_map
from .simulate import GroundTruth, SimConfig, sample_dag, simulate
from .evaluation import (
    ESTIMATORS,
    BenchmarkReport,
    BenchmarkRow,
    MisspecReport,
    MisspecRow,
    ShdReport,
    run_benchmark,
    run_misspec_sweep,
    shd,
)

__all__ = [
    "__version__",
    "CdagError",
    "CollinearityError",
    "InputError",
    "NumericError",
    "Cdag",
    "Dag",
    "DiGraph",
    "NodeRef",
    "UndirectedGraph",
    "all_dags",
    "ancestors",
    "is_acyclic",
    "moralize",
    "separated",
    "v",
    "w",
    "EXTENSION_NODE",
    "IndependenceModel",
    "Query",
    "c_separated",
    "d_separated",
    "extended_graph",
    "independence_model",
    "pairwise_relations",
    "Dataset",
    "GPriorConfig",
    "LocalModel",
    "ScoreTable",
    "design_matrices",
    "log_bayes_factor",
    "log_marginal_likelihood",
    "log_parent_prior",
    "read_dataset_csv",
    "score_table",
    "write_dataset_csv",
    "EXACT_NODE_LIMIT",
    "SearchResult",
    "estimate",
    "estimate_with_result",
    "exact_map",
    "greedy_map",
    "GroundTruth",
    "SimConfig",
    "sample_dag",
    "simulate",
    "ESTIMATORS",
    "BenchmarkReport",
    "BenchmarkRow",
    "MisspecReport",
    "MisspecRow",
    "ShdReport",
    "run_benchmark",
    "run_misspec_sweep",
    "shd",
]
