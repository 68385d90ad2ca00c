"""Exact and approximate products of 0-1 matrices with clustered rows or columns."""
from .approx import ApproxResult, mmclus_approx, mmclus_r_approx
from .bitmatrix import (BitMatrix, BitMatrixBuilder, BitRow, DimensionError, ParameterError, ham,
                        inner_product, naive_multiply, transpose)
from .clustering import (Clustering, ProjectedPoints, assign_nearest, brute_force_discrete_kcenter,
                         gonzalez, project, randomized_kcenter)
from .exact import (ContractError, ExactResult, SpanningTree, build_cluster_spanning_tree,
                    exact_clustered, mmclus_st, traverse, tree_from_edges)
from .planted import PlantedSpec, generate
from .query import (PreprocState, exact_via_queries, mmclus_preproc, mmclus_query,
                    mmclus_query_batch, mmclus_r_preproc)

__all__ = [
    "ApproxResult", "BitMatrix", "BitMatrixBuilder", "BitRow", "Clustering", "ContractError",
    "DimensionError", "ExactResult", "ParameterError", "PlantedSpec", "PreprocState",
    "ProjectedPoints", "SpanningTree", "assign_nearest", "brute_force_discrete_kcenter",
    "build_cluster_spanning_tree", "exact_clustered", "exact_via_queries", "gonzalez", "generate",
    "ham", "inner_product", "mmclus_approx", "mmclus_preproc", "mmclus_query",
    "mmclus_query_batch", "mmclus_r_approx", "mmclus_r_preproc", "mmclus_st", "naive_multiply",
    "project", "randomized_kcenter", "transpose", "traverse", "tree_from_edges",
]
