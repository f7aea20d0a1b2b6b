"""Symmetric and antisymmetric kernels for learning and eigenvalue problems."""

from .antisym import AntisymKernel, antisym_eval, antisym_gauss_partial, slater_kernel_eval
from .combinatorics import (
    MultiIndex,
    Permutation,
    antisym_feature_dim,
    enumerate_antisym_multiindices,
    enumerate_permutations,
    partition_count,
    poly_feature_dim,
    sym_feature_dim,
)
from .graphs import (
    GraphKernel,
    KernelTensor,
    LabeledGraph,
    build_gaussian_tensor,
    build_laplacian_tensor,
    graph_kernel,
    hyperpermanent_isolated,
    hyperpermanent_laplace,
    hyperpermanent_naive,
    hyperpermanent_pairwise_symmetric,
    pad_graph,
)
from .kernels import KernelSpec, gaussian, kernel_from_config, laplacian, polynomial, radial
from .learn import (
    GramMatrix,
    RegressionModel,
    augment_antisymmetric,
    gram,
    kpca,
    krr_fit,
    krr_predict,
    mercer_features,
)
from .schrodinger import (
    EigenSolution,
    ProblemSpec,
    assemble_G00,
    assemble_G10,
    boundary_constraints,
    box_analytic_eigenvalue,
    eval_eigenfunction,
    sample_problem,
    solve_box_problem,
    solve_constrained_gevp,
)
from .sym import QuotientGaussianKernel, SymKernel, permanent, quotient_sym_eval, sym_eval

__version__ = "0.1.0"

__all__ = [
    "AntisymKernel",
    "EigenSolution",
    "GramMatrix",
    "GraphKernel",
    "KernelSpec",
    "KernelTensor",
    "LabeledGraph",
    "MultiIndex",
    "Permutation",
    "ProblemSpec",
    "QuotientGaussianKernel",
    "RegressionModel",
    "SymKernel",
    "antisym_eval",
    "antisym_feature_dim",
    "antisym_gauss_partial",
    "assemble_G00",
    "assemble_G10",
    "augment_antisymmetric",
    "boundary_constraints",
    "box_analytic_eigenvalue",
    "build_gaussian_tensor",
    "build_laplacian_tensor",
    "enumerate_antisym_multiindices",
    "enumerate_permutations",
    "eval_eigenfunction",
    "gaussian",
    "gram",
    "graph_kernel",
    "hyperpermanent_isolated",
    "hyperpermanent_laplace",
    "hyperpermanent_naive",
    "hyperpermanent_pairwise_symmetric",
    "kernel_from_config",
    "kpca",
    "krr_fit",
    "krr_predict",
    "laplacian",
    "mercer_features",
    "pad_graph",
    "partition_count",
    "permanent",
    "poly_feature_dim",
    "polynomial",
    "quotient_sym_eval",
    "radial",
    "sample_problem",
    "slater_kernel_eval",
    "solve_box_problem",
    "solve_constrained_gevp",
    "sym_eval",
    "sym_feature_dim",
]
