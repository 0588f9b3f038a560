"""Spectral clustering of directed graphs via Hermitian adjacency matrices."""

from .graph import (
    Digraph,
    HermitianOperator,
    RandomWalkOperator,
    DegreeVector,
    build_hermitian,
    absolute_degrees,
    normalize_rw,
    normalize_sym,
    symmetrize_naive,
    cocluster_products,
    net_flow_transform,
    cap_entries,
    read_edge_list,
    write_edge_list,
    read_dense_csv,
)
from .spectral import (
    EigenPair,
    SpectralEmbedding,
    UnpairedSpectrumError,
    eig_hermitian,
    eig_random_walk,
    select_pairs,
    default_epsilon,
    projection_embedding,
    eigvec_embedding,
    spectral_norm,
)
from .kmeans import KmeansResult, kmeans, kmeans_cost
from .dsbm import (
    DsbmParams,
    LabeledGraph,
    MetaSpectrum,
    cyclic_F,
    complete_random_F,
    sample,
    f_tilde,
    meta_spectrum,
    expected_adjacency,
    assumption_check,
    misclassification_bound,
    theorem_bound,
    cyclic_bound,
)
from .metrics import (
    Partition,
    PairScore,
    ari,
    misclassified,
    cut_weights,
    ci,
    ci_size,
    ci_vol,
    top_pairs,
    ci_matrix,
)
from .pipelines import (
    METHODS,
    MethodOptions,
    SweepSpec,
    SweepRow,
    run_method,
    method_embedding,
    sweep,
    aggregate,
    concentration_experiment,
    spectrum_report,
    time_methods,
)

__version__ = "0.1.0"
