"""Supervised spectral embedding of interactome graphs for comorbidity prediction.

The pipeline embeds the shortest-path matrix of a protein-interaction
network (centered or uncentered spectral routes), builds disease-pair
features by summing embedding rows over each disease's genes, and selects
the embedding dimensions greedily by the cross-validated AUC of an RBF-SVM
comorbidity classifier, with rank-by-value selection as the baseline.
"""

__version__ = "0.1.0"

from .netio import (  # noqa: F401
    DiseaseGeneMap,
    InteractomeGraph,
    LabeledPairs,
    ParseError,
    RRTable,
    label_pairs,
    largest_connected_component,
    load_disease_genes,
    load_edge_list,
    load_rr_table,
)
from .graphdist import (  # noqa: F401
    all_pairs_shortest_paths,
    node_degrees,
    read_distance_cache,
    single_source_distances,
    write_distance_cache,
)
from .spectral import (  # noqa: F401
    Embedding,
    SpectralBasis,
    build_raw_embedding,
    eig_sym_topk,
    embed_centered,
    embed_scaled,
    embed_vectors,
    gram_center,
    svd_sym_topk,
)
from .pairfeat import (  # noqa: F401
    PairDataset,
    assemble_dataset,
    disease_feature,
    select_coordinates,
)
from .svmrbf import (  # noqa: F401
    FoldPlan,
    MetricSet,
    SvmModel,
    compute_metrics,
    cross_val_mean_auc,
    rbf_kernel,
    stratified_kfold,
    svm_decision,
    svm_fit,
)
from .bse import (  # noqa: F401
    DataBundle,
    SelectionResult,
    VariantConfig,
    bse_select,
    build_bundle,
    evaluate_variant,
    rank_select,
    union_first_m,
)
from .bioanalysis import (  # noqa: F401
    annotate,
    compare_methods,
    most_frequent_dims,
    ratio_R,
    top_genes,
    union_dim_scores,
)
from .synthgen import SynthConfig, generate_benchmark, write_benchmark  # noqa: F401
