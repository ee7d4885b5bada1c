"""Information-geometric embedding toolkit.

Estimate a density per data set, measure pairwise divergences, approximate
manifold geodesics over a neighbor graph, and embed the result spectrally.
"""

from ._fine import (  # noqa: F401
    # errors
    Error,
    FormatError,
    EmptyInputError,
    ParseError,
    DegenerateDocumentError,
    InvalidParameterError,
    InsufficientSamplesError,
    DimensionError,
    MetricMismatchError,
    SupportError,
    DisconnectedGraphError,
    InsufficientSpectrumError,
    StratificationError,
    MissingLabelError,
    # densities
    Kde,
    MultinomialPdf,
    fit_kde,
    silverman_bandwidth,
    term_frequency_pdf,
    normalized_pdf,
    # divergences
    GaussianParams,
    Metric,
    DissimilarityMatrix,
    kl_empirical,
    kl_symmetric,
    fisher_approx_from_kl,
    kl_gaussian_closed,
    fisher_gaussian_closed,
    hellinger_multinomial,
    cosine_multinomial,
    euclidean_l2_multinomial,
    alpha_divergence_multinomial,
    build_dissimilarity_matrix,
    save_dissimilarity_csv,
    load_dissimilarity_csv,
    # geodesic graph
    GraphEdge,
    NeighborGraph,
    default_graph_k,
    build_neighbor_graph,
    ensure_connected,
    geodesic_distances,
    # embeddings
    EmbedMethod,
    LemParams,
    Embedding,
    classical_mds,
    laplacian_eigenmaps,
    ccdr,
    pca_embed,
    knn_classify,
    diffusion_kernel_multinomial,
    jacobi_eigen,
    # synthetic data
    gen_swiss_roll_sets,
    gen_multinomial_clusters,
)

__version__ = "0.1.0"
