"""Space-filling vector quantization.

Codebook training on a piecewise-linear curve, plain-VQ and TSP-reordered
baselines, arrangement metrics, and latent-direction extraction. All heavy
lifting happens in the C++ extension module.
"""

from ._sfvq import (
    SfvqError,
    adjacency_ratio,
    angle_deg,
    apply_shift,
    correlation_profile,
    expand,
    extract_direction,
    generate,
    heatmap_matrix,
    hilbert_corners,
    init_norm_sorted,
    init_random,
    inside_fraction,
    jump_count,
    order_path,
    outlier_count,
    pairwise_stats,
    path_length,
    pca_directions,
    pullback_codebook,
    quantize_nearest,
    quantize_segment,
    read_vectors,
    render_curve_svg,
    render_heatmap_pgm,
    sample_line,
    train,
    write_vectors,
    __version__,
)

__all__ = [
    "SfvqError",
    "adjacency_ratio",
    "angle_deg",
    "apply_shift",
    "correlation_profile",
    "expand",
    "extract_direction",
    "generate",
    "heatmap_matrix",
    "hilbert_corners",
    "init_norm_sorted",
    "init_random",
    "inside_fraction",
    "jump_count",
    "order_path",
    "outlier_count",
    "pairwise_stats",
    "path_length",
    "pca_directions",
    "pullback_codebook",
    "quantize_nearest",
    "quantize_segment",
    "read_vectors",
    "render_curve_svg",
    "render_heatmap_pgm",
    "sample_line",
    "train",
    "write_vectors",
]
