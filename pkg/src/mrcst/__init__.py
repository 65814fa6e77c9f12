"""Multitype reconstruction of subject-grouped sample sets (MRCST)."""
from .clustering import ClusterModel, ClusteredSegment, distance, iterative_mean_clustering, kmeans, transform_type_b
from .convolution import convolve_loop, convolve_matrix, extend_matrix, transform_type_c
from .dataset import (Normalizer, SubjectSegment, TransformedDataset, apply_normalizer, fit_normalizer,
                      load_generic_csv, load_maxlittle, load_sakar, split_loso, write_generic_csv)
from .envelope import EnvelopeStats, envelope_stats, round_index, transform_type_a
from .fusion import ConfusionCounts, FusionWeights, compute_metrics, fuse, grid_search_weights, subject_decision

__version__ = "0.1.0"
