"""Randomized reference classifier (RRC) and soft confusion matrix (SCM) correction."""

from .baseclf import Kind, predict_support, train
from .core import (Dataset, DatasetSummary, decide, imbalance_ratio, lowest_argmax, make_rng,
                   normalize_features, summarize)
from .datasets import load_bundled, load_dataset, write_csv
from .evaluation import LossReport, compute_losses, tune_scm
from .rrc import RrcModel, Variant, build_rrc, class_probabilities, rrc_probabilities
from .scm import ScmClassifier, build_bank, build_scm, local_confusion

__version__ = "0.1.0"

__all__ = [
    "Dataset", "DatasetSummary", "Kind", "LossReport", "RrcModel", "ScmClassifier", "Variant",
    "build_bank", "build_rrc", "build_scm", "class_probabilities", "compute_losses", "decide",
    "imbalance_ratio", "load_bundled", "load_dataset", "local_confusion", "lowest_argmax",
    "make_rng", "normalize_features", "predict_support", "rrc_probabilities", "summarize",
    "train", "tune_scm", "write_csv",
]
