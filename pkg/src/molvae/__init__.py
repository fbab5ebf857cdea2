"""molvae: sequence VAE toolkit for SMILES molecule generation.

Trains GRU-based variational autoencoders on SMILES corpora with a
re-balanced ELBO (KL weight below one), quantifies posterior collapse via
mutual-information estimates and the teacher-forcing loss underestimation
ratio, and optimizes molecular property scores in the learned latent space
with Gaussian-process Bayesian optimization.
"""

from .data import Corpus, CorpusStats, iterate_batches, load_corpus, pad_batch
from .diagnostics import (
    MiEstimate,
    UnderestimationReport,
    alpha_from_ratio,
    batch_mutual_information,
    kl_divergence_mc,
    mutual_information,
    underestimation_ratio,
)
from .evaluation import (
    GenerationTimeout,
    ReconReport,
    SampleReport,
    ValidityReport,
    generate_unique_valid,
    prior_validity,
    reconstruction_accuracy,
)
from .gp import expected_improvement, gp_build, gp_fit, gp_predict
from .latent_opt import (
    BoResult,
    NoValidCandidates,
    PropertyRecord,
    bo_loop,
    load_property_csv,
    optimize_molecules,
)
from .model import (
    DecoderConfig,
    EncoderConfig,
    InvalidWeight,
    LossBreakdown,
    ModelConfig,
    SmilesVae,
    elbo,
    rebalanced_loss,
)
from .smiles import (
    ErrorClass,
    LexicalError,
    ValidityVerdict,
    check_validity,
    count_large_rings,
    detokenize,
    parse,
    sssr,
    tokenize,
)
from .training import TrainConfig, TrainResult, load_model, save_model, train
from .vocab import EOS_ID, PAD_ID, SOS_ID, UNK_ID, TokenSequence, Vocabulary

__version__ = "0.1.0"

__all__ = [
    "Corpus", "CorpusStats", "iterate_batches", "load_corpus", "pad_batch",
    "MiEstimate", "UnderestimationReport", "alpha_from_ratio",
    "batch_mutual_information", "kl_divergence_mc", "mutual_information",
    "underestimation_ratio",
    "GenerationTimeout", "ReconReport", "SampleReport", "ValidityReport",
    "generate_unique_valid", "prior_validity", "reconstruction_accuracy",
    "expected_improvement", "gp_build", "gp_fit", "gp_predict",
    "BoResult", "NoValidCandidates", "PropertyRecord", "bo_loop",
    "load_property_csv", "optimize_molecules",
    "DecoderConfig", "EncoderConfig", "InvalidWeight", "LossBreakdown",
    "ModelConfig", "SmilesVae", "elbo", "rebalanced_loss",
    "ErrorClass", "LexicalError", "ValidityVerdict", "check_validity",
    "count_large_rings", "detokenize", "parse", "sssr", "tokenize",
    "TrainConfig", "TrainResult", "load_model", "save_model", "train",
    "EOS_ID", "PAD_ID", "SOS_ID", "UNK_ID", "TokenSequence", "Vocabulary",
    "__version__",
]
