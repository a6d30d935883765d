"""Exact, finite-resolution computation on positive-measure subtrees of
Cantor space: measure pruning, perfect-subtree extraction, adversarial
halting-table trees, Mathias-style forcing steps, and density witness
searches, all with exact dyadic arithmetic and verifiable certificates.
"""

from .adversary import (
    HaltingTable,
    adversarial_tree,
    decode_halting,
    in_sparse_class,
    modulus,
    one_positions,
)
from .bits import MAX_DEPTH
from .clopen import ClopenTree
from .density import (
    DensityAnalysis,
    density_maximization_analysis,
    density_witness_greedy,
    density_witness_maximization,
)
from .dyadic import Dyadic
from .embedding import PerfectEmbedding, find_embedding
from .errors import *  # noqa: F401,F403
from .extract import (
    Coloring,
    ExtractionCertificate,
    GrowthSchedule,
    build_witness,
    choose_delta,
    extract_perfect,
    growth_schedule,
    homogeneous_embedding,
    in_family,
)
from .finite import FiniteTree, is_end_extension, shape_depth, trim
from .forcing import (
    BUILTIN_FUNCTIONALS,
    Condition,
    Constant,
    Split,
    TreeFunctional,
    condition_is_valid,
    density_extend,
    forcing_step,
    is_condition,
    outputs_agree,
    split_search,
    splitting_extend,
    table_functional,
)
from .kucera import PruneReport, has_threshold_property, prune, prune_threshold
from .randomgen import GenSpec, SplitMix64, gen_random_positive_tree

__version__ = "0.1.0"
