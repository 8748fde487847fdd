"""ratiokit: integer-ratio rhythm category detection for temporal sequences.

Computes scale-invariant rhythm ratios from interval sequences, derives the
ratio distribution implied by a chosen null hypothesis (exponential,
uniform, half-normal, or tabulated intervals), normalizes binned ratio
counts against that null, and runs the associated Wilcoxon signed-rank and
Kolmogorov-Smirnov tests.
"""

from ._kernels import get_backend
from .binstats import (
    BinLayout,
    BinRole,
    BinWidth,
    CombinedCounts,
    ModelMass,
    NormalizedCounts,
    TestReport,
    combine_off_bins,
    count_bins,
    ks_test,
    normalize_counts,
    one_to_one_layout,
    paired_experiment,
    thirds_layout,
    wilcoxon_signed_rank,
)
from .errors import DomainError, NonConvergenceError, RatioKitError, ValidationError
from .io_cli import (
    AnalysisConfig,
    DensityCurve,
    emit_density_curves,
    load_sequences,
    run_analysis,
    simulate_command,
)
from .nulls import (
    Exponential,
    HalfNormal,
    RatioDistribution,
    Tabulated,
    Uniform,
    bin_mass_analytic,
    rescale_minus,
    rescale_plus,
    sample_sequence,
)
from .numerics import (
    McEstimate,
    QuadratureResult,
    integrate_adaptive,
    invert_monotone,
    mc_bin_mass,
)
from .ratios import (
    FractionQ,
    IntervalSequence,
    OnsetSequence,
    RescaledMinus,
    RescaledPlus,
    StandardR,
    intervals_from_onsets,
    ratio_q,
    ratio_r,
    sequence_ratios,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "get_backend",
    # ratios
    "OnsetSequence",
    "IntervalSequence",
    "FractionQ",
    "StandardR",
    "RescaledPlus",
    "RescaledMinus",
    "intervals_from_onsets",
    "ratio_q",
    "ratio_r",
    "sequence_ratios",
    # null models
    "Exponential",
    "Uniform",
    "HalfNormal",
    "Tabulated",
    "RatioDistribution",
    "rescale_plus",
    "rescale_minus",
    "bin_mass_analytic",
    "sample_sequence",
    # numerics
    "QuadratureResult",
    "McEstimate",
    "integrate_adaptive",
    "invert_monotone",
    "mc_bin_mass",
    # binning and tests
    "BinRole",
    "BinLayout",
    "BinWidth",
    "ModelMass",
    "NormalizedCounts",
    "CombinedCounts",
    "TestReport",
    "one_to_one_layout",
    "thirds_layout",
    "count_bins",
    "normalize_counts",
    "combine_off_bins",
    "wilcoxon_signed_rank",
    "ks_test",
    "paired_experiment",
    # io / cli
    "AnalysisConfig",
    "DensityCurve",
    "load_sequences",
    "run_analysis",
    "emit_density_curves",
    "simulate_command",
    # errors
    "RatioKitError",
    "DomainError",
    "ValidationError",
    "NonConvergenceError",
]
