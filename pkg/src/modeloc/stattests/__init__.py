"""Statistical tests backing the refinement stages."""

from .dip import DEFAULT_N_BOOT, DIP_TABLE_SEED, DipResult, dip_statistic, dip_test
from .normality import (
    KSNormalityResult,
    MardiaResult,
    ks_chisq_test,
    mardia_test,
    normality_rejects,
)

__all__ = [
    "DEFAULT_N_BOOT",
    "DIP_TABLE_SEED",
    "DipResult",
    "dip_statistic",
    "dip_test",
    "KSNormalityResult",
    "MardiaResult",
    "ks_chisq_test",
    "mardia_test",
    "normality_rejects",
]
