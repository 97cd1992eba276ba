"""Anti-powers in the Thue-Morse word: exact scans, bound checks, and sweeps."""

from .antipower import (
    AntiPowerEngine,
    ApQuery,
    BlockFingerprint,
    ap_membership_pair,
    big_gamma,
    first_repeat_index,
    frak_k,
    gamma,
    is_anti_power,
)
from .bounds import (
    BoundCheck,
    ConstructionTuple,
    FamilyPoint,
    check_gencor,
    check_lower_bound_gen47,
    check_prop_yvy,
    check_upper_bound,
    family_point,
    verify_construction,
)
from .errors import (
    CodingError,
    DomainError,
    HypothesisError,
    InternalInconsistencyError,
    ResourceError,
    TmError,
)
from .harness import RatioRow, ConjectureReport, conjecture_scan, family_probe, ratio_sweep
from .word import Bits, Segment, TmBuffer, extend_to, mu_apply, segment_bits, sigma_apply, tm_letter

__version__ = "0.1.0"
