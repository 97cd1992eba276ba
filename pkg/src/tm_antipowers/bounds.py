"""Bound formulas for K_j(m), Gamma_j(k), and explicit constructions.

Every bound is an exact :class:`fractions.Fraction`; comparisons against
observed integers are therefore exact.  A :class:`BoundCheck` whose
hypothesis is not met is reported as ``skipped``, never as a pass.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .antipower import AntiPowerEngine, default_engine
from .errors import DomainError, HypothesisError
from .word import Bits, Segment, letters_direct, tm_letter

LESS = "<"
LESS_EQUAL = "<="
GREATER = ">"
GREATER_EQUAL = ">="

_COMPARE = {
    LESS: lambda a, b: a < b,
    LESS_EQUAL: lambda a, b: a <= b,
    GREATER: lambda a, b: a > b,
    GREATER_EQUAL: lambda a, b: a >= b,
}

DEFAULT_S_CAP = 64


def ell_of(j: int, m: int) -> int:
    """ceil(log2(m + j)) in integer arithmetic."""
    if m < 1 or j < 0:
        raise DomainError(f"ell_of needs m >= 1 and j >= 0, got m={m}, j={j}")
    return (m + j - 1).bit_length()


def delta_of(m: int) -> int:
    """ceil(log2(m / 3)); equals -1 at m = 1."""
    if m < 1:
        raise DomainError(f"delta_of needs m >= 1, got {m}")
    if m == 1:
        return -1
    return ((m - 1) // 3).bit_length()


def ceil_log2(j: int) -> int:
    """ceil(log2 j) with the convention ceil(log2 0) = 0."""
    if j < 0:
        raise DomainError(f"negative argument {j}")
    return 0 if j == 0 else (j - 1).bit_length()


def one_mod8_exponent(m: int) -> Optional[int]:
    """L when m = 2^L h + 1 with L >= 3 and h odd, else None."""
    if m < 9 or (m - 1) % 8:
        return None
    x = m - 1
    return (x & -x).bit_length() - 1


@dataclass
class BoundCheck:
    lemma_id: str
    j: int
    m: int
    ell: int
    hypothesis_met: bool
    bound: Optional[Fraction]
    comparison: str
    observed: Optional[int]
    holds: bool
    witness: Optional[int] = None
    note: str = ""

    @property
    def status(self) -> str:
        if not self.hypothesis_met:
            return "skipped"
        return "pass" if self.holds else "fail"

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["bound"] = None if self.bound is None else str(self.bound)
        rec["status"] = self.status
        return rec


def _skipped(lemma_id, j, m, comparison, note) -> BoundCheck:
    return BoundCheck(lemma_id, j, m, ell_of(j, m), False, None, comparison, None, True, note=note)


def _checked(lemma_id, j, m, bound, comparison, observed, witness=None, note="") -> BoundCheck:
    holds = _COMPARE[comparison](observed, bound)
    return BoundCheck(lemma_id, j, m, ell_of(j, m), True, bound, comparison, observed, holds, witness, note)


# -- individual upper-bound formulas ------------------------------------

def even_bound(j: int, m: int) -> Fraction:
    ell = ell_of(j, m)
    return 2 ** (ell + 1) + Fraction(2 ** (ell + 1) - j, m)


def one_mod8_a_bound(j: int, m: int, L: int) -> Fraction:
    ell = ell_of(j, m)
    return 2**ell + Fraction(2**ell * (2 ** (L + 1) + 4) - j, m)


def one_mod8_b_bound(j: int, m: int, n: int) -> Fraction:
    ell = ell_of(j, m)
    return 2 ** (ell + 1) - Fraction(2 ** (ell + 1) * (n - 1) + j, m)


def mod32_29_bound(j: int, m: int) -> Fraction:
    ell = ell_of(j, m)
    return 2 ** (ell + 1) + Fraction(20 * 2**ell - j, m)


def odd_other_bound(j: int, m: int) -> Fraction:
    ell = ell_of(j, m)
    return 2**ell + Fraction(37 * 2**ell - j, m)


def s_witness_bound(j: int, m: int, s: int) -> Fraction:
    ell = ell_of(j, m)
    return 2**ell + Fraction(2**ell * (s + 1) - j, m)


def g_envelope(j: int, ell: int) -> Fraction:
    """2^l + 2^(l+1) max{2^l + 2 + j, 20} / (2^(l-1) - j)."""
    den = Fraction(2**ell, 2) - j
    if den <= 0:
        raise HypothesisError(f"2^(l-1) - j must be positive (l={ell}, j={j})")
    return 2**ell + 2 ** (ell + 1) * max(2**ell + 2 + j, 20) / den


def uniform_1mod8_bound(j: int, m: int) -> Fraction:
    ell = ell_of(j, m)
    den = Fraction(2**ell, 2) - j
    if den <= 0:
        raise HypothesisError(f"2^(l-1) - j must be positive (l={ell}, j={j})")
    return 2**ell + 2 ** (ell + 1) * (2**ell + 2 + j) / den


def case_upper_bound(j: int, m: int) -> Fraction:
    """The per-residue-class bound covering m (strict upper bound on K_j(m))."""
    if m < 2:
        raise DomainError(f"case bounds need m >= 2, got {m}")
    if m % 2 == 0:
        return even_bound(j, m)
    L = one_mod8_exponent(m)
    if L is not None:
        return one_mod8_a_bound(j, m, L)
    if m % 32 == 29:
        return mod32_29_bound(j, m)
    return odd_other_bound(j, m)


def find_s_witness(m: int, s_cap: int = DEFAULT_S_CAP) -> Optional[int]:
    """Smallest s <= s_cap with t_s t_{s+1} = t_{m+s} t_{m+s+1}."""
    for s in range(1, s_cap + 1):
        if tm_letter(s) == tm_letter(m + s) and tm_letter(s + 1) == tm_letter(m + s + 1):
            return s
    return None


def admissible_ns(j: int, m: int) -> list[int]:
    """All n allowed by the m = 1 (mod 8) second bound's hypotheses."""
    L = one_mod8_exponent(m)
    if L is None:
        return []
    ell = ell_of(j, m)
    out = []
    for n in range(2, 2 ** (L - 1) + 1):
        if tm_letter(m - n) != tm_letter(m - n + 1):
            continue
        # m + j <= (1 - 1/(2n+2)) 2^l
        if (m + j) * (2 * n + 2) <= (2 * n + 1) * 2**ell:
            out.append(n)
    return out


def triple_equality(m: int, n: int) -> bool:
    """t_{m-2n} t_{m-2n+1} t_{m-2n+2} == t_{2m-2n} t_{2m-2n+1} t_{2m-2n+2}."""
    a, b = m - 2 * n, 2 * m - 2 * n
    if a < 1:
        return False
    return all(tm_letter(a + i) == tm_letter(b + i) for i in range(3))


LEMMA_IDS = (
    "EVEN",
    "ONE_MOD8_A",
    "ONE_MOD8_B",
    "MOD32_29",
    "ODD_OTHER",
    "UNIFORM_1MOD8",
    "UNIFORM_OTHER",
    "S_WITNESS",
)


def check_upper_bound(
    lemma_id: str,
    j: int,
    m: int,
    engine: Optional[AntiPowerEngine] = None,
    s_cap: int = DEFAULT_S_CAP,
) -> BoundCheck:
    """Evaluate one registry lemma at (j, m) against the observed K_j(m)."""
    if lemma_id not in LEMMA_IDS:
        raise DomainError(f"unknown lemma id {lemma_id!r}; expected one of {LEMMA_IDS}")
    if j < 0 or m < 2:
        raise DomainError(f"upper bounds need j >= 0 and m >= 2, got j={j}, m={m}")
    engine = engine or default_engine()
    L = one_mod8_exponent(m)
    ell = ell_of(j, m)

    if lemma_id == "EVEN":
        if m % 2:
            return _skipped(lemma_id, j, m, LESS, "m is odd")
        return _checked(lemma_id, j, m, even_bound(j, m), LESS, engine.frak_k(j, m))

    if lemma_id == "ONE_MOD8_A":
        if L is None:
            return _skipped(lemma_id, j, m, LESS, "m is not 2^L h + 1 with L >= 3, h odd")
        return _checked(lemma_id, j, m, one_mod8_a_bound(j, m, L), LESS, engine.frak_k(j, m), witness=L)

    if lemma_id == "ONE_MOD8_B":
        ns = admissible_ns(j, m) if L is not None else []
        if not ns:
            return _skipped(lemma_id, j, m, LESS_EQUAL, "no admissible n")
        observed = engine.frak_k(j, m)
        # the bound decreases in n, so the largest admissible n is the tightest
        n = max(ns)
        bad_triples = [x for x in ns if not triple_equality(m, x)]
        note = f"admissible n: {len(ns)}"
        if bad_triples:
            note += f"; letter-triple equality fails for n in {bad_triples}"
        check = _checked(lemma_id, j, m, one_mod8_b_bound(j, m, n), LESS_EQUAL, observed, witness=n, note=note)
        return check

    if lemma_id == "MOD32_29":
        if m % 32 != 29:
            return _skipped(lemma_id, j, m, LESS, "m is not 29 mod 32")
        return _checked(lemma_id, j, m, mod32_29_bound(j, m), LESS, engine.frak_k(j, m))

    if lemma_id == "ODD_OTHER":
        if m % 2 == 0 or m % 8 == 1 or m % 32 == 29:
            return _skipped(lemma_id, j, m, LESS, "m is even, 1 mod 8, or 29 mod 32")
        return _checked(lemma_id, j, m, odd_other_bound(j, m), LESS, engine.frak_k(j, m))

    if lemma_id == "UNIFORM_1MOD8":
        if L is None:
            return _skipped(lemma_id, j, m, LESS_EQUAL, "m is not 2^L h + 1 with L >= 3, h odd")
        if 2 ** (ell - 1) <= j:
            return _skipped(lemma_id, j, m, LESS_EQUAL, "2^(l-1) - j is not positive")
        return _checked(lemma_id, j, m, uniform_1mod8_bound(j, m), LESS_EQUAL, engine.frak_k(j, m))

    if lemma_id == "UNIFORM_OTHER":
        if m % 8 == 1:
            return _skipped(lemma_id, j, m, LESS_EQUAL, "m is 1 mod 8")
        if 2 ** (ell - 1) <= j:
            return _skipped(lemma_id, j, m, LESS_EQUAL, "2^(l-1) - j is not positive")
        return _checked(lemma_id, j, m, g_envelope(j, ell), LESS_EQUAL, engine.frak_k(j, m))

    # S_WITNESS
    s = find_s_witness(m, s_cap)
    if s is None:
        return _skipped(lemma_id, j, m, LESS, f"no witness s <= {s_cap}")
    return _checked(lemma_id, j, m, s_witness_bound(j, m, s), LESS, engine.frak_k(j, m), witness=s)


def check_all_upper_bounds(j: int, m: int, engine: Optional[AntiPowerEngine] = None) -> list[BoundCheck]:
    return [check_upper_bound(lid, j, m, engine) for lid in LEMMA_IDS]


def check_lower_bound_gen47(
    j: int, ell: int, engine: Optional[AntiPowerEngine] = None
) -> tuple[BoundCheck, BoundCheck]:
    """K_j(3*2^(l-2)+1) > (5*2^(2l-3)-j)/m and K_j(2^(l-1)+3) > (2^(2l-2)-j)/m'."""
    if ell < 3 or j < 0:
        raise DomainError(f"need l >= 3 and j >= 0, got l={ell}, j={j}")
    engine = engine or default_engine()
    m1 = 3 * 2 ** (ell - 2) + 1
    m2 = 2 ** (ell - 1) + 3
    b1 = Fraction(5 * 2 ** (2 * ell - 3) - j, m1)
    b2 = Fraction(2 ** (2 * ell - 2) - j, m2)
    first = _checked("GEN47_A", j, m1, b1, GREATER, engine.frak_k(j, m1), witness=ell)
    second = _checked("GEN47_B", j, m2, b2, GREATER, engine.frak_k(j, m2), witness=ell)
    return first, second


def check_gencor(j: int, k: int, engine: Optional[AntiPowerEngine] = None) -> list[BoundCheck]:
    """For each odd m <= 3k-4 outside the anti-power set, check k-1 >= 2^delta(m).

    In these records ``observed`` is k-1 and ``bound`` is 2^delta(m).
    """
    if k < 3 or j < 0:
        raise DomainError(f"need k >= 3 and j >= 0, got k={k}, j={j}")
    engine = engine or default_engine()
    out = []
    for m in range(1, 3 * k - 3, 2):
        if engine.is_anti_power(j, k, m):
            continue
        bound = Fraction(2) ** delta_of(m)
        out.append(_checked("GENCOR", j, m, bound, GREATER_EQUAL, k - 1, witness=k))
    return out


def check_prop_yvy(m: int, prefix_len: int, engine: Optional[AntiPowerEngine] = None) -> list[tuple[int, int]]:
    """All (position, |yv|) where equal length-m factors violate 2^delta(m) | |yv|.

    Positions are 1-based starts of the first occurrence of y.  Every pair of
    equal factors y at a < b inside the prefix with b - a >= m is examined.
    """
    if m < 2:
        raise DomainError(f"need m >= 2, got {m}")
    if prefix_len < 3 * m:
        raise DomainError(f"need prefix_len >= 3m, got {prefix_len} < {3 * m}")
    engine = engine or default_engine()
    engine.buffer.extend_to(prefix_len)
    starts = np.arange(0, prefix_len - m + 1, dtype=np.int64)
    rows = engine.buffer.blocks(starts, m)
    # exact equality classes of factors
    _, cls = np.unique(rows, axis=0, return_inverse=True)
    cls = cls.reshape(-1)
    period = 2 ** delta_of(m)
    violations = []
    for c in np.unique(cls):
        pos = starts[cls == c]
        if pos.size < 2:
            continue
        gap = pos[None, :] - pos[:, None]
        bad = (gap >= m) & (gap % period != 0)
        for a, b in zip(*np.nonzero(bad)):
            violations.append((int(pos[a]) + 1, int(gap[a, b])))
    violations.sort()
    return violations


# -- constructions ----------------------------------------------------------

@dataclass(frozen=True)
class ConstructionTuple:
    j: int
    r: int
    m: int
    ell: int
    h: int
    p: int
    q: int

    def __post_init__(self):
        for name in ("j", "r", "m", "ell", "h", "p", "q"):
            if getattr(self, name) < 0:
                raise DomainError(f"construction field {name} must be nonnegative")


@dataclass
class ConstructionVerdict:
    tuple: ConstructionTuple
    conditions: list[bool]
    first_failing: Optional[int]
    blocks_equal: Optional[bool] = None
    frak_upper: Optional[int] = None
    segments: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.first_failing is None and bool(self.blocks_equal)

    def to_record(self) -> dict:
        return {
            **asdict(self.tuple),
            "conditions": self.conditions,
            "first_failing": self.first_failing,
            "blocks_equal": self.blocks_equal,
            "frak_upper": self.frak_upper,
            "ok": self.ok,
        }


def construction_conditions(t: ConstructionTuple) -> list[bool]:
    j, r, m, ell, h, p, q = t.j, t.r, t.m, t.ell, t.h, t.p, t.q
    if ell < 2:
        return [False] * 6
    quarter = 2 ** (ell - 2)
    top = 2 ** (ell + 1)
    return [
        h < quarter,
        2 <= m < 2**ell,
        r * m == top * p + 2 ** (ell - 1) + h - j,
        (r + 1) * m <= top * p + 5 * quarter - j,
        (r + quarter) * m == top * q + 3 * quarter + h - j,
        tm_letter(p + 1) != tm_letter(q + 1),
    ]


def verify_construction(t: ConstructionTuple) -> ConstructionVerdict:
    """Check the six conditions, then compare the two promised blocks bit for bit.

    Blocks are generated by the popcount rule, so instances far beyond any
    buffer cap can still be confirmed.
    """
    conds = construction_conditions(t)
    failing = next((i + 1 for i, ok in enumerate(conds) if not ok), None)
    verdict = ConstructionVerdict(t, conds, failing)
    if failing is not None:
        return verdict
    shift = 2 ** (t.ell - 2)
    u = Segment.block(t.j, t.m, t.r)
    v = Segment.block(t.j, t.m, t.r + shift)
    bu = Bits.from_array(letters_direct(u.alpha, u.beta))
    bv = Bits.from_array(letters_direct(v.alpha, v.beta))
    verdict.blocks_equal = bu == bv
    verdict.frak_upper = t.r + shift + 1
    verdict.segments = [u, v]
    return verdict


def chi(j: int, rho: int) -> int:
    """2j+1 if popcount(j) + rho is even, else 4j+3."""
    if j < 1:
        raise DomainError(f"chi is defined for j >= 1, got {j}")
    if rho < 1:
        raise DomainError(f"chi needs rho >= 1, got {rho}")
    n = j.bit_count()
    return 2 * j + 1 if (n + rho) % 2 == 0 else 4 * j + 3


K_ALPHA = "k_alpha"
K_BETA = "K_beta"
KAPPA_RHO = "kappa_rho"
FAMILIES = (K_ALPHA, K_BETA, KAPPA_RHO)

_FAMILY_ALIASES = {
    "k_alpha": K_ALPHA, "kalpha": K_ALPHA, "ka": K_ALPHA, "kα": K_ALPHA,
    "K_beta": K_BETA, "Kbeta": K_BETA, "Kb": K_BETA, "Kβ": K_BETA,
    "kappa_rho": KAPPA_RHO, "kapparho": KAPPA_RHO, "kr": KAPPA_RHO, "κρ": KAPPA_RHO,
}


def normalize_family(name: str) -> str:
    try:
        return _FAMILY_ALIASES[name]
    except KeyError:
        raise DomainError(f"unknown family {name!r}; expected one of {FAMILIES}") from None


@dataclass(frozen=True)
class FamilyPoint:
    family: str
    parameter: int
    j: int
    k_value: int
    m_bound: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.m_bound, self.k_value)


_FLOOR_OFFSET = {K_ALPHA: 2, K_BETA: 9, KAPPA_RHO: 8}


def family_point(family: str, parameter: int, j: int) -> FamilyPoint:
    family = normalize_family(family)
    if j < 0:
        raise DomainError(f"j must be nonnegative, got {j}")
    floor = ceil_log2(j) + _FLOOR_OFFSET[family]
    if parameter < floor:
        raise HypothesisError(f"{family} parameter {parameter} is below the floor {floor} for j={j}")
    x = parameter
    if family == K_ALPHA:
        return FamilyPoint(family, x, j, 2 ** (2 * x) + 2**x + 2, 3 * 2 ** (2 * x) - 2**x + 1)
    if family == K_BETA:
        return FamilyPoint(
            family, x, j, 2 ** (2 * x + 1) + 3 * 2 ** (x + 3) + 49, 3 * 2 ** (2 * x + 1) - 2 ** (x - 1) + 1
        )
    if j == 0:
        raise HypothesisError("the kappa_rho family needs j >= 1 (chi_j is undefined at j = 0)")
    return FamilyPoint(family, x, j, 2**x + 2, 5 * 2 ** (x - 1) - 8 * chi(j, x) + 1)


def family_construction(family: str, parameter: int, j: int) -> ConstructionTuple:
    """The six-parameter tuple that witnesses a family point's lower bound."""
    point = family_point(family, parameter, j)
    x = parameter
    if point.family == K_ALPHA:
        if x < 3:
            raise HypothesisError(f"k_alpha construction needs alpha >= 3 for an integral p, got {x}")
        return ConstructionTuple(
            j=j, r=2**x + 1, m=point.m_bound, ell=2 * x + 2, h=j + 1,
            p=3 * 2 ** (x - 3), q=3 * 2 ** (2 * x - 3) + 2 ** (x - 2),
        )
    if point.family == K_BETA:
        return ConstructionTuple(
            j=j, r=3 * 2 ** (x + 3) + 48, m=point.m_bound, ell=2 * x + 3, h=48 + j,
            p=9 * 2**x + 17, q=3 * 2 ** (2 * x - 2) + 143 * 2 ** (x - 4) + 17,
        )
    c = chi(j, x)
    return ConstructionTuple(
        j=j, r=1, m=point.m_bound, ell=x + 2, h=2 ** (x - 1) - 8 * c + j + 1,
        p=0, q=5 * 2 ** (x - 4) - c,
    )


# -- asymptotic envelopes ---------------------------------------------------

def f_envelope(j: int, ell: int) -> int:
    if ell < 3:
        raise DomainError(f"f needs l >= 3, got {ell}")
    return (5 * 2 ** (2 * ell - 3) - j) // (3 * 2 ** (ell - 2) + 1)


def h_envelope(j: int, ell: int) -> int:
    if ell < 3:
        raise DomainError(f"h needs l >= 3, got {ell}")
    return (2 ** (2 * ell - 2) - j) // (2 ** (ell - 1) + 3)


def asymptotic_envelopes(j: int, ell: int) -> tuple[Fraction, int, int]:
    return g_envelope(j, ell), f_envelope(j, ell), h_envelope(j, ell)


def envelopes_interleave(j: int, ell: int) -> bool:
    """h_j(l) < f_j(l) <= h_j(l+1)."""
    return h_envelope(j, ell) < f_envelope(j, ell) <= h_envelope(j, ell + 1)
