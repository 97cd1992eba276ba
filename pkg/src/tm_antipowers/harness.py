"""Batch sweeps over (j, k, m) grids producing plot-ready rows."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .antipower import AntiPowerEngine, default_engine
from .bounds import FamilyPoint, ceil_log2, family_point
from .errors import DomainError, ResourceError
from .word import TmBuffer

DEFAULT_M_MAX = 1000


def fraction_str(x: Optional[Fraction]) -> Optional[str]:
    return None if x is None else f"{x.numerator}/{x.denominator}"


def decimal_str(x: Optional[Fraction]) -> Optional[str]:
    """Six-decimal rendering computed from the exact fraction."""
    if x is None:
        return None
    scaled = round(x * 10**6)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**6)
    return f"{sign}{whole}.{frac:06d}"


@dataclass(frozen=True)
class RatioRow:
    j: int
    k: int
    gamma: int
    big_gamma: Optional[int]

    @property
    def gamma_ratio(self) -> Fraction:
        return Fraction(self.gamma, self.k)

    @property
    def big_gamma_ratio(self) -> Optional[Fraction]:
        return None if self.big_gamma is None else Fraction(self.big_gamma, self.k)

    def to_record(self) -> dict:
        return {
            "j": self.j,
            "k": self.k,
            "gamma": self.gamma,
            "gamma_ratio": fraction_str(self.gamma_ratio),
            "gamma_ratio_decimal": decimal_str(self.gamma_ratio),
            "big_gamma": self.big_gamma,
            "big_gamma_ratio": fraction_str(self.big_gamma_ratio),
            "big_gamma_ratio_decimal": decimal_str(self.big_gamma_ratio),
        }


def _partition(items: list, parts: int) -> list[list]:
    """Split into contiguous, nearly equal chunks (static schedule)."""
    parts = max(1, min(parts, len(items)))
    size, extra = divmod(len(items), parts)
    out, start = [], 0
    for i in range(parts):
        stop = start + size + (1 if i < extra else 0)
        out.append(items[start:stop])
        start = stop
    return out


def _run_partitioned(func, items: list, workers: int, buffer: TmBuffer) -> list:
    """Apply ``func(engine, item)`` over items, merging results in input order."""
    if workers <= 1 or len(items) <= 1:
        engine = AntiPowerEngine(buffer)
        return [func(engine, it) for it in items]

    def run_chunk(chunk):
        engine = AntiPowerEngine(buffer)
        return [func(engine, it) for it in chunk]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        chunks = list(pool.map(run_chunk, _partition(items, workers)))
    return [row for chunk in chunks for row in chunk]


def default_workers() -> int:
    return os.cpu_count() or 1


def ratio_row(engine: AntiPowerEngine, j: int, k: int) -> RatioRow:
    try:
        return RatioRow(j, k, engine.gamma(j, k), engine.big_gamma(j, k))
    except ResourceError as exc:
        raise ResourceError(f"k={k}: {exc}") from exc


def ratio_sweep(
    j: int,
    k_min: int,
    k_max: int,
    workers: int = 1,
    engine: Optional[AntiPowerEngine] = None,
) -> list[RatioRow]:
    """One row of gamma and Gamma values per k in [k_min, k_max]."""
    if not 1 <= k_min <= k_max:
        raise DomainError(f"need 1 <= k_min <= k_max, got {k_min}, {k_max}")
    if j < 0:
        raise DomainError(f"j must be nonnegative, got {j}")
    engine = engine or default_engine()
    ks = list(range(k_min, k_max + 1))
    if workers <= 1:
        return [ratio_row(engine, j, k) for k in ks]
    # grow before fanning out so readers never race a doubling
    engine.buffer.extend_to(min(engine.buffer.mem_cap, j + k_max * (3 * k_max + 64)))
    return _run_partitioned(lambda e, k: ratio_row(e, j, k), ks, workers, engine.buffer)


@dataclass
class ConjectureReport:
    j: int
    k: int
    m_max: int
    violations: list[int] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.violations)

    def to_record(self) -> dict:
        return {
            "j": self.j,
            "k": self.k,
            "m_max": self.m_max,
            "count": self.count,
            "violations": list(self.violations),
        }


def conjecture_scan(
    j: int, k: int, m_max: int = DEFAULT_M_MAX, engine: Optional[AntiPowerEngine] = None
) -> ConjectureReport:
    """All m <= m_max where exactly one of m, 2m is in the anti-power set."""
    if k < 3:
        raise DomainError(f"conjecture scans need k >= 3, got {k}")
    if m_max < 1:
        raise DomainError(f"m_max must be >= 1, got {m_max}")
    engine = engine or default_engine()
    report = ConjectureReport(j, k, m_max)
    for m in range(1, m_max + 1):
        a, b = engine.ap_membership_pair(j, k, m)
        if a != b:
            report.violations.append(m)
    return report


def conjecture_sweep(
    j: int,
    k_min: int,
    k_max: int,
    m_max: int = DEFAULT_M_MAX,
    workers: int = 1,
    engine: Optional[AntiPowerEngine] = None,
) -> list[ConjectureReport]:
    if not 3 <= k_min <= k_max:
        raise DomainError(f"need 3 <= k_min <= k_max, got {k_min}, {k_max}")
    engine = engine or default_engine()
    ks = list(range(k_min, k_max + 1))
    if workers <= 1:
        return [conjecture_scan(j, k, m_max, engine) for k in ks]
    engine.buffer.extend_to(min(engine.buffer.mem_cap, j + 2 * m_max * (k_max + 1)))
    return _run_partitioned(lambda e, k: conjecture_scan(j, k, m_max, e), ks, workers, engine.buffer)


@dataclass(frozen=True)
class ConjectureStatistics:
    """Mean violation counts, both per j and over all (j, k) pairs jointly."""

    per_j: dict
    joint: Fraction
    reports: tuple

    def to_record(self) -> dict:
        return {
            "per_j_mean": {str(j): fraction_str(v) for j, v in self.per_j.items()},
            "per_j_mean_decimal": {str(j): decimal_str(v) for j, v in self.per_j.items()},
            "joint_mean": fraction_str(self.joint),
            "joint_mean_decimal": decimal_str(self.joint),
        }


def conjecture_statistics(
    js: Iterable[int],
    k_min: int = 3,
    k_max: int = 40,
    m_max: int = DEFAULT_M_MAX,
    engine: Optional[AntiPowerEngine] = None,
) -> ConjectureStatistics:
    engine = engine or default_engine()
    reports = []
    per_j = {}
    for j in js:
        rows = conjecture_sweep(j, k_min, k_max, m_max, engine=engine)
        reports.extend(rows)
        per_j[j] = Fraction(sum(r.count for r in rows), len(rows))
    joint = Fraction(sum(r.count for r in reports), len(reports))
    return ConjectureStatistics(per_j, joint, tuple(reports))


@dataclass(frozen=True)
class FamilyProbe:
    point: FamilyPoint
    observed_ok: bool

    @property
    def ratio(self) -> Fraction:
        return self.point.ratio

    def to_record(self) -> dict:
        return {
            "family": self.point.family,
            "parameter": self.point.parameter,
            "j": self.point.j,
            "k_value": self.point.k_value,
            "m_bound": self.point.m_bound,
            "observed_ok": self.observed_ok,
            "ratio": fraction_str(self.ratio),
            "ratio_decimal": decimal_str(self.ratio),
        }


def family_probe(
    family: str, parameters: Iterable[int], j: int, engine: Optional[AntiPowerEngine] = None
) -> list[FamilyProbe]:
    """Check that m_bound is outside the anti-power set at k_value for each point.

    A point is ``observed_ok`` when the j-fix of length k_value * m_bound is
    not a k_value-anti-power, which makes Gamma_j(k_value) >= m_bound.
    """
    engine = engine or default_engine()
    out = []
    for x in parameters:
        point = family_point(family, x, j)
        ok = not engine.is_anti_power(j, point.k_value, point.m_bound)
        out.append(FamilyProbe(point, ok))
    return out


@dataclass(frozen=True)
class ThresholdProbe:
    j: int
    alpha: int
    k_value: int
    m_value: int
    outside: bool
    floor_low: int
    floor_high: int


def nonempty_threshold_probe(
    j: int, alphas: Iterable[int], engine: Optional[AntiPowerEngine] = None
) -> list[ThresholdProbe]:
    """Test m = 3*4^a - 2^a + 1 against k_a = 4^a + 2^a + 2 for each alpha.

    Two candidate floors are reported side by side, ceil(log2 j) and
    ceil(log2 j) + 2, so a caller can see which one the data supports.
    """
    engine = engine or default_engine()
    lo = ceil_log2(j)
    out = []
    for a in alphas:
        if a < 1:
            raise DomainError(f"alpha must be >= 1, got {a}")
        k = 4**a + 2**a + 2
        m = 3 * 4**a - 2**a + 1
        outside = not engine.is_anti_power(j, k, m)
        out.append(ThresholdProbe(j, a, k, m, outside, lo, lo + 2))
    return out
