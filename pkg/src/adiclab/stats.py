"""Finite-prefix digit statistics: counts, frequencies, running means.

All statistics are exact rationals; floating point appears only at
serialization. A convergence trace is finite-n evidence for the limiting
frequencies and the asymptotic digit mean -- it never extrapolates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .digits import Base, DigitPrefix, DigitStream

__all__ = [
    "DEFAULT_CHECKPOINTS",
    "FreqReport",
    "ConvergenceTrace",
    "NormalityVerdict",
    "digit_counts",
    "freq_report",
    "convergence_trace",
    "weak_normality_verdict",
    "format_decimal",
]

# Log-spaced desk-scale evidence of convergence.
DEFAULT_CHECKPOINTS: tuple[int, ...] = tuple(10**k for k in range(1, 7))


def format_decimal(value: Fraction | float, precision: int = 12) -> str:
    """Decimal string with `precision` significant digits."""
    if precision < 1:
        raise ValueError(f"precision must be >= 1, got {precision}")
    return f"{float(value):.{precision}g}"


@dataclass(frozen=True)
class FreqReport:
    """Statistics of one prefix: counts N_i, frequencies v_i = N_i / n, and
    the running digit mean r_n = sum(i * v_i)."""

    n: int
    counts: tuple[int, ...]
    freqs: tuple[Fraction, ...]
    mean: Fraction

    def __post_init__(self) -> None:
        # Exact bookkeeping identities; cheap relative to the tally itself.
        if self.n < 1:
            raise ValueError("a frequency report needs at least one digit")
        if sum(self.counts) != self.n:
            raise ValueError("digit counts do not add up to the prefix length")
        if sum(self.freqs) != 1:
            raise ValueError("frequencies do not sum to 1")
        if self.mean != sum(i * f for i, f in enumerate(self.freqs)):
            raise ValueError("mean is inconsistent with the frequencies")

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> "FreqReport":
        counts = tuple(counts)
        n = sum(counts)
        if n < 1:
            raise ValueError("a frequency report needs at least one digit")
        freqs = tuple(Fraction(c, n) for c in counts)
        mean = Fraction(sum(i * c for i, c in enumerate(counts)), n)
        return cls(n=n, counts=counts, freqs=freqs, mean=mean)

    def to_json_dict(self, precision: int = 12) -> dict:
        return {
            "n": self.n,
            "counts": list(self.counts),
            "freqs": [format_decimal(f, precision) for f in self.freqs],
            "mean": format_decimal(self.mean, precision),
        }


def digit_counts(p: DigitPrefix) -> tuple[int, ...]:
    """counts[i] = number of positions j <= n with a_j = i."""
    counts = [0] * p.base.s
    for d in p.digits:
        counts[d] += 1
    return tuple(counts)


def freq_report(p: DigitPrefix) -> FreqReport:
    if len(p) == 0:
        raise ValueError("cannot report frequencies of an empty prefix")
    return FreqReport.from_counts(digit_counts(p))


@dataclass(frozen=True)
class ConvergenceTrace:
    """Frequency reports at a strictly increasing sequence of prefix lengths."""

    base: Base
    checkpoints: tuple[int, ...]
    reports: tuple[FreqReport, ...]

    def csv_header(self) -> str:
        cols = ",".join(f"v{i}" for i in range(self.base.s))
        return f"n,{cols},r_n"

    def to_csv(self, precision: int = 12) -> str:
        lines = [self.csv_header()]
        for rep in self.reports:
            cells = [str(rep.n)]
            cells += [format_decimal(f, precision) for f in rep.freqs]
            cells.append(format_decimal(rep.mean, precision))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_json_dict(self, precision: int = 12) -> dict:
        return {
            "base": self.base.s,
            "checkpoints": list(self.checkpoints),
            "reports": [r.to_json_dict(precision) for r in self.reports],
        }


def convergence_trace(stream: DigitStream, checkpoints: Sequence[int]) -> ConvergenceTrace:
    """Reports at each checkpoint, computed in one pass over the stream.

    Each digit is read exactly once. The digit sum is accumulated
    independently of the counts and cross-checked against the count-derived
    mean, so every emitted report has passed the exact mean identity both
    ways.
    """
    points = tuple(int(n) for n in checkpoints)
    if not points:
        raise ValueError("need at least one checkpoint")
    if points[0] < 1 or any(b <= a for a, b in zip(points, points[1:])):
        raise ValueError(f"checkpoints must be >= 1 and strictly increasing, got {points}")

    counts = [0] * stream.base.s
    digit_sum = 0
    consumed = 0
    reports = []
    it = stream.iter_digits()
    for target in points:
        for d in itertools.islice(it, target - consumed):
            counts[d] += 1
            digit_sum += d
            consumed += 1
        if consumed != target:
            raise ValueError(f"stream ended at {consumed} digits, before checkpoint {target}")
        report = FreqReport.from_counts(counts)
        if report.mean != Fraction(digit_sum, target):
            raise AssertionError("count-derived mean disagrees with the digit-sum mean")
        reports.append(report)
    return ConvergenceTrace(stream.base, points, tuple(reports))


@dataclass(frozen=True)
class NormalityVerdict:
    """Finite-n verdict: are the observed frequencies within tol of uniform?"""

    consistent: bool
    max_deviation: Fraction
    tol: Fraction

    def to_json_dict(self, precision: int = 12) -> dict:
        return {
            "consistent": self.consistent,
            "max_deviation": format_decimal(self.max_deviation, precision),
            "tol": format_decimal(self.tol, precision),
        }


def weak_normality_verdict(p: DigitPrefix, tol: Fraction | int | str) -> NormalityVerdict:
    """Check max_i |v_i - 1/s| <= tol on the given prefix.

    This is a diagnostic about the prefix, never a claim about the limit:
    "consistent" means the finite-n frequencies are within tol of uniform.
    A zero tolerance tests exact uniformity; negative tolerances are
    rejected.
    """
    tol = Fraction(tol)
    if tol < 0:
        raise ValueError(f"tolerance must be >= 0, got {tol}")
    rep = freq_report(p)
    target = Fraction(1, p.base.s)
    deviation = max(abs(f - target) for f in rep.freqs)
    return NormalityVerdict(consistent=deviation <= tol, max_deviation=deviation, tol=tol)
