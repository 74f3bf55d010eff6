"""Constructive digit streams with prescribed limiting statistics.

Two constructions are implemented, both floor-based and fully exact:

* the greedy construction: at step k append, in increasing digit order,
  the increments floor(tau_i * (k+1)) - floor(tau_i * k). At every
  boundary n the prefix of length sum_i floor(tau_i * n) then holds
  exactly floor(tau_i * n) copies of digit i, which forces limiting
  frequency tau_i for every digit;

* the block construction: block k holds floor(tau_ik * s_k) copies of
  digit i, where tau_.k is the k-th column of a stochastic column rule and
  (s_k) is a growing block-length schedule. Columns with a constant exact
  mean force that limiting digit mean; columns converging in coordinate j
  force that coordinate's limiting frequency.

Column vectors and schedule parameters are exact rationals and every floor
is exact: the constructions are floor-sensitive, and the exact-count
claims are only checkable in integer arithmetic.

Schedules come from a closed set of named families because the growth
conditions they must satisfy are limit statements, not verifiable from
finite data; `validate_schedule` settles each condition analytically per
family. Stream inequality can only be falsified on a finite prefix, never
proven, so `prefix_distinguish` reports either a differing index or
"undetermined at the horizon".
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .digits import BASE4, Base, DigitStream, constant_stream
from .entropy import neg_entropy_minimum

__all__ = [
    "ProbabilityVector",
    "greedy_increments",
    "floor_counts",
    "greedy_stream",
    "ScheduleSpec",
    "ConditionStatus",
    "ScheduleValidation",
    "ScheduleRejectedError",
    "validate_schedule",
    "ColumnSchedule",
    "ColumnConstraintError",
    "block_stream",
    "block_boundaries",
    "mean_target_stream",
    "DistinguishResult",
    "prefix_distinguish",
    "schedule_from_config",
    "columns_from_config",
    "construction_from_config",
]


@dataclass(frozen=True)
class ProbabilityVector:
    """Exact probability vector over the digit alphabet (tau_i >= 0, sum 1)."""

    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(Fraction(e) for e in self.entries))
        if len(self.entries) < 2:
            raise ValueError("a probability vector needs at least two entries")
        if any(e < 0 for e in self.entries):
            raise ValueError(f"negative entry in {self.entries}")
        if sum(self.entries) != 1:
            raise ValueError(f"entries must sum to 1 exactly, got sum {sum(self.entries)}")

    @property
    def s(self) -> int:
        return len(self.entries)

    def mean(self) -> Fraction:
        return sum(i * e for i, e in enumerate(self.entries))

    def as_strings(self) -> list[str]:
        return [str(e) for e in self.entries]

    @classmethod
    def parse(cls, spec: str | Sequence) -> "ProbabilityVector":
        """From "1/4,1/4,1/4,1/4" or a sequence of rational-like values."""
        parts = [p.strip() for p in spec.split(",")] if isinstance(spec, str) else list(spec)
        return cls(tuple(Fraction(p) for p in parts))


def greedy_increments(tau: ProbabilityVector, n: int) -> tuple[int, ...]:
    """Per-digit increments floor(tau_i*(n+1)) - floor(tau_i*n); each 0 or 1."""
    if n < 1:
        raise ValueError(f"step index must be >= 1, got {n}")
    out = []
    for t in tau.entries:
        p, q = t.numerator, t.denominator
        out.append((p * (n + 1)) // q - (p * n) // q)
    return tuple(out)


def floor_counts(tau: ProbabilityVector, n: int) -> tuple[int, ...]:
    """Target digit counts floor(tau_i * n) at boundary n."""
    if n < 0:
        raise ValueError(f"boundary must be >= 0, got {n}")
    return tuple((t.numerator * n) // t.denominator for t in tau.entries)


def greedy_stream(tau: ProbabilityVector, base: Base | None = None) -> DigitStream:
    """Digit stream whose limiting frequencies equal tau exactly.

    Step k emits the increments of `greedy_increments(tau, k)` in
    increasing digit order, so for every n the prefix of length
    sum(floor_counts(tau, n)) contains exactly floor(tau_i * n) copies of
    digit i. Pure integer arithmetic throughout.
    """
    if base is None:
        base = Base(tau.s)
    elif base.s != tau.s:
        raise ValueError(f"vector has {tau.s} entries but base is {base.s}")
    nums = tuple(t.numerator for t in tau.entries)
    dens = tuple(t.denominator for t in tau.entries)
    s = tau.s

    def make() -> Iterator[int]:
        prev = [nums[i] // dens[i] for i in range(s)]
        k = 1
        while True:
            for i in range(s):
                nxt = (nums[i] * (k + 1)) // dens[i]
                if nxt != prev[i]:
                    yield i
                    prev[i] = nxt
            k += 1

    return DigitStream(base=base, make_iter=make)


# ---------------------------------------------------------------------------
# Block-length schedules
# ---------------------------------------------------------------------------

CONDITION_DIVERGES = "terms_diverge"
CONDITION_NEXT_TERM = "next_term_over_partial_sum"
CONDITION_INDEX = "index_over_partial_sum"

_CONDITION_FORMULAS = {
    CONDITION_DIVERGES: "s_k -> inf",
    CONDITION_NEXT_TERM: "s_{k+1} / sum_{i<=k} s_i -> 0",
    CONDITION_INDEX: "k / sum_{i<=k} s_i -> 0",
}


@dataclass(frozen=True)
class ScheduleSpec:
    """A named block-length family s_k.

    Only named families are allowed (rather than arbitrary callables)
    because the growth conditions are limit statements: a validator can
    settle them analytically for a known family but never from finitely
    many terms of a black box. Construction enforces positivity and
    monotonicity only; the limit conditions are the validator's job, so
    rejectable candidates (geometric growth) are still constructible.
    """

    family: str  # "polynomial" | "affine" | "geometric"
    degree: int | None = None  # polynomial: s_k = k**degree
    a: Fraction | None = None  # affine: s_k = a*k + b
    b: Fraction | None = None
    ratio: Fraction | None = None  # geometric: s_k = ratio**k

    def __post_init__(self) -> None:
        if self.family == "polynomial":
            if not isinstance(self.degree, int) or self.degree < 1:
                raise ValueError("polynomial schedule needs an integer degree >= 1")
        elif self.family == "affine":
            a = Fraction(self.a)
            b = Fraction(self.b if self.b is not None else 0)
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)
            if a < 1:
                raise ValueError(f"affine schedule needs slope >= 1, got {a}")
            if a + b <= 0:
                raise ValueError("affine schedule must be positive from k = 1")
        elif self.family == "geometric":
            r = Fraction(self.ratio)
            object.__setattr__(self, "ratio", r)
            if r < 1:
                raise ValueError(f"geometric schedule needs ratio >= 1, got {r}")
        else:
            raise ValueError(f"unknown schedule family {self.family!r}")

    @classmethod
    def polynomial(cls, degree: int) -> "ScheduleSpec":
        return cls(family="polynomial", degree=degree)

    @classmethod
    def affine(cls, a, b=0) -> "ScheduleSpec":
        return cls(family="affine", a=Fraction(a), b=Fraction(b))

    @classmethod
    def geometric(cls, ratio) -> "ScheduleSpec":
        return cls(family="geometric", ratio=Fraction(ratio))

    def term(self, k: int) -> Fraction:
        if k < 1:
            raise ValueError(f"schedule index must be >= 1, got {k}")
        if self.family == "polynomial":
            return Fraction(k**self.degree)
        if self.family == "affine":
            return self.a * k + self.b
        return self.ratio**k

    def label(self) -> str:
        if self.family == "polynomial":
            return "k" if self.degree == 1 else f"k^{self.degree}"
        if self.family == "affine":
            return f"{self.a}*k+{self.b}" if self.b else f"{self.a}*k"
        return f"{self.ratio}^k"

    def to_json_dict(self) -> dict:
        if self.family == "polynomial":
            return {"family": "polynomial", "degree": self.degree}
        if self.family == "affine":
            return {"family": "affine", "a": str(self.a), "b": str(self.b)}
        return {"family": "geometric", "ratio": str(self.ratio)}


@dataclass(frozen=True)
class ConditionStatus:
    name: str
    formula: str
    holds: bool
    detail: str


@dataclass(frozen=True)
class ScheduleValidation:
    spec: ScheduleSpec
    accepted: bool
    conditions: tuple[ConditionStatus, ...]

    def failed(self) -> tuple[ConditionStatus, ...]:
        return tuple(c for c in self.conditions if not c.holds)


class ScheduleRejectedError(ValueError):
    def __init__(self, validation: ScheduleValidation):
        names = ", ".join(c.name for c in validation.failed())
        super().__init__(
            f"schedule s_k = {validation.spec.label()} rejected; failed condition(s): {names}"
        )
        self.validation = validation


def validate_schedule(spec: ScheduleSpec) -> ScheduleValidation:
    """Analytic verdicts for the three growth conditions on (s_k).

    Polynomial families have partial sums ~ k**(d+1)/(d+1), which dominate
    both s_{k+1} and k; affine families likewise with sums ~ a*k**2/2. So
    both satisfy all three conditions. Geometric growth with ratio > 1
    keeps s_{k+1} comparable to the whole partial sum (the quotient tends
    to ratio - 1, not 0), and ratio = 1 is a constant schedule, which
    fails divergence and the index condition.
    """

    def status(name: str, holds: bool, detail: str) -> ConditionStatus:
        return ConditionStatus(name, _CONDITION_FORMULAS[name], holds, detail)

    if spec.family == "polynomial":
        d = spec.degree
        conditions = (
            status(CONDITION_DIVERGES, True, f"s_k = k^{d} -> inf"),
            status(CONDITION_NEXT_TERM, True, f"quotient ~ {d + 1}/k -> 0"),
            status(CONDITION_INDEX, True, f"quotient ~ {d + 1}/k^{d} -> 0"),
        )
    elif spec.family == "affine":
        conditions = (
            status(CONDITION_DIVERGES, True, f"s_k = {spec.label()} -> inf"),
            status(CONDITION_NEXT_TERM, True, "quotient ~ 2/k -> 0"),
            status(CONDITION_INDEX, True, f"quotient -> 2/{spec.a}/k -> 0"),
        )
    elif spec.ratio > 1:
        limit = spec.ratio - 1
        conditions = (
            status(CONDITION_DIVERGES, True, f"s_k = {spec.label()} -> inf"),
            status(CONDITION_NEXT_TERM, False, f"quotient -> ratio - 1 = {limit} != 0"),
            status(CONDITION_INDEX, True, "geometric sum dominates k"),
        )
    else:  # ratio == 1: constant schedule
        conditions = (
            status(CONDITION_DIVERGES, False, "s_k = 1 is constant"),
            status(CONDITION_NEXT_TERM, True, "quotient = 1/k -> 0"),
            status(CONDITION_INDEX, False, "quotient = k/k = 1 != 0"),
        )
    return ScheduleValidation(spec=spec, accepted=all(c.holds for c in conditions), conditions=conditions)


# ---------------------------------------------------------------------------
# Column rules and the block construction
# ---------------------------------------------------------------------------


class ColumnConstraintError(ValueError):
    pass


@dataclass(frozen=True)
class ColumnSchedule:
    """Column rule n -> probability vector for the block construction.

    The rule must be a pure function of the column index. A declared mean
    is re-checked exactly on every produced column and violations are hard
    errors (the mean theorem's hypothesis is per-column exact). A declared
    limit is the target of the frequency theorem; it is not checkable from
    finitely many columns, so it is carried as metadata only.
    """

    rule: Callable[[int], ProbabilityVector]
    mean: Fraction | None = None
    limit: ProbabilityVector | None = None
    config: dict | None = None  # JSON form, when built from one

    def column(self, n: int) -> ProbabilityVector:
        if n < 1:
            raise ValueError(f"column indices are 1-based, got {n}")
        col = self.rule(n)
        if not isinstance(col, ProbabilityVector):
            col = ProbabilityVector(tuple(col))
        if self.mean is not None and col.mean() != self.mean:
            raise ColumnConstraintError(
                f"column {n} has mean {col.mean()}, declared mean is {self.mean}"
            )
        return col

    @classmethod
    def constant(cls, tau: ProbabilityVector, mean: Fraction | None = None) -> "ColumnSchedule":
        declared = tau.mean() if mean is None else Fraction(mean)
        cfg = {"kind": "constant", "tau": tau.as_strings()}
        return cls(rule=lambda n: tau, mean=declared, limit=tau, config=cfg)

    @classmethod
    def converging(
        cls, limit: ProbabilityVector, mix_digit: int, rate: str = "harmonic"
    ) -> "ColumnSchedule":
        """Columns (1 - eps_n) * limit + eps_n * e_mix with eps_n -> 0.

        rate "harmonic" uses eps_n = 1/(n+1), "quadratic" eps_n = 1/(n+1)**2.
        Every column is stochastic by construction and converges to `limit`
        in every coordinate.
        """
        if not 0 <= mix_digit < limit.s:
            raise ValueError(f"mix digit {mix_digit} out of range for {limit.s} entries")
        if rate == "harmonic":
            eps = lambda n: Fraction(1, n + 1)
        elif rate == "quadratic":
            eps = lambda n: Fraction(1, (n + 1) ** 2)
        else:
            raise ValueError(f"unknown rate {rate!r}; use 'harmonic' or 'quadratic'")

        def rule(n: int) -> ProbabilityVector:
            e = eps(n)
            entries = [t * (1 - e) for t in limit.entries]
            entries[mix_digit] += e
            return ProbabilityVector(tuple(entries))

        cfg = {
            "kind": "converging",
            "limit": limit.as_strings(),
            "mix_digit": mix_digit,
            "rate": rate,
        }
        return cls(rule=rule, mean=None, limit=limit, config=cfg)

    @classmethod
    def explicit(
        cls,
        columns: Sequence[ProbabilityVector],
        tail: ProbabilityVector,
        mean: Fraction | None = None,
    ) -> "ColumnSchedule":
        """Finitely many explicit columns, then a constant tail column."""
        head = tuple(columns)

        def rule(n: int) -> ProbabilityVector:
            return head[n - 1] if n <= len(head) else tail

        cfg = {
            "kind": "explicit",
            "columns": [c.as_strings() for c in head],
            "tail": tail.as_strings(),
        }
        if mean is not None:
            cfg["theta"] = str(Fraction(mean))
        return cls(rule=rule, mean=Fraction(mean) if mean is not None else None,
                   limit=tail, config=cfg)


def block_stream(columns: ColumnSchedule, spec: ScheduleSpec, base: Base = BASE4) -> DigitStream:
    """Digits laid out block by block: block k holds floor(tau_ik * s_k)
    copies of digit i, in increasing digit order.

    The schedule must pass `validate_schedule`. Early blocks may be empty;
    block k has length between s_k - s and s_k (floor loss under 1 per
    digit), so the stream is unbounded for every accepted schedule.
    """
    validation = validate_schedule(spec)
    if not validation.accepted:
        raise ScheduleRejectedError(validation)
    if columns.column(1).s != base.s:
        raise ValueError(f"columns have {columns.column(1).s} entries, base is {base.s}")

    def make() -> Iterator[int]:
        k = 1
        while True:
            col = columns.column(k)
            sk = spec.term(k)
            for i, t in enumerate(col.entries):
                reps = math.floor(t * sk)
                if reps:
                    yield from itertools.repeat(i, reps)
            k += 1

    return DigitStream(base=base, make_iter=make)


def block_boundaries(columns: ColumnSchedule, spec: ScheduleSpec, max_digits: int) -> list[int]:
    """Cumulative stream lengths at whole-block boundaries, up to max_digits."""
    out: list[int] = []
    total = 0
    k = 1
    while True:
        col = columns.column(k)
        sk = spec.term(k)
        length = sum(math.floor(t * sk) for t in col.entries)
        if total + length > max_digits:
            return out
        total += length
        out.append(total)
        k += 1


def _rationalize_simplex(values: Sequence[float]) -> tuple[Fraction, ...]:
    # Denominator cap keeps greedy-step integers small; the residual is
    # absorbed into the largest coordinate so the sum is exactly 1.
    fr = [Fraction(v).limit_denominator(10**12) for v in values]
    gap = 1 - sum(fr)
    j = max(range(len(fr)), key=lambda i: fr[i])
    fr[j] += gap
    if fr[j] < 0:
        raise ArithmeticError(f"rationalization failed for {values}")
    return tuple(fr)


def mean_target_stream(theta: Fraction | int | float | str, base: Base = BASE4) -> DigitStream:
    """A stream whose asymptotic digit mean is theta.

    theta = 0 and theta = s-1 are degenerate: every digit frequency is then
    forced, so the streams are the all-zeros and all-maximal-digit
    constants. Interior theta runs the greedy construction on the
    entropy-optimal frequency vector at mean theta, so the limit
    frequencies all exist and the stream witnesses the dimension bound of
    the mean level set. The float optimum is rationalized (denominators
    capped at 10**12) before the greedy construction, which shifts the
    realized mean from theta by less than 1e-11.
    """
    s = base.s
    th = Fraction(theta)
    if not 0 <= th <= s - 1:
        raise ValueError(f"theta must lie in [0, {s - 1}], got {theta}")
    if th == 0:
        return constant_stream(0, base)
    if th == s - 1:
        return constant_stream(s - 1, base)
    optimum = neg_entropy_minimum(float(th), base)
    tau = ProbabilityVector(_rationalize_simplex(optimum.argmin))
    return greedy_stream(tau, base)


@dataclass(frozen=True)
class DistinguishResult:
    """Outcome of a finite-prefix comparison of two streams."""

    differs: bool
    index: int | None  # first differing position, 1-based
    horizon: int


def prefix_distinguish(a: DigitStream, b: DigitStream, horizon: int) -> DistinguishResult:
    """First position where the streams differ, scanned up to `horizon`.

    "Undetermined" is evidence of agreement on the prefix only; equality of
    streams is never claimed. Symmetric in the two streams, and a "differs"
    verdict is stable under enlarging the horizon.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    pairs = zip(
        itertools.islice(a.iter_digits(), horizon),
        itertools.islice(b.iter_digits(), horizon),
    )
    for k, (da, db) in enumerate(pairs, start=1):
        if da != db:
            return DistinguishResult(differs=True, index=k, horizon=horizon)
    return DistinguishResult(differs=False, index=None, horizon=horizon)


# ---------------------------------------------------------------------------
# JSON configuration
# ---------------------------------------------------------------------------


def schedule_from_config(obj: dict) -> ScheduleSpec:
    """Build a ScheduleSpec from its JSON form, e.g.
    {"family": "polynomial", "degree": 2}."""
    if not isinstance(obj, dict) or "family" not in obj:
        raise ValueError(f"schedule config must be an object with a 'family' key, got {obj!r}")
    family = obj["family"]
    if family == "polynomial":
        return ScheduleSpec.polynomial(int(obj.get("degree", 1)))
    if family == "affine":
        return ScheduleSpec.affine(Fraction(obj.get("a", 1)), Fraction(obj.get("b", 0)))
    if family == "geometric":
        return ScheduleSpec.geometric(Fraction(obj["ratio"]))
    raise ValueError(f"unknown schedule family {family!r}")


def columns_from_config(obj: dict) -> ColumnSchedule:
    """Build a ColumnSchedule from its JSON form.

    Kinds: {"kind": "constant", "tau": [...], "theta"?: "p/q"},
    {"kind": "converging", "limit": [...], "mix_digit": j, "rate"?: ...},
    {"kind": "explicit", "columns": [[...], ...], "tail": [...],
     "theta"?: "p/q"}. Vector entries are rational strings.
    """
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError(f"columns config must be an object with a 'kind' key, got {obj!r}")
    kind = obj["kind"]
    if kind == "constant":
        tau = ProbabilityVector.parse(obj["tau"])
        mean = Fraction(obj["theta"]) if "theta" in obj else None
        return ColumnSchedule.constant(tau, mean)
    if kind == "converging":
        limit = ProbabilityVector.parse(obj["limit"])
        return ColumnSchedule.converging(
            limit, int(obj["mix_digit"]), obj.get("rate", "harmonic")
        )
    if kind == "explicit":
        cols = [ProbabilityVector.parse(c) for c in obj["columns"]]
        tail = ProbabilityVector.parse(obj["tail"])
        mean = Fraction(obj["theta"]) if "theta" in obj else None
        return ColumnSchedule.explicit(cols, tail, mean)
    raise ValueError(f"unknown columns kind {kind!r}")


def construction_from_config(doc: dict) -> tuple[ColumnSchedule, ScheduleSpec]:
    """Split a {"schedule": ..., "columns": ...} document into its parts."""
    if "schedule" not in doc or "columns" not in doc:
        raise ValueError("block construction config needs 'schedule' and 'columns' keys")
    return columns_from_config(doc["columns"]), schedule_from_config(doc["schedule"])
