"""Exact base-s digit expansions of numbers in [0, 1].

A number x in [0, 1] is written as the digit series x = sum_k a_k * s**(-k)
with digits a_k in {0, ..., s-1}. Rationals have eventually periodic
expansions; rationals whose reduced denominator divides a power of s
terminate, and therefore admit a second expansion ending in the constant
maximal digit. The canonical expansion is always the one with period (0);
`dual_representation` is the explicit converter to the other form.

Everything in this module is exact: values are `fractions.Fraction`, digits
are plain ints, and streams are deterministic generators. Floor and
periodicity logic is off-by-one fragile in floating point, so none is used.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

__all__ = [
    "Base",
    "BASE4",
    "DigitPrefix",
    "DigitStream",
    "periodic_stream",
    "constant_stream",
    "stream_from_digits",
    "expand",
    "prefix_value",
    "stream_value",
    "dual_representation",
    "has_two_representations",
]


@dataclass(frozen=True)
class Base:
    """Radix of the digit system; digits live in {0, ..., s-1}."""

    s: int = 4

    def __post_init__(self) -> None:
        if not isinstance(self.s, int) or self.s < 2:
            raise ValueError(f"base must be an integer >= 2, got {self.s!r}")

    @property
    def alphabet(self) -> range:
        return range(self.s)


BASE4 = Base(4)


def _check_digit(value: int, s: int) -> None:
    if not isinstance(value, int) or not 0 <= value <= s - 1:
        raise ValueError(f"digit {value!r} out of range for base {s}")


@dataclass(frozen=True)
class DigitPrefix:
    """A finite, materialized block of leading digits."""

    base: Base
    digits: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "digits", tuple(self.digits))
        s = self.base.s
        for d in self.digits:
            _check_digit(d, s)

    def __len__(self) -> int:
        return len(self.digits)

    @property
    def n(self) -> int:
        return len(self.digits)

    def to_text(self) -> str:
        """ASCII digit string; defined for bases up to 10."""
        if self.base.s > 10:
            raise ValueError("text serialization is defined for bases <= 10 only")
        return "".join(str(d) for d in self.digits)

    @classmethod
    def from_text(cls, text: str, base: Base = BASE4) -> "DigitPrefix":
        if base.s > 10:
            raise ValueError("text serialization is defined for bases <= 10 only")
        digits = []
        for ch in text.strip():
            if not ch.isdigit():
                raise ValueError(f"non-digit character {ch!r} in digit text")
            digits.append(int(ch))
        return cls(base, tuple(digits))


@dataclass(frozen=True)
class DigitStream:
    """A deterministic, unbounded digit source.

    `make_iter` must be pure: every call yields the same sequence, so
    independent consumers (including concurrent ones) can re-iterate
    safely. Streams derived from rationals carry an explicit
    (preperiod, period) descriptor; purely procedural streams (the
    constructive algorithms) leave it unset, and their value is then not
    computable from finite data.
    """

    base: Base
    make_iter: Callable[[], Iterator[int]]
    eventual_period: tuple[tuple[int, ...], tuple[int, ...]] | None = None

    def iter_digits(self) -> Iterator[int]:
        return self.make_iter()

    def digit_at(self, k: int) -> int:
        """The k-th digit, 1-based. O(1) for periodic streams, O(k) otherwise."""
        if k < 1:
            raise ValueError(f"digit positions are 1-based, got {k}")
        if self.eventual_period is not None:
            pre, per = self.eventual_period
            if k <= len(pre):
                return pre[k - 1]
            return per[(k - len(pre) - 1) % len(per)]
        return next(itertools.islice(self.make_iter(), k - 1, None))

    def prefix(self, n: int) -> DigitPrefix:
        if n < 0:
            raise ValueError(f"prefix length must be >= 0, got {n}")
        digits = tuple(itertools.islice(self.make_iter(), n))
        if len(digits) < n:
            raise ValueError(f"stream ended after {len(digits)} digits, wanted {n}")
        return DigitPrefix(self.base, digits)


def periodic_stream(
    preperiod: Iterable[int], period: Iterable[int], base: Base = BASE4
) -> DigitStream:
    """Stream consisting of `preperiod` followed by `period` repeated forever."""
    pre = tuple(preperiod)
    per = tuple(period)
    if not per:
        raise ValueError("period must be nonempty")
    for d in (*pre, *per):
        _check_digit(d, base.s)

    def make() -> Iterator[int]:
        yield from pre
        while True:
            yield from per

    return DigitStream(base=base, make_iter=make, eventual_period=(pre, per))


def constant_stream(digit: int, base: Base = BASE4) -> DigitStream:
    return periodic_stream((), (digit,), base)


def stream_from_digits(digits: Sequence[int], base: Base = BASE4) -> DigitStream:
    """Wrap a finite, materialized digit sequence as a (finite) stream.

    Consumers that read past the end see the stream simply stop; this is
    intended for analyzing digit files of known length.
    """
    data = tuple(digits)
    for d in data:
        _check_digit(d, base.s)
    return DigitStream(base=base, make_iter=lambda: iter(data))


def expand(x: Fraction | int | str, base: Base = BASE4) -> DigitStream:
    """Canonical digit expansion of x in [0, 1].

    Long division with remainder-cycle detection. The returned stream's
    (preperiod, period) descriptor is minimal; terminating numbers get the
    period-(0) form, and the endpoints follow the convention 0 = .(0) and
    1 = .(s-1). The expansion satisfies sum(a_k * s**-k) == x exactly, and
    preperiod + period length never exceeds the reduced denominator.
    """
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"expand is defined on [0, 1], got {x}")
    s = base.s
    if x == 1:
        # 1 has no in-range period-(0) expansion; the maximal-digit tail is it.
        return periodic_stream((), (s - 1,), base)
    q = x.denominator
    rem = x.numerator
    digits: list[int] = []
    seen: dict[int, int] = {}
    while rem not in seen:
        seen[rem] = len(digits)
        d, rem = divmod(rem * s, q)
        digits.append(d)
    start = seen[rem]
    return periodic_stream(digits[:start], digits[start:], base)


def prefix_value(p: DigitPrefix) -> Fraction:
    """Exact partial sum sum_{k<=n} a_k * s**(-k) of a finite prefix."""
    s = p.base.s
    acc = 0
    for d in p.digits:
        acc = acc * s + d
    return Fraction(acc, s ** len(p.digits))


def stream_value(stream: DigitStream) -> Fraction:
    """Exact limit value of an eventually periodic stream.

    Only streams carrying a (preperiod, period) descriptor have a value
    computable from finite data; anything else raises.
    """
    if stream.eventual_period is None:
        raise ValueError("stream value needs a (preperiod, period) descriptor")
    pre, per = stream.eventual_period
    s = stream.base.s
    head = prefix_value(DigitPrefix(stream.base, pre))
    pval = 0
    for d in per:
        pval = pval * s + d
    tail = Fraction(pval, s ** len(per) - 1)
    return head + tail / s ** len(pre)


def dual_representation(p: DigitPrefix) -> DigitStream:
    """The companion expansion of a terminating number.

    Interprets p as the terminating expansion p(0), so p must be nonempty
    and end in a nonzero digit, and returns c_1 ... c_{k-1} [c_k - 1]
    followed by the constant maximal digit. Both expansions have the same
    exact value.
    """
    if len(p) == 0:
        raise ValueError("dual representation needs a nonempty prefix")
    if p.digits[-1] == 0:
        raise ValueError("dual representation needs a prefix ending in a nonzero digit")
    s = p.base.s
    pre = p.digits[:-1] + (p.digits[-1] - 1,)
    return periodic_stream(pre, (s - 1,), p.base)


def has_two_representations(x: Fraction | int | str, base: Base = BASE4) -> bool:
    """True iff x has a terminating expansion strictly inside (0, 1).

    Exactly those x admit two expansions (tails (0) and (s-1)); every digit
    function here uses the period-(0) one. The endpoints have a single
    in-range expansion each under that convention, so they report False.
    """
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"defined on [0, 1], got {x}")
    if x == 0 or x == 1:
        return False
    q = x.denominator
    while q > 1:
        g = math.gcd(q, base.s)
        if g == 1:
            return False
        while q % g == 0:
            q //= g
    return True
