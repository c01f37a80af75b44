"""Random compositions of integers with exact rational weights.

A weight pair ``(a, b)`` puts mass ``a_r * b_{n_1} ... b_{n_r}`` on the
composition ``n_1 ... n_r`` of ``n``; normalizing by the partition value
``Z_n`` gives a probability law on compositions of ``n``.  This module
computes those laws exactly, couples consecutive ones so that every step
is a covering move (increment one part by d, or append d parts equal
to 1), and checks the ratio inequalities under which such couplings
exist.

Everything is computed in exact rational arithmetic: the one-step kernels
produced here are verified elsewhere by exact interchange against the
target laws, which is only meaningful without rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from ._rand import bernoulli
from .errors import DomainError, HorizonError, NotCoupleable, ParseError, ZeroMassError

Composition = Tuple[int, ...]

EMPTY: Composition = ()

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and exact strings like ``3/4`` or ``0.25``.

    Floats are rejected: their binary value is almost never the decimal
    the caller had in mind, and every table in this package must be exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"cannot parse {value!r} as an exact rational") from None
    if isinstance(value, float):
        raise DomainError(f"refusing float {value!r}: pass a string or Fraction for exactness")
    raise DomainError(f"cannot interpret {value!r} as an exact rational")


def format_composition(c: Composition) -> str:
    """Space-separated parts; the empty composition prints as ``-``."""
    return "-" if not c else " ".join(str(p) for p in c)


def parse_composition(text: str) -> Composition:
    text = text.strip()
    if text == "-" or not text:
        return EMPTY
    parts = []
    for token in text.split():
        try:
            p = int(token)
        except ValueError:
            raise ParseError(f"bad composition part {token!r}") from None
        if p < 1:
            raise ParseError(f"composition parts must be positive, got {p}")
        parts.append(p)
    return tuple(parts)


@dataclass(frozen=True)
class ArithClass:
    """Residue data (d, s): parts are 1 mod d and the part count is s mod d."""

    d: int = 1
    s: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise DomainError("d must be >= 1")
        if not 0 <= self.s < self.d:
            raise DomainError("s must lie in {0, ..., d-1}")


PLAIN = ArithClass(1, 0)


def covering_successors(c: Composition, d: int = 1) -> List[Composition]:
    """All compositions covering ``c``: one part incremented by d, or d parts 1 appended."""
    if d < 1:
        raise DomainError("d must be >= 1")
    out = [c[:j] + (c[j] + d,) + c[j + 1:] for j in range(len(c))]
    out.append(c + (1,) * d)
    return out


def is_covering(c: Composition, c2: Composition, d: int = 1) -> bool:
    return c2 in covering_successors(c, d)


def satisfies_arith(c: Composition, cls: ArithClass) -> bool:
    """True iff the part count is s mod d and every part is 1 mod d."""
    if len(c) % cls.d != cls.s:
        return False
    return all(p % cls.d == 1 % cls.d for p in c)


def iter_compositions(n: int, cls: Optional[ArithClass] = None) -> Iterator[Composition]:
    """All compositions of n, optionally filtered by an arithmetic class."""
    if n < 0:
        raise DomainError("n must be >= 0")

    def rec(remaining, prefix):
        if remaining == 0:
            yield prefix
            return
        for first in range(1, remaining + 1):
            yield from rec(remaining - first, prefix + (first,))

    for c in rec(n, ()):
        if cls is None or satisfies_arith(c, cls):
            yield c


class BSequence:
    """Part weights ``b_1, b_2, ...`` materialized up to a declared horizon.

    Infinite families are supplied as a callable and cut off at the
    horizon; asking for an index beyond it fails loudly rather than
    silently returning a wrong value.
    """

    __slots__ = ("_values", "horizon")

    def __init__(self, values: Iterable):
        self._values = tuple(as_fraction(v) for v in values)
        self.horizon = len(self._values)

    @classmethod
    def from_callable(cls, fn: Callable[[int], object], horizon: int) -> "BSequence":
        return cls(fn(m) for m in range(1, horizon + 1))

    def __getitem__(self, m: int) -> Fraction:
        if m < 1:
            raise DomainError(f"b is indexed from 1, got {m}")
        if m > self.horizon:
            raise HorizonError(f"b_{m} requested beyond declared horizon {self.horizon}")
        return self._values[m - 1]

    def values(self) -> Tuple[Fraction, ...]:
        return self._values

    def __eq__(self, other):
        return isinstance(other, BSequence) and self._values == other._values

    def __hash__(self):
        return hash(self._values)

    def __repr__(self):
        return f"BSequence({list(self._values)!r})"


class WeightPair:
    """A pair of count weights ``a`` (indexed from 0) and part weights ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a: Iterable, b):
        self.a = tuple(as_fraction(v) for v in a)
        self.b = b if isinstance(b, BSequence) else BSequence(b)
        if any(v < 0 for v in self.a):
            raise DomainError("count weights must be non-negative")
        if any(v < 0 for v in self.b.values()):
            raise DomainError("part weights must be non-negative")

    def a_at(self, i: int) -> Fraction:
        return self.a[i] if 0 <= i < len(self.a) else ZERO

    @property
    def a_support(self) -> List[int]:
        return [i for i, v in enumerate(self.a) if v != 0]

    @property
    def max_a_index(self) -> int:
        support = self.a_support
        if not support:
            raise DomainError("count weights are identically zero")
        return support[-1]

    def check_nondegenerate(self, cls: ArithClass = PLAIN):
        """Raise unless the pair is non-degenerate for the given class."""
        support = self.a_support
        if not support:
            raise DomainError("degenerate weight pair: a is identically zero")
        d, s = cls.d, cls.s
        if d == 1:
            if self.a_at(0) == 0 or self.a_at(1) == 0:
                raise DomainError("degenerate weight pair: need a_0 a_1 > 0")
            if support != list(range(support[-1] + 1)):
                raise DomainError("degenerate weight pair: a has internal zeros")
            for m in range(1, self.b.horizon + 1):
                if self.b[m] == 0:
                    raise DomainError(f"degenerate weight pair: b_{m} = 0")
        else:
            if self.a_at(s) == 0:
                raise DomainError(f"degenerate weight pair: a_{s} must be positive")
            expected = list(range(s, support[-1] + 1, d))
            if support != expected:
                raise DomainError(f"degenerate weight pair: support of a must be {{s, s+d, ...}}, got {support}")
            if s == 0 and len(support) < 2:
                raise DomainError("degenerate weight pair: with s = 0 the support of a cannot be {0}")
            for m in range(1, self.b.horizon + 1):
                if (self.b[m] != 0) != (m % d == 1):
                    raise DomainError(f"degenerate weight pair: b must be supported exactly on 1 mod d (b_{m})")

    def shift_count(self, cls: ArithClass = PLAIN) -> int:
        """Number of valid left shifts r: the length of the shift ladder."""
        d, s = cls.d, cls.s
        return (self.max_a_index - s) // d

    def total_has_mass(self, n: int, cls: ArithClass = PLAIN) -> bool:
        """Whether compositions of n carry mass (the residue matches s mod d)."""
        return n % cls.d == cls.s % cls.d

    def __eq__(self, other):
        return isinstance(other, WeightPair) and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        return f"WeightPair(a={list(self.a)!r}, b={self.b!r})"


def shift(wp: WeightPair, ell: int, cls: ArithClass = PLAIN) -> WeightPair:
    """Drop the first ``ell`` count weights, keeping the part weights.

    Fails if the shifted pair is degenerate for the correspondingly
    shifted arithmetic class.
    """
    if ell < 0:
        raise DomainError("shift must be non-negative")
    if ell == 0:
        return wp
    shifted = WeightPair(wp.a[ell:], wp.b)
    new_cls = ArithClass(cls.d, (cls.s - ell) % cls.d)
    shifted.check_nondegenerate(new_cls)
    return shifted


@dataclass(frozen=True)
class StepLaw:
    """Law of the first part of a weighted random composition.

    ``masses`` is keyed by the first-part value; consecutive support
    points differ by ``step`` (= d), so the reindexed law lives on
    0, 1, 2, ...
    """

    total: int
    step: int
    masses: Mapping[int, Fraction]

    def reindexed(self) -> Dict[int, Fraction]:
        return {(m - 1) // self.step: p for m, p in self.masses.items()}

    def check(self):
        if sum(self.masses.values()) != 1:
            raise DomainError("step law masses must sum to 1")


class PartitionKernel:
    """Partition values of a pair and all its shifts, plus the step coupling.

    Subclasses provide the raw weights and partition values; this base
    class derives first-part laws, the monotone one-step move
    probabilities, full composition-kernel rows and the sampling walk
    shared by every chain in the package.
    """

    d: int = 1

    # -- abstract surface -------------------------------------------------

    def a_weight(self, i: int) -> Fraction:
        raise NotImplementedError

    def b_weight(self, m: int) -> Fraction:
        raise NotImplementedError

    def partition_value(self, ell: int, t: int) -> Fraction:
        raise NotImplementedError

    def max_a_index(self) -> int:
        raise NotImplementedError

    # -- derived machinery -------------------------------------------------

    def _ensure_memos(self):
        if not hasattr(self, "_step_memo"):
            self._step_memo: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
            self._law_memo: Dict[Tuple[int, int], Dict[int, Fraction]] = {}

    def reindexed_first_part_law(self, ell: int, t: int) -> Dict[int, Fraction]:
        """Law of (first part - 1)/d at shift ``ell`` and total ``t``."""
        self._ensure_memos()
        key = (ell, t)
        cached = self._law_memo.get(key)
        if cached is not None:
            return cached
        if t < 1:
            raise DomainError("first-part laws need a positive total")
        z = self.partition_value(ell, t)
        if z == 0:
            raise ZeroMassError(f"no mass at total {t} for shift {ell}")
        law: Dict[int, Fraction] = {}
        mt = 0
        d = self.d
        while mt * d + 1 <= t:
            rest = t - (mt * d + 1)
            mass = self.b_weight(mt * d + 1) * self.partition_value(ell + 1, rest)
            if mass:
                law[mt] = mass / z
            mt += 1
        self._law_memo[key] = law
        return law

    def step_probs(self, ell: int, t: int) -> Dict[int, Fraction]:
        """Probability that the reindexed first part increments between totals t and t+d.

        Derived from the coupling that feeds one shared uniform through
        both inverse cumulative functions; requires the interleaving
        inequalities between the two laws, otherwise NotCoupleable is
        raised with the failing support point.
        """
        self._ensure_memos()
        key = (ell, t)
        cached = self._step_memo.get(key)
        if cached is not None:
            return cached
        low = self.reindexed_first_part_law(ell, t)
        high = self.reindexed_first_part_law(ell, t + self.d)
        probs = _monotone_move_probs(low, high)
        self._step_memo[key] = probs
        return probs

    def kernel_row(self, ell: int, t: int, c: Composition) -> Dict[Composition, Fraction]:
        """Exact one-step law on compositions of t+d given the current composition."""
        d = self.d
        if not c:
            if t != 0:
                raise DomainError("only the empty composition has total 0")
            return {(1,) * d: ONE}
        if self.max_a_index() - ell <= 1:
            # beyond this shift only single-part compositions carry mass
            if len(c) != 1:
                raise DomainError(f"composition {c} carries no mass at shift {ell}")
            return {(c[0] + d,): ONE}
        mt = (c[0] - 1) // d
        steps = self.step_probs(ell, t)
        if mt not in self.reindexed_first_part_law(ell, t):
            raise DomainError(f"composition {c} carries no mass at total {t}, shift {ell}")
        q = steps.get(mt, ZERO)
        row: Dict[Composition, Fraction] = {}
        if q:
            row[(c[0] + d,) + c[1:]] = q
        keep = ONE - q
        if keep:
            for tail, p in self.kernel_row(ell + 1, t - c[0], c[1:]).items():
                row[(c[0],) + tail] = keep * p
        return row

    def sample_move(self, t: int, parts: Sequence[int], rng) -> Tuple[Tuple, Fraction]:
        """Walk the peeling recursion once; returns (move, exact probability).

        The move is ``("inc", j)`` to increment part j by d, or
        ``("append", len(parts))`` to append d parts equal to 1.
        """
        d = self.d
        ell = 0
        j = 0
        prob = ONE
        remaining = t
        while True:
            if j == len(parts):
                if remaining != 0:
                    raise DomainError("parts do not sum to the stated total")
                return ("append", j), prob
            if self.max_a_index() - ell <= 1:
                if j != len(parts) - 1:
                    raise DomainError(f"state off support at shift {ell}")
                return ("inc", j), prob
            mt = (parts[j] - 1) // d
            q = self.step_probs(ell, remaining).get(mt, ZERO)
            if q == 1 or (q != 0 and bernoulli(rng, q)):
                return ("inc", j), prob * q
            prob *= ONE - q
            remaining -= parts[j]
            ell += 1
            j += 1


def _monotone_move_probs(low: Dict[int, Fraction], high: Dict[int, Fraction]) -> Dict[int, Fraction]:
    """Move probabilities of the shared-uniform coupling of two step laws.

    ``low`` and ``high`` are laws on consecutive integer ranges (the
    support of ``high`` extends one point further right).  Verifies the
    interleaving inequalities high(m) <= low(m) >= high(m+1) and returns,
    for every m in the support of ``low``, the conditional probability
    that the coupled pair moves from m to m+1.
    """
    top = max(low) if low else -1
    for m in range(0, top + 1):
        lo_m = low.get(m, ZERO)
        if high.get(m, ZERO) > lo_m:
            raise NotCoupleable(m)
        if high.get(m + 1, ZERO) > lo_m:
            raise NotCoupleable(m)
    for m in high:
        if m > top + 1:
            raise NotCoupleable(m, f"upper law reaches {m}, beyond the lower support {top}")
    probs: Dict[int, Fraction] = {}
    f_low = ZERO
    cum_high: Dict[int, Fraction] = {}
    acc = ZERO
    for m in range(0, top + 2):
        acc += high.get(m, ZERO)
        cum_high[m] = acc
    for m in range(0, top + 1):
        mass = low.get(m, ZERO)
        if mass == 0:
            continue
        f_prev = f_low
        f_low += mass
        overlap = f_low - max(f_prev, cum_high.get(m, ZERO))
        if overlap < 0:
            overlap = ZERO
        probs[m] = overlap / mass
    return probs


class PairTables(PartitionKernel):
    """Partition values for a generic weight pair, from the part-count table.

    ``f[t][k]`` sums the b-products over k-part compositions of t; the
    partition value of any left shift of the count weights is then a
    single weighted column sum.
    """

    def __init__(self, wp: WeightPair, cls: ArithClass = PLAIN, total_horizon: Optional[int] = None,
                 validate: bool = True):
        if validate:
            wp.check_nondegenerate(cls)
        self.wp = wp
        self.cls = cls
        self.d = cls.d
        n = wp.b.horizon if total_horizon is None else total_horizon
        if n > wp.b.horizon:
            raise HorizonError(f"pair tables to total {n} need b up to {n}, have {wp.b.horizon}")
        self.total_horizon = n
        f = [[ZERO] * (n + 1) for _ in range(n + 1)]
        f[0][0] = ONE
        for t in range(1, n + 1):
            row = f[t]
            for m in range(1, t + 1):
                bm = wp.b[m]
                if bm == 0:
                    continue
                prev = f[t - m]
                for k in range(1, t + 1):
                    if prev[k - 1]:
                        row[k] += bm * prev[k - 1]
        self._f = f
        self._z: Dict[Tuple[int, int], Fraction] = {}

    def f_value(self, t: int, k: int) -> Fraction:
        if t > self.total_horizon:
            raise HorizonError(f"part-count table only reaches total {self.total_horizon}")
        if k < 0 or k > t:
            return ZERO
        return self._f[t][k]

    def a_weight(self, i: int) -> Fraction:
        return self.wp.a_at(i)

    def b_weight(self, m: int) -> Fraction:
        return self.wp.b[m]

    def max_a_index(self) -> int:
        return self.wp.max_a_index

    def partition_value(self, ell: int, t: int) -> Fraction:
        key = (ell, t)
        cached = self._z.get(key)
        if cached is not None:
            return cached
        if t > self.total_horizon:
            raise HorizonError(f"partition value at total {t} beyond horizon {self.total_horizon}")
        row = self._f[t]
        z = ZERO
        for k in range(0, t + 1):
            if row[k]:
                z += self.wp.a_at(k + ell) * row[k]
        self._z[key] = z
        return z


def partition_function(wp: WeightPair, n: int, cls: ArithClass = PLAIN) -> Fraction:
    """Exact partition value Z_n; zero (with no mass) when the residue of n is wrong."""
    wp.check_nondegenerate(cls)
    if not wp.total_has_mass(n, cls):
        return ZERO
    return PairTables(wp, cls, total_horizon=n, validate=False).partition_value(0, n)


def comp_distribution(wp: WeightPair, n: int, cls: ArithClass = PLAIN) -> Dict[Composition, Fraction]:
    """The exact law on compositions of n induced by the weight pair."""
    wp.check_nondegenerate(cls)
    z = partition_function(wp, n, cls)
    if z == 0:
        raise ZeroMassError(f"zero total mass at n={n} for class (d={cls.d}, s={cls.s})")
    law: Dict[Composition, Fraction] = {}
    for c in iter_compositions(n, cls if cls.d > 1 else None):
        mass = wp.a_at(len(c))
        if mass == 0:
            continue
        for p in c:
            mass *= wp.b[p]
            if mass == 0:
                break
        if mass:
            law[c] = mass / z
    return law


def first_part_law(wp: WeightPair, n: int, cls: ArithClass = PLAIN) -> StepLaw:
    """Law of the first part under the composition law at total n.

    Well-defined whenever the total carries mass; with count weights
    supported on {0, 1} it degenerates to the point mass at n.
    """
    wp.check_nondegenerate(cls)
    tables = PairTables(wp, cls, total_horizon=n, validate=False)
    law = tables.reindexed_first_part_law(0, n)
    masses = {mt * cls.d + 1: p for mt, p in law.items()}
    return StepLaw(total=n, step=cls.d, masses=masses)


def monotone_step_kernel(mu_n: StepLaw, mu_next: StepLaw) -> Dict[int, Tuple[Fraction, Fraction]]:
    """Conditional transition of the shared-uniform monotone coupling.

    Maps each first-part value m in the support of ``mu_n`` to the pair
    (probability of staying at m, probability of moving to m+step).
    Pushing ``mu_n`` through this kernel reproduces ``mu_next`` exactly.
    """
    if mu_n.step != mu_next.step:
        raise DomainError("step laws use different increments")
    if mu_next.total != mu_n.total + mu_n.step:
        raise DomainError("step laws are not at consecutive totals")
    probs = _monotone_move_probs(mu_n.reindexed(), mu_next.reindexed())
    out: Dict[int, Tuple[Fraction, Fraction]] = {}
    for mt, p in mu_n.reindexed().items():
        if p == 0:
            continue
        q = probs.get(mt, ZERO)
        out[mt * mu_n.step + 1] = (ONE - q, q)
    return out


def composition_kernel(wp: WeightPair, cls: ArithClass, n: int, c: Composition) -> Dict[Composition, Fraction]:
    """Exact one-step law on compositions of n+d given the current composition c of n."""
    wp.check_nondegenerate(cls)
    if sum(c) != n:
        raise DomainError(f"composition {c} does not sum to {n}")
    if cls.d > 1 and not satisfies_arith(c, cls):
        raise DomainError(f"composition {c} violates the (d={cls.d}, s={cls.s}) condition")
    tables = PairTables(wp, cls, total_horizon=n + cls.d, validate=False)
    return tables.kernel_row(0, n, c)


@dataclass(frozen=True)
class InequalityFailure:
    n: int
    position: Tuple[int, int]  # (q, s) grid coordinates; (ell, 0) when d = 1
    kind: str
    lhs: Fraction
    rhs: Fraction

    def as_dict(self):
        return {
            "n": self.n,
            "position": list(self.position),
            "kind": self.kind,
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
        }


@dataclass
class AdmissibilityReport:
    horizon: int
    checked: int = 0
    failures: List[InequalityFailure] = field(default_factory=list)
    note: str = ""

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self):
        return {
            "horizon": self.horizon,
            "checked": self.checked,
            "ok": self.ok,
            "note": self.note,
            "failures": [f.as_dict() for f in self.failures],
        }


def check_admissibility_inequalities(wp: WeightPair, cls: ArithClass = PLAIN, N: int = 10) -> AdmissibilityReport:
    """Verify the ratio inequalities that make the pair's chain coupleable.

    For each n <= N the shifted-pair partition ratios must decrease along
    the shift ladder and stay between the consecutive b-ratios; every
    exact failure is recorded with its grid position and both sides.
    """
    wp.check_nondegenerate(cls)
    d, s0 = cls.d, cls.s
    if s0 != 0:
        raise DomainError("admissibility checks start from the class (d, 0)")
    report = AdmissibilityReport(horizon=N)
    if d == 1 and wp.max_a_index <= 1:
        # only single-part compositions carry mass: the chain is forced,
        # no coupling inequalities are involved
        report.note = "trivially admissible: single-part chains"
        return report
    r = wp.shift_count(cls)
    if r < 1:
        report.note = "trivially admissible: no shift ladder"
        return report
    total_horizon = (N + 1) * d + 1
    if total_horizon > wp.b.horizon:
        raise HorizonError(
            f"checking up to n={N} needs b up to {total_horizon}, have {wp.b.horizon}")
    tables = PairTables(wp, cls, total_horizon=total_horizon, validate=False)

    def ratio(q, s, n):
        ell = q * d + s
        num = tables.partition_value(ell, n * d + (d - s))
        den = tables.partition_value(ell, (n - 1) * d + (d - s))
        return num, den

    for n in range(0, N + 1):
        grid = [(q, s) for s in range(d) for q in range(r)] if n >= 1 else [(q, 0) for q in range(r)]
        values = []
        for q, s in grid:
            num, den = ratio(q, s, n)
            if den == 0:
                raise ZeroMassError(f"partition value vanished at n={n}, shift {(q, s)}")
            values.append((q, s, Fraction(num, den)))
        for (q1, s1, v1), (q2, s2, v2) in zip(values, values[1:]):
            report.checked += 1
            if not v1 >= v2:
                report.failures.append(InequalityFailure(n, (q2, s2), "chain-decrease", v1, v2))
        upper = Fraction(wp.b[(n + 1) * d + 1], wp.b[n * d + 1])
        report.checked += 1
        if not values[0][2] <= upper:
            q, s, v = values[0]
            report.failures.append(InequalityFailure(n, (q, s), "upper-b-ratio", v, upper))
        if n >= 1:
            lower = Fraction(wp.b[n * d + 1], wp.b[(n - 1) * d + 1])
            report.checked += 1
            if not values[-1][2] >= lower:
                q, s, v = values[-1]
                report.failures.append(InequalityFailure(n, (q, s), "lower-b-ratio", lower, v))
    return report


def apply_move(c: Composition, move: Tuple, d: int) -> Composition:
    kind, j = move
    if kind == "inc":
        return c[:j] + (c[j] + d,) + c[j + 1:]
    if kind == "append":
        return c + (1,) * d
    raise DomainError(f"unknown move {move!r}")


def sample_composition_chain(wp: WeightPair, cls: ArithClass, N: int, rng,
                             tables: Optional[PairTables] = None) -> List[Composition]:
    """Sample a covering chain of compositions up to total N, one step per d.

    Deterministic given the rng stream.  The chain starts at the unique
    composition of total s (the empty one when s = 0).  Pass precomputed
    ``tables`` when sampling many chains from the same pair.
    """
    wp.check_nondegenerate(cls)
    d, s = cls.d, cls.s
    if N < s:
        raise DomainError("horizon below the starting total")
    if tables is None:
        tables = PairTables(wp, cls, total_horizon=min(wp.b.horizon, N + d), validate=False)
    c: Composition = (1,) * s
    total = s
    out = [c]
    while total + d <= N:
        move, _ = tables.sample_move(total, c, rng)
        c = apply_move(c, move, d)
        total += d
        out.append(c)
    return out
