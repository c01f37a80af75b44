"""Weighted random plane trees grown one right-leaning bouquet at a time.

A non-negative weight sequence ``w`` assigns mass ``prod_u w_{k_u(T)}``
to a plane tree ``T``; normalizing within trees of a fixed size gives the
simply generated laws, which include conditioned branching-process trees.
When the offspring weights are log-concave (along their arithmetic
progression when the support lives on multiples of d), consecutive laws
can be coupled so that each step adds one right-leaning leaf (d = 1) or
one right-leaning bouquet of d leaves.  This module computes the
partition tables, runs the exact inequality suites behind that
construction, builds the one-step transition kernels on enumerable state
spaces, and samples the growth chains.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from .compositions import PartitionKernel, ZERO, ONE, as_fraction
from .errors import DomainError, HorizonError, Refused, ZeroMassError
from .treespace import PlaneTree, ROOT, Word, decompose_root


class WeightSequence:
    """Offspring weights ``w_0, w_1, ...`` with an optional truncation horizon.

    A sequence with ``horizon=None`` is exactly what it says: zero beyond
    its entries.  A declared horizon marks a user-side truncation of an
    infinite family; reads past it raise instead of silently treating the
    unknown tail as zero.
    """

    __slots__ = ("entries", "horizon")

    def __init__(self, entries: Iterable, horizon: Optional[int] = None):
        self.entries = tuple(as_fraction(v) for v in entries)
        if any(v < 0 for v in self.entries):
            raise DomainError("offspring weights must be non-negative")
        if not any(self.entries):
            raise DomainError("offspring weights are identically zero")
        if horizon is not None and horizon < len(self.entries) - 1:
            raise DomainError("declared horizon shorter than the supplied entries")
        self.horizon = horizon

    def __getitem__(self, i: int) -> Fraction:
        if i < 0:
            raise DomainError("offspring weights are indexed from 0")
        if self.horizon is not None and i > self.horizon:
            raise HorizonError(f"w_{i} requested beyond declared truncation horizon {self.horizon}")
        return self.entries[i] if i < len(self.entries) else ZERO

    @property
    def radius(self) -> int:
        return max(i for i, v in enumerate(self.entries) if v != 0)

    def support(self) -> List[int]:
        return [i for i, v in enumerate(self.entries) if v != 0]

    def is_d_arithmetic(self, d: int) -> bool:
        return all(i % d == 0 for i in self.support())

    def progression(self, d: int) -> Tuple[Fraction, ...]:
        """The subsequence ``w_0, w_d, w_2d, ...`` up to the radius."""
        if d < 1:
            raise DomainError("d must be >= 1")
        if not self.is_d_arithmetic(d):
            bad = next(i for i in self.support() if i % d != 0)
            raise DomainError(f"weights are not supported on multiples of {d} (w_{bad} != 0)")
        return tuple(self.entries[i] for i in range(0, self.radius + 1, d))

    def __eq__(self, other):
        return (isinstance(other, WeightSequence)
                and self.entries == other.entries and self.horizon == other.horizon)

    def __hash__(self):
        return hash((self.entries, self.horizon))

    def __repr__(self):
        return f"WeightSequence({list(self.entries)!r}, horizon={self.horizon!r})"


def coerce_weights(w) -> WeightSequence:
    return w if isinstance(w, WeightSequence) else WeightSequence(w)


@dataclass(frozen=True)
class LogConcavity:
    ok: bool
    witness: Optional[int] = None

    def __bool__(self):
        return self.ok


def is_log_concave(xs) -> LogConcavity:
    """Check ``x_i^2 >= x_{i-1} x_{i+1}`` everywhere and the absence of internal zeros.

    The witness is the first index at which either condition fails.
    """
    x = [as_fraction(v) for v in xs]
    support = [i for i, v in enumerate(x) if v != 0]
    lo = support[0] if support else 0
    hi = support[-1] if support else -1
    for i in range(len(x)):
        if lo < i < hi and x[i] == 0:
            return LogConcavity(False, i)
        if 1 <= i <= len(x) - 2 and x[i] * x[i] < x[i - 1] * x[i + 1]:
            return LogConcavity(False, i)
    return LogConcavity(True, None)


@dataclass
class CheckReport:
    """Outcome of an exact verification suite: a count and a failure list."""

    name: str
    checked: int = 0
    failures: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, ok: bool, **context):
        self.checked += 1
        if not ok:
            self.failures.append({k: (str(v) if isinstance(v, Fraction) else v) for k, v in context.items()})

    def as_dict(self):
        return {"name": self.name, "checked": self.checked, "ok": self.ok, "failures": self.failures}


def check_toeplitz_tp2(xs, window: int) -> CheckReport:
    """Verify every 2x2 minor of the Toeplitz matrix ``(x_{i-j})`` is non-negative.

    Indices below zero read as zero.  All index quadruples i <= i',
    j <= j' inside the window are checked exactly.
    """
    x = [as_fraction(v) for v in xs]

    def at(i):
        return x[i] if 0 <= i < len(x) else ZERO

    report = CheckReport(name="toeplitz-tp2")
    for i in range(window):
        for i2 in range(i, window):
            for j in range(window):
                for j2 in range(j, window):
                    lhs = at(i - j) * at(i2 - j2)
                    rhs = at(i - j2) * at(i2 - j)
                    report.record(lhs >= rhs, i=i, i2=i2, j=j, j2=j2, lhs=lhs, rhs=rhs)
    return report


def tilt(w, alpha, beta) -> WeightSequence:
    """Reweight ``w_i`` to ``alpha * beta^i * w_i`` (exponential tilt)."""
    w = coerce_weights(w)
    alpha = as_fraction(alpha)
    beta = as_fraction(beta)
    if alpha <= 0 or beta <= 0:
        raise DomainError("tilt parameters must be positive")
    entries = [alpha * beta ** i * v for i, v in enumerate(w.entries)]
    return WeightSequence(entries, horizon=w.horizon)


class PartitionTables(PartitionKernel):
    """Exact tables for a weight sequence: tree masses and forest counts.

    ``b_n`` is the total mass of trees with n vertices, ``f`` the
    weighted count of ordered forests by total size and tree count.  Two
    storage layouts exist: the single array used in the plain case and
    the per-residue arrays used in the arithmetic case; both expose the
    same partition values and therefore the same kernels.
    """

    def __init__(self, w: WeightSequence, d: int, N: int, method: str):
        w = coerce_weights(w)
        if d < 1:
            raise DomainError("d must be >= 1")
        if N < 1:
            raise DomainError("the vertex horizon must be at least 1")
        if w.horizon is not None and N - 1 > w.horizon:
            raise HorizonError(
                f"tables to {N} vertices need w up to index {N - 1}, truncation horizon is {w.horizon}")
        if d == 1:
            if w[0] == 0 or w[1] == 0:
                raise DomainError("need w_0 w_1 > 0 for trees of every size to carry mass")
        else:
            if not w.is_d_arithmetic(d):
                raise DomainError(f"weights must be supported on multiples of d={d}")
            if w[0] == 0 or w[d] == 0:
                raise DomainError(f"need w_0 w_{d} > 0")
        if method not in ("direct", "arithmetic"):
            raise DomainError(f"unknown table method {method!r}")
        if method == "direct" and d != 1:
            raise DomainError("the direct recursion applies to d = 1 only")
        self.w = w
        self.d = d
        self.N = N
        self.method = method
        self._z: Dict[Tuple[int, int], Fraction] = {}
        self._rows: Dict[frozenset, Dict] = {}
        if method == "direct":
            self._build_direct()
        else:
            self._build_arithmetic()

    # -- construction ------------------------------------------------------

    def _build_direct(self):
        w, nt = self.w, self.N - 1
        f = [[ZERO] * (nt + 1) for _ in range(nt + 1)]
        f[0][0] = ONE
        b = {1: w[0]}
        if nt >= 1:
            f[1][1] = b[1]
        for t in range(2, nt + 1):
            b[t] = self._column_sum(f[t - 1], 0)
            f[t][1] = b[t]
            prev = f[t - 1]
            for k in range(2, t + 1):
                acc = ZERO
                for i in range(0, self.w.radius + 1):
                    wi = w[i]
                    if wi and k + i - 1 <= nt:
                        acc += wi * prev[k + i - 1]
                f[t][k] = acc
        if nt >= 1:
            b[nt + 1] = self._column_sum(f[nt], 0)
        self._f = f
        self.b = b

    def _column_sum(self, row, ell):
        w = self.w
        acc = ZERO
        for k, val in enumerate(row):
            if val:
                acc += w[k + ell] * val
        return acc

    def _build_arithmetic(self):
        w, d, nt = self.w, self.d, self.N - 1
        nmax = nt // d
        big = [[[ZERO] * (nmax + 2) for _ in range(nmax + 2)] for _ in range(d)]
        r = w.radius // d
        wprog = [w[j * d] for j in range(r + 1)]
        big[0][0][0] = ONE
        # residue rows at level 0
        for s in range(1, d):
            for k in range(nmax + 2):
                acc = ZERO
                for j, wj in enumerate(wprog):
                    if wj and k + j <= nmax + 1:
                        acc += wj * big[s - 1][0][k + j]
                big[s][0][k] = acc
        for n in range(1, nmax + 2):
            for k in range(1, nmax + 2):
                acc = ZERO
                for j, wj in enumerate(wprog):
                    if wj and 0 <= k + j - 1 <= nmax + 1:
                        acc += wj * big[d - 1][n - 1][k + j - 1]
                big[0][n][k] = acc
            for s in range(1, d):
                for k in range(nmax + 2):
                    acc = ZERO
                    for j, wj in enumerate(wprog):
                        if wj and k + j <= nmax + 1:
                            acc += wj * big[s - 1][n][k + j]
                    big[s][n][k] = acc
        self._F = big
        self._nmax = nmax
        b = {}
        for n in range(0, (self.N - 1) // d + 1):
            total = n * d + 1
            if total <= self.N:
                acc = ZERO
                for k, wk in enumerate(wprog):
                    if wk:
                        acc += wk * self.F_value(0, n, k)
                b[total] = acc
        self.b = b

    # -- raw table access ----------------------------------------------------

    def f_value(self, t: int, k: int) -> Fraction:
        """Weighted number of k-tree forests with t vertices in total."""
        if t < 0 or k < 0 or k > t:
            return ZERO
        if t > self.N - 1:
            raise HorizonError(f"forest table only reaches total {self.N - 1}")
        if self.method == "direct":
            return self._f[t][k]
        if k % self.d != t % self.d:
            return ZERO
        return self.F_value(t % self.d, t // self.d, (k - t % self.d) // self.d)

    def F_value(self, s: int, n: int, k: int) -> Fraction:
        if self.method == "direct":
            if s != 0:
                raise DomainError("direct tables have a single residue array")
            return self._f[n][k] if 0 <= n <= self.N - 1 and 0 <= k <= self.N - 1 else ZERO
        if n < 0 or k < 0 or n > self._nmax + 1 or k > self._nmax + 1:
            return ZERO
        return self._F[s][n][k]

    def b_value(self, n: int) -> Fraction:
        if n < 1:
            raise DomainError("tree sizes start at 1")
        if n > self.N:
            raise HorizonError(f"b_{n} beyond the vertex horizon {self.N}")
        return self.b.get(n, ZERO)

    # -- PartitionKernel surface ----------------------------------------------

    def a_weight(self, i: int) -> Fraction:
        return self.w[i]

    def b_weight(self, m: int) -> Fraction:
        return self.b_value(m)

    def max_a_index(self) -> int:
        return self.w.radius

    def partition_value(self, ell: int, t: int) -> Fraction:
        key = (ell, t)
        cached = self._z.get(key)
        if cached is not None:
            return cached
        if t < 0:
            raise DomainError("partition values need a non-negative total")
        if t > self.N - 1:
            raise HorizonError(f"partition value at total {t} beyond horizon {self.N - 1}")
        w, d = self.w, self.d
        s = t % d
        acc = ZERO
        for k in range(0, t // d + 1):
            fv = self.F_value(s, t // d, k) if self.method == "arithmetic" else self._f[t][k * d + s]
            if fv:
                acc += w[k * d + s + ell] * fv
        self._z[key] = acc
        return acc

    def ratio(self, n: int, q: int, s: int) -> Fraction:
        """Partition ratio of the (q*d+s)-shifted weights between adjacent levels."""
        d = self.d
        num = self.partition_value(q * d + s, n * d + (d - s))
        den = self.partition_value(q * d + s, (n - 1) * d + (d - s))
        if den == 0:
            raise ZeroMassError(f"vanishing partition value at n={n}, shift ({q},{s})")
        return num / den


def compute_tables(w, d: int = 1, N: int = 10, method: Optional[str] = None) -> PartitionTables:
    """Build the exact tables needed for laws and kernels up to N vertices."""
    if method is None:
        method = "direct" if d == 1 else "arithmetic"
    return PartitionTables(coerce_weights(w), d, N, method)


def sg_distribution(w, d: int, n: int, tables: Optional[PartitionTables] = None) -> Dict[PlaneTree, Fraction]:
    """The exact size-n tree law: mass of T proportional to the product of its offspring weights."""
    from .oracle import enumerate_plane_trees

    w = coerce_weights(w)
    if n % d != 1 % d:
        raise ZeroMassError(f"no trees of size {n} when offspring counts are multiples of {d}")
    if tables is None:
        tables = compute_tables(w, d, N=n)
    bn = tables.b_value(n)
    if bn == 0:
        raise ZeroMassError(f"total tree mass vanishes at size {n}")
    law: Dict[PlaneTree, Fraction] = {}
    for tree in enumerate_plane_trees(n, d):
        mass = ONE
        for u in tree.vertices:
            mass *= w[tree.children_count(u)]
            if mass == 0:
                break
        if mass:
            law[tree] = mass / bn
    if sum(law.values()) != 1:
        raise ZeroMassError("tree law does not normalize: table and enumeration disagree")
    return law


def check_tp2_array(tables: PartitionTables, N: Optional[int] = None) -> CheckReport:
    """Exactly verify all 2x2 minors of the forest arrays are non-negative."""
    report = CheckReport(name="tp2-array")
    if tables.method == "direct":
        top = min(N if N is not None else tables.N - 1, tables.N - 1)
        for n in range(1, top + 1):
            for n2 in range(n, top + 1):
                for k in range(1, top + 1):
                    for k2 in range(k, top + 1):
                        lhs = tables.f_value(n, k) * tables.f_value(n2, k2)
                        rhs = tables.f_value(n, k2) * tables.f_value(n2, k)
                        report.record(lhs >= rhs, n=n, n2=n2, k=k, k2=k2, lhs=lhs, rhs=rhs)
        return report
    top = min(N if N is not None else tables._nmax, tables._nmax)
    for s in range(tables.d):
        for n in range(0, top + 1):
            for n2 in range(n, top + 1):
                for k in range(0, top + 1):
                    for k2 in range(k, top + 1):
                        lhs = tables.F_value(s, n, k) * tables.F_value(s, n2, k2)
                        rhs = tables.F_value(s, n, k2) * tables.F_value(s, n2, k)
                        report.record(lhs >= rhs, s=s, n=n, n2=n2, k=k, k2=k2, lhs=lhs, rhs=rhs)
    return report


def check_ratio_chain(tables: PartitionTables, n_max: Optional[int] = None) -> CheckReport:
    """Verify the descending chain of shifted partition ratios and its endpoints.

    For each level the ratios, read along the shift ladder, must be
    non-increasing, start at the ratio of consecutive tree masses one
    level up and end at the ratio one level down; failures carry the
    exact values of both sides.
    """
    report = CheckReport(name="ratio-chain")
    d = tables.d
    r = tables.w.radius // d
    if n_max is None:
        n_max = (tables.N - 1) // d - 1
    for n in range(0, n_max + 1):
        grid = [(q, s) for s in range(d) for q in range(r)] if n >= 1 else [(q, 0) for q in range(r)]
        if not grid:
            continue
        values = [(q, s, tables.ratio(n, q, s)) for q, s in grid]
        for (q1, s1, v1), (q2, s2, v2) in zip(values, values[1:]):
            report.record(v1 >= v2, n=n, hi=(q1, s1), lo=(q2, s2), lhs=v1, rhs=v2)
        upper = tables.b_value((n + 1) * d + 1) / tables.b_value(n * d + 1)
        report.record(values[0][2] == upper, n=n, kind="upper-endpoint-identity",
                      lhs=values[0][2], rhs=upper)
        if n >= 1:
            lower = tables.b_value(n * d + 1) / tables.b_value((n - 1) * d + 1)
            report.record(values[-1][2] == lower, n=n, kind="lower-endpoint-identity",
                          lhs=values[-1][2], rhs=lower)
    return report


def growth_kernel_row(tables: PartitionTables, tree: PlaneTree) -> Dict[PlaneTree, Fraction]:
    """Exact one-step law of the growth chain from the given tree.

    The root composition takes one covering move; an incremented part
    sends the corresponding child subtree through its own kernel row,
    an appended run of parts creates the new bouquet at the root.  Rows
    sum to one and are supported on right-leaning bouquet additions.
    """
    key = tree.vertices
    cached = tables._rows.get(key)
    if cached is not None:
        return cached
    d = tables.d
    subtrees, parts = decompose_root(tree)
    row_c = tables.kernel_row(0, len(tree) - 1, parts)
    out: Dict[PlaneTree, Fraction] = {}
    base = tree.vertices
    for c2, p in row_c.items():
        if len(c2) > len(parts):
            k = len(parts)
            grown = PlaneTree(base | {(k + i,) for i in range(1, d + 1)})
            if grown in out:
                raise DomainError("two covering moves produced the same tree")
            out[grown] = p
        else:
            j = next(i for i in range(len(parts)) if c2[i] != parts[i])
            prefix = j + 1
            kept = {u for u in base if not u or u[0] != prefix}
            for sub2, q in growth_kernel_row(tables, subtrees[j]).items():
                grown = PlaneTree(kept | {(prefix,) + u for u in sub2.vertices})
                if grown in out:
                    raise DomainError("two covering moves produced the same tree")
                out[grown] = p * q
    tables._rows[key] = out
    return out


@dataclass(frozen=True)
class GrowthStep:
    index: int
    n: int
    parent: Word
    new_vertices: Tuple[Word, ...]
    prob: Fraction


class GrowthChain:
    """Single-owner sampler of the increasing tree process.

    The state is the tree alone; each step descends from the root,
    deciding at every level whether the current first part of the local
    composition grows, and finally plants a right-leaning bouquet.
    Deterministic given the rng stream.
    """

    def __init__(self, w, d: int = 1, horizon: int = 10, rng: Optional[random.Random] = None,
                 tables: Optional[PartitionTables] = None):
        w = coerce_weights(w)
        lc = is_log_concave(w.progression(d))
        if not lc.ok:
            raise Refused(lc.witness)
        if tables is None:
            tables = compute_tables(w, d, N=horizon)
        elif tables.N < horizon:
            raise HorizonError("supplied tables stop before the requested horizon")
        self.w = w
        self.d = d
        self.horizon = horizon
        self.rng = rng if rng is not None else random.Random()
        self.tables = tables
        self._kids: Dict[Word, int] = {ROOT: 0}
        self._size: Dict[Word, int] = {ROOT: 1}
        self.n = 1
        self.step_index = 0

    def tree(self) -> PlaneTree:
        return PlaneTree(self._size.keys())

    def tree_key(self) -> frozenset:
        return frozenset(self._size.keys())

    def children_count(self, u: Word) -> int:
        return self._kids[u]

    def step(self) -> GrowthStep:
        if self.n + self.d > self.horizon:
            raise HorizonError(f"chain at {self.n} vertices cannot grow past horizon {self.horizon}")
        d = self.d
        v: Word = ROOT
        path = [ROOT]
        prob = ONE
        while True:
            k = self._kids[v]
            parts = tuple(self._size[v + (j,)] for j in range(1, k + 1))
            move, p = self.tables.sample_move(self._size[v] - 1, parts, self.rng)
            prob *= p
            kind, j = move
            if kind == "append":
                new = tuple(v + (k + i,) for i in range(1, d + 1))
                for u in new:
                    self._kids[u] = 0
                    self._size[u] = 1
                self._kids[v] += d
                for u in path:
                    self._size[u] += d
                self.n += d
                self.step_index += 1
                return GrowthStep(self.step_index, self.n, v, new, prob)
            v = v + (j + 1,)
            path.append(v)

    def run(self) -> List[GrowthStep]:
        steps = []
        while self.n + self.d <= self.horizon:
            steps.append(self.step())
        return steps


def grow_chain(w, d: int, N: int, rng: random.Random,
               tables: Optional[PartitionTables] = None) -> List[PlaneTree]:
    """Sample the nested tree trace up to N vertices; deterministic per rng stream."""
    chain = GrowthChain(w, d, horizon=N, rng=rng, tables=tables)
    trees = [chain.tree()]
    while chain.n + d <= N:
        chain.step()
        trees.append(chain.tree())
    return trees
