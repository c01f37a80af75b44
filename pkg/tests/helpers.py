"""Bulk exact-threshold trajectory sampling for the statistical batteries.

The growth chains live on enumerable state spaces at desk scale, so their
one-step kernels can be materialized exactly and trajectories sampled in
bulk: each categorical draw compares a uniform integer below the row's
common denominator against exact cumulative thresholds, so no rounding
enters anywhere.  numpy only vectorizes the integer comparisons.
"""

import itertools
import math
from fractions import Fraction

import numpy as np

from treegrow.oracle import enumerate_plane_trees, enumerate_subtrees
from treegrow.sgtrees import growth_kernel_row
from treegrow.subtree_model import nested_coupling_law
from treegrow.treespace import ROOT


def random_subtree(rng, n_max=5, positions=(1, 2, 3)):
    n = rng.randint(1, n_max)
    pool = enumerate_subtrees(n, positions=positions)
    return pool[rng.randrange(len(pool))]


def random_shuffle_for(tau, rng, span=9):
    g = {}
    for u in tau.vertices:
        positions = tau.children_positions(u)
        images = rng.sample(range(1, span + 1), len(positions))
        g[u] = dict(zip(positions, images))
    return g


def integer_thresholds(masses):
    """Common denominator and exact cumulative integer thresholds of a law."""
    den = math.lcm(*[m.denominator for m in masses])
    if den >= 1 << 62:
        raise OverflowError("row denominator too large for int64 bulk sampling")
    nums = [int(m * den) for m in masses]
    cum = np.cumsum(np.array(nums, dtype=np.int64))
    assert int(cum[-1]) == den
    return den, cum


class LevelKernels:
    """Exact transition tables of a tree growth chain over enumerated levels."""

    def __init__(self, tables, w, d, n_max):
        self.d = d
        self.levels = list(range(1, n_max + 1, d))
        self.states = {}
        self.index = {}
        for n in self.levels:
            trees = [t for t in enumerate_plane_trees(n, d, max_n=n_max)
                     if all(w[t.children_count(u)] != 0 for u in t.vertices)]
            trees.sort(key=lambda t: sorted(t.vertices))
            self.states[n] = trees
            self.index[n] = {t.vertices: i for i, t in enumerate(trees)}
        self.trans = {}
        for n in self.levels[:-1]:
            nxt_index = self.index[n + d]
            rows = []
            for tree in self.states[n]:
                row = growth_kernel_row(tables, tree)
                items = sorted(row.items(), key=lambda kv: sorted(kv[0].vertices))
                den, cum = integer_thresholds([m for _, m in items])
                targets = np.array([nxt_index[t.vertices] for t, _ in items], dtype=np.int64)
                rows.append((den, cum, targets))
            width = max(len(cum) for _, cum, _ in rows)
            dens = np.array([den for den, _, _ in rows], dtype=np.int64)
            cums = np.full((len(rows), width), 0, dtype=np.int64)
            nxts = np.zeros((len(rows), width), dtype=np.int64)
            for i, (den, cum, targets) in enumerate(rows):
                cums[i, :len(cum)] = cum
                cums[i, len(cum):] = den  # padding never selected: draws stay below den
                nxts[i, :len(targets)] = targets
            self.trans[n] = (dens, cums, nxts)

    def run_chains(self, n_chains, rng, record):
        """Sample trajectories; returns state-index count vectors at the recorded levels."""
        record = set(record)
        cur = np.zeros(n_chains, dtype=np.int64)
        out = {}
        if self.levels[0] in record:
            out[self.levels[0]] = np.bincount(cur, minlength=len(self.states[self.levels[0]]))
        for n in self.levels[:-1]:
            dens, cums, nxts = self.trans[n]
            draws = rng.integers(0, dens[cur])
            idx = (cums[cur] <= draws[:, None]).sum(axis=1)
            cur = nxts[cur, idx]
            if n + self.d in record:
                out[n + self.d] = np.bincount(cur, minlength=len(self.states[n + self.d]))
        return out


def prefix_laws(theta):
    """Exact laws of the first k inserted positions, for every k."""
    joint = nested_coupling_law(theta)
    n = len(next(iter(joint)))
    out = {}
    for k in range(n + 1):
        law = {}
        for seq, mass in joint.items():
            key = seq[:k]
            law[key] = law.get(key, Fraction(0)) + mass
        out[k] = law
    return out


def embedded_subtree_key(tree, prefixes):
    """Vertices of the subtree obtained by renaming child j of u to its j-th inserted position."""
    image = {ROOT: ROOT}
    for u in tree.sorted_vertices():
        if u:
            parent = u[:-1]
            image[u] = image[parent] + (prefixes[parent][u[-1] - 1],)
    return frozenset(image.values())


def conditional_embedding_laws(theta, trees, subtree_index):
    """Per plane tree, integer-threshold law of the embedded subtree.

    The per-vertex insertion orderings are independent of the tree chain,
    so the marginal subtree law factorizes through the plane tree; this
    enumerates the finitely many prefix assignments exactly.
    """
    prefs = prefix_laws(theta)
    out = []
    for tree in trees:
        vertices = tree.sorted_vertices()
        internal = [u for u in vertices if tree.children_count(u) > 0]
        law = {}
        choices = [list(prefs[tree.children_count(u)].items()) for u in internal]
        for combo in itertools.product(*choices):
            assignment = {u: seq for u, (seq, _) in zip(internal, combo)}
            mass = Fraction(1)
            for _, m in combo:
                mass *= m
            key = embedded_subtree_key(tree, assignment)
            law[key] = law.get(key, Fraction(0)) + mass
        items = sorted(law.items(), key=lambda kv: sorted(kv[0]))
        den, cum = integer_thresholds([m for _, m in items])
        targets = np.array([subtree_index[k] for k, _ in items], dtype=np.int64)
        out.append((den, cum, targets))
    return out


def draw_embeddings(tree_counts, cond_laws, n_subtree_states, rng):
    """Push bulk tree counts through the conditional embedding laws, exactly."""
    counts = np.zeros(n_subtree_states, dtype=np.int64)
    for i, k in enumerate(tree_counts):
        k = int(k)
        if k == 0:
            continue
        den, cum, targets = cond_laws[i]
        draws = rng.integers(0, den, size=k)
        idx = np.searchsorted(cum, draws, side="right")
        counts += np.bincount(targets[idx], minlength=n_subtree_states)
    return counts
