"""Per-mode multi-slice clustering.

For one mode of a 3rd-order tensor: summarize every slice by the top
eigenpair of its covariance, scale each eigenvector by its normalized
eigenvalue, and measure slice similarity as C = |V^T V|. The row sums d of C
separate signal slices (high d) from background. A cluster is seeded at the
largest gap in sorted d and then shrunk until the d values over the cluster
form a chain with no oversized step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, NoGapError
from .spectral import EigConfig, covariance, top_eigen

EQUAL_TOL = 1e-12


@dataclass(frozen=True)
class SliceSpectra:
    """Spectral summary of all slices along one mode.

    v_matrix column i is (lambdas[i] / lambda_max) * (top eigenvector of
    slice i's covariance), so its norm encodes relative slice energy.
    """

    mode: int
    lambdas: np.ndarray
    lambda_max: float
    v_matrix: np.ndarray


@dataclass(frozen=True)
class SimilarityMatrix:
    """Similarity C = |V^T V| together with its row marginal sums d."""

    c: np.ndarray
    d: np.ndarray


@dataclass(frozen=True)
class MscResult:
    """One mode's cluster with its diagnostics.

    bound is the spread allowance l * epsilon / 2 + sqrt(max(0, ln(m - l)))
    at the final cluster size l. converged means every step between
    consecutive sorted d values inside the cluster is at most the bound.
    strength_ratio compares lambda_max against the random-slice baseline
    (sqrt(rows - 1) + sqrt(cols))^2 for this mode's slice shape; it is a
    diagnostic only and is never enforced.
    """

    mode: int
    cluster: tuple
    d: np.ndarray
    epsilon: float
    size: int
    bound: float
    converged: bool
    similarity: SimilarityMatrix | None = field(default=None, repr=False)
    lambda_max: float | None = None
    strength_ratio: float | None = None


def marginal_spread_bound(l, epsilon, m):
    """Spread allowance for a size-l cluster over m slices.

    l * epsilon / 2 + sqrt(max(0, ln(m - l))); the log term is clamped to 0
    when m - l <= 1 so the bound is defined for every feasible size.
    """
    gap = m - l
    term = math.sqrt(max(0.0, math.log(gap))) if gap >= 1 else 0.0
    return l * epsilon / 2.0 + term


def slice_spectra(t, mode, config=None):
    """Top eigenpair of every slice covariance along one mode.

    Raises DegenerateInputError when all slices are zero (nothing to
    normalize against).
    """
    cfg = config or EigConfig()
    m = t.dims[mode - 1]
    if m < 3:
        raise ValueError(f"mode-{mode} needs at least 3 slices, got {m}")
    lams = np.empty(m)
    vecs = []
    for i in range(m):
        c = covariance(t.slice(mode, i))
        pair = top_eigen(c, cfg)
        lams[i] = pair.value
        vecs.append(pair.vector)
    lam_max = float(lams.max())
    if lam_max <= 0.0:
        raise DegenerateInputError(
            f"every mode-{mode} slice has zero energy; cannot normalize"
        )
    ratios = lams / lam_max
    v = np.column_stack(vecs) * ratios[np.newaxis, :]
    return SliceSpectra(mode=mode, lambdas=lams, lambda_max=lam_max, v_matrix=v)


def similarity_matrix(spectra):
    """C = |V^T V| (exactly symmetric) and its row sums d."""
    g = spectra.v_matrix.T @ spectra.v_matrix
    upper = np.triu(g)
    c = np.abs(upper + np.triu(g, 1).T)
    d = c.sum(axis=1)
    return SimilarityMatrix(c=c, d=d)


def initial_cluster_by_gap(d):
    """Seed cluster: indices above the largest gap in sorted d.

    Sorts d ascending, finds the largest consecutive gap (ties prefer the
    gap at larger d values, which yields the smaller, tighter group), and
    returns the indices whose d exceeds the gap midpoint. Raises NoGapError
    when all values are equal within 1e-12.
    """
    d = np.asarray(d, dtype=np.float64)
    if d.size < 3:
        raise ValueError(f"need at least 3 marginals, got {d.size}")
    vals = np.sort(d)
    if vals[-1] - vals[0] <= EQUAL_TOL:
        raise NoGapError("all marginals equal within 1e-12; no cluster to seed", d=d)
    gaps = np.diff(vals)
    # last occurrence of the maximum gap = the tie at larger d values
    pos = len(gaps) - 1 - int(np.argmax(gaps[::-1]))
    mid = 0.5 * (vals[pos] + vals[pos + 1])
    return tuple(int(i) for i in np.flatnonzero(d > mid))


def refine_cluster(j0, d, epsilon, m, mode=0, similarity=None,
                   lambda_max=None, strength_ratio=None):
    """Shrink a seed cluster until its d values satisfy the spread test.

    At size l the allowance is marginal_spread_bound(l, epsilon, m). The
    cluster converges when no step between consecutive sorted d values over
    its members exceeds the allowance; otherwise the member with the
    smallest d is removed and the test repeats. Removal-only, so the loop
    runs at most |j0| - 1 times. If the size drops below 2 the result is an
    empty, non-converged cluster.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    d = np.asarray(d, dtype=np.float64)
    members = sorted(int(i) for i in j0)
    if len(members) < 2:
        raise ValueError(f"seed cluster must have at least 2 members, got {len(members)}")
    bound = marginal_spread_bound(len(members), epsilon, m)
    while len(members) >= 2:
        l = len(members)
        bound = marginal_spread_bound(l, epsilon, m)
        steps = np.diff(np.sort(d[members]))
        if steps.max() <= bound:
            return MscResult(
                mode=mode, cluster=tuple(members), d=d, epsilon=epsilon,
                size=l, bound=bound, converged=True, similarity=similarity,
                lambda_max=lambda_max, strength_ratio=strength_ratio,
            )
        drop = members[int(np.argmin(d[members]))]
        members.remove(drop)
    return MscResult(
        mode=mode, cluster=(), d=d, epsilon=epsilon, size=0, bound=bound,
        converged=False, similarity=similarity, lambda_max=lambda_max,
        strength_ratio=strength_ratio,
    )


def msc_mode(t, mode, epsilon, config=None):
    """Full single-mode run: spectra, similarity, gap seed, refinement.

    The similarity matrix is retained on the result for the density-split
    stage. A singleton seed (a lone outlying slice) is reported as an empty,
    non-converged result rather than a cluster.
    """
    spectra = slice_spectra(t, mode, config)
    sim = similarity_matrix(spectra)
    rows, cols = t.slice(mode, 0).shape
    baseline = (math.sqrt(max(rows - 1, 0)) + math.sqrt(cols)) ** 2
    ratio = spectra.lambda_max / baseline if baseline > 0 else float("inf")
    m = t.dims[mode - 1]
    seed = initial_cluster_by_gap(sim.d)
    if len(seed) < 2:
        return MscResult(
            mode=mode, cluster=(), d=sim.d, epsilon=epsilon, size=0,
            bound=marginal_spread_bound(2, epsilon, m), converged=False,
            similarity=sim, lambda_max=spectra.lambda_max, strength_ratio=ratio,
        )
    return refine_cluster(
        seed, sim.d, epsilon, m, mode=mode, similarity=sim,
        lambda_max=spectra.lambda_max, strength_ratio=ratio,
    )
