"""End-to-end runs: per-mode clustering, density splitting, tricluster assembly.

The three modes are processed independently. Cross-mode pairing is by rank:
clusters within each mode are ordered by descending mean marginal and matched
by position, truncating to the smallest per-mode count. The pairing rule is
recorded on the result so downstream consumers can see how triples were
formed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dbscan import split_cluster
from .errors import NoGapError
from .msc import MscResult, msc_mode

PAIRING_RULE = "rank-by-mean-marginal"


@dataclass(frozen=True)
class ModeClustering:
    """One mode's final clusters plus the diagnostics of the stage that made them."""

    mode: int
    clusters: list
    noise: tuple
    msc: MscResult = field(repr=False)


@dataclass(frozen=True)
class Tricluster:
    """A triple of per-mode index sets defining a sub-cube, with a coherence score.

    score is the mean absolute entry of the sub-cube (None when no tensor was
    available at pairing time).
    """

    j1: tuple
    j2: tuple
    j3: tuple
    score: float | None = None


@dataclass(frozen=True)
class TriclusterSet:
    triclusters: list
    pairing_rule: str = PAIRING_RULE


def run_msc(t, epsilon, config=None):
    """Single-cluster-per-mode run on all three modes.

    Errors propagate: an all-zero tensor raises DegenerateInputError, a
    gapless marginal vector raises NoGapError.
    """
    return [msc_mode(t, mode, epsilon, config) for mode in (1, 2, 3)]


def _empty_mode(mode, d, epsilon, bound=0.0):
    res = MscResult(
        mode=mode, cluster=(), d=np.asarray(d, dtype=np.float64),
        epsilon=epsilon, size=0, bound=bound, converged=False,
    )
    return ModeClustering(mode=mode, clusters=[], noise=(), msc=res)


def run_msc_dbscan(t, epsilon, config=None):
    """Per-mode clustering followed by density splitting, then pairing.

    A mode where no cluster can be seeded (gapless marginals) or where
    refinement empties the seed degrades to an empty mode instead of
    aborting the run. An all-zero tensor still raises DegenerateInputError.
    Returns (list of ModeClustering, TriclusterSet).
    """
    modes = []
    for mode in (1, 2, 3):
        try:
            res = msc_mode(t, mode, epsilon, config)
        except NoGapError as e:
            d = e.d if e.d is not None else np.empty(0)
            modes.append(_empty_mode(mode, d, epsilon))
            continue
        if res.size < 2 or not res.converged:
            modes.append(ModeClustering(mode=mode, clusters=[], noise=(), msc=res))
            continue
        split = split_cluster(res.similarity, res.cluster, epsilon)
        modes.append(
            ModeClustering(
                mode=mode, clusters=list(split.clusters), noise=split.noise, msc=res
            )
        )
    return modes, pair_triclusters(modes, tensor=t)


def pair_triclusters(modes, tensor=None):
    """Match per-mode clusters into triples by rank.

    Clusters inside each ModeClustering are already ordered by descending
    mean marginal; position r of each mode forms tricluster r. The list is
    truncated to the smallest per-mode cluster count. When a tensor is
    given, each triple is scored by the mean absolute entry of its sub-cube.
    """
    if len(modes) != 3:
        raise ValueError(f"expected 3 mode clusterings, got {len(modes)}")
    count = min(len(mc.clusters) for mc in modes)
    triples = []
    for r in range(count):
        j1, j2, j3 = (tuple(modes[i].clusters[r]) for i in range(3))
        score = None
        if tensor is not None:
            sub = tensor.subcube(j1, j2, j3)
            score = float(np.abs(sub.data).mean())
        triples.append(Tricluster(j1=j1, j2=j2, j3=j3, score=score))
    return TriclusterSet(triclusters=triples, pairing_rule=PAIRING_RULE)


def modes_from_msc(results, tensor=None):
    """Wrap plain per-mode results as ModeClustering values.

    The single cluster of each converged mode becomes that mode's one
    cluster; empty or non-converged modes get no clusters. Lets the
    single-stage method share the serialization path and pairing rule.
    """
    modes = []
    for res in results:
        clusters = [tuple(res.cluster)] if res.converged and res.size >= 2 else []
        modes.append(
            ModeClustering(mode=res.mode, clusters=clusters, noise=(), msc=res)
        )
    return modes, pair_triclusters(modes, tensor=tensor)


def clusters_to_json(epsilon, method, modes, triset):
    """Serialize a run to the stable JSON layout.

    Key order is fixed so equal runs produce byte-identical documents:
    {"epsilon", "method", "modes": [{"mode", "msc_cluster", "clusters",
    "noise", "d", "bound", "converged"}], "triclusters": [{"j1", "j2",
    "j3", "score"}]}.
    """
    doc = {
        "epsilon": epsilon,
        "method": method,
        "modes": [
            {
                "mode": mc.mode,
                "msc_cluster": [int(i) for i in mc.msc.cluster],
                "clusters": [[int(i) for i in c] for c in mc.clusters],
                "noise": [int(i) for i in mc.noise],
                "d": [float(x) for x in mc.msc.d],
                "bound": float(mc.msc.bound),
                "converged": bool(mc.msc.converged),
            }
            for mc in modes
        ],
        "triclusters": [
            {
                "j1": [int(i) for i in tc.j1],
                "j2": [int(i) for i in tc.j2],
                "j3": [int(i) for i in tc.j3],
                "score": None if tc.score is None else float(tc.score),
            }
            for tc in triset.triclusters
        ],
    }
    return json.dumps(doc, indent=2)


def clusters_from_json(text):
    """Parse a document produced by clusters_to_json."""
    return json.loads(text)
