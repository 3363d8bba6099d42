import json
import math

import numpy as np
import pytest

from msc3 import (
    Component,
    DegenerateInputError,
    ModeClustering,
    MscResult,
    SynthSpec,
    Tensor3,
    benchmark_spec,
    clusters_from_json,
    clusters_to_json,
    generate,
    modes_from_msc,
    pair_triclusters,
    run_msc,
    run_msc_dbscan,
)


def _block_spec(gammas, dims=(12, 12, 12), size=3, noise=0.0, seed=0):
    comps = []
    for c, g in enumerate(gammas):
        j = tuple(range(c * size, (c + 1) * size))
        comps.append(Component(gamma=g, j1=j, j2=j, j3=j))
    return SynthSpec(dims=dims, components=comps, seed=seed, noise_scale=noise)


def _dummy_result(mode, m=6):
    return MscResult(mode=mode, cluster=(0, 1), d=np.zeros(m), epsilon=0.1,
                     size=2, bound=1.0, converged=True)


def _mc(mode, clusters, noise=()):
    return ModeClustering(mode=mode, clusters=list(clusters), noise=tuple(noise),
                          msc=_dummy_result(mode))


def test_run_msc_noiseless_rank1():
    t, truth = generate(_block_spec([30.0]))
    results = run_msc(t, epsilon=0.001)
    assert [r.mode for r in results] == [1, 2, 3]
    for r in results:
        assert r.converged
        assert r.cluster == (0, 1, 2)
        assert r.size == 3


def test_run_msc_equal_strength_components_merge():
    t, _ = generate(_block_spec([25.0, 25.0]))
    for r in run_msc(t, epsilon=0.001):
        assert r.cluster == (0, 1, 2, 3, 4, 5)


def test_run_msc_zero_tensor_degenerate():
    t = Tensor3(np.zeros((5, 5, 5)))
    with pytest.raises(DegenerateInputError):
        run_msc(t, epsilon=0.1)
    with pytest.raises(DegenerateInputError):
        run_msc_dbscan(t, epsilon=0.1)


def test_rank1_split_matches_single_cluster():
    t, _ = generate(_block_spec([30.0]))
    modes, triset = run_msc_dbscan(t, epsilon=0.001)
    for mc in modes:
        assert mc.clusters == [(0, 1, 2)]
        assert mc.noise == ()
        assert mc.clusters == [mc.msc.cluster]
    assert len(triset.triclusters) == 1
    tc = triset.triclusters[0]
    assert (tc.j1, tc.j2, tc.j3) == ((0, 1, 2),) * 3
    assert tc.score == pytest.approx(30.0 / (3.0 * math.sqrt(3.0)))


def test_equal_strength_components_split_apart():
    t, truth = generate(_block_spec([25.0, 25.0]))
    modes, triset = run_msc_dbscan(t, epsilon=0.001)
    for mc in modes:
        assert mc.clusters == [(0, 1, 2), (3, 4, 5)]
        assert mc.noise == ()
    assert len(triset.triclusters) == 2
    for tc, comp in zip(triset.triclusters, truth.components):
        assert (tc.j1, tc.j2, tc.j3) == comp


def test_distinct_strengths_keep_only_dominant():
    t, _ = generate(_block_spec([40.0, 20.0]))
    modes, triset = run_msc_dbscan(t, epsilon=0.001)
    for mc in modes:
        assert mc.msc.cluster == (0, 1, 2)
        assert mc.clusters == [(0, 1, 2)]
    assert len(triset.triclusters) == 1
    assert triset.triclusters[0].score == pytest.approx(40.0 / (3.0 * math.sqrt(3.0)))


def test_modes_are_independent_under_slice_permutation():
    t, _ = generate(benchmark_spec(80.0, seed=1))
    perm = np.random.default_rng(5).permutation(50)
    t_perm = Tensor3(t.data[:, perm, :])
    modes_a, _ = run_msc_dbscan(t, epsilon=0.001)
    modes_b, _ = run_msc_dbscan(t_perm, epsilon=0.001)

    as_sets = lambda mc: {frozenset(c) for c in mc.clusters}
    assert as_sets(modes_b[0]) == as_sets(modes_a[0])
    assert as_sets(modes_b[2]) == as_sets(modes_a[2])
    # a mode-2 index j in the permuted tensor holds the old slice perm[j]
    mapped = {frozenset(int(np.flatnonzero(perm == i)[0]) for i in c)
              for c in modes_a[1].clusters}
    assert as_sets(modes_b[1]) == mapped


def test_pair_one_cluster_per_mode():
    modes = [_mc(1, [(0, 1)]), _mc(2, [(2, 3)]), _mc(3, [(4, 5)])]
    triset = pair_triclusters(modes)
    assert len(triset.triclusters) == 1
    tc = triset.triclusters[0]
    assert (tc.j1, tc.j2, tc.j3) == ((0, 1), (2, 3), (4, 5))
    assert tc.score is None
    assert triset.pairing_rule == "rank-by-mean-marginal"


def test_pair_truncates_to_smallest_count():
    modes = [
        _mc(1, [(0, 1), (2, 3)]),
        _mc(2, [(0, 1), (4, 5)]),
        _mc(3, [(1, 2)]),
    ]
    triset = pair_triclusters(modes)
    assert len(triset.triclusters) == 1
    assert triset.triclusters[0].j3 == (1, 2)


def test_pair_empty_mode_gives_no_triples():
    modes = [_mc(1, [(0, 1)]), _mc(2, []), _mc(3, [(4, 5)])]
    assert pair_triclusters(modes).triclusters == []


def test_pair_requires_three_modes():
    with pytest.raises(ValueError):
        pair_triclusters([_mc(1, []), _mc(2, [])])


def test_pair_scores_with_tensor():
    data = np.arange(24, dtype=float).reshape(2, 3, 4)
    t = Tensor3(data)
    modes = [_mc(1, [(0,)]), _mc(2, [(1, 2)]), _mc(3, [(0, 3)])]
    triset = pair_triclusters(modes, tensor=t)
    expected = np.abs(data[np.ix_([0], [1, 2], [0, 3])]).mean()
    assert triset.triclusters[0].score == pytest.approx(float(expected))


def test_modes_from_msc_wraps_converged_only():
    t, _ = generate(_block_spec([30.0]))
    results = run_msc(t, epsilon=0.001)
    modes, triset = modes_from_msc(results, tensor=t)
    for mc, res in zip(modes, results):
        assert mc.clusters == [res.cluster]
        assert mc.noise == ()
        assert mc.msc is res
    assert len(triset.triclusters) == 1

    stub = MscResult(mode=1, cluster=(), d=np.zeros(4), epsilon=0.1, size=0,
                     bound=1.0, converged=False)
    modes, triset = modes_from_msc([stub, results[1], results[2]])
    assert modes[0].clusters == []
    assert triset.triclusters == []


def test_gapless_mode_degrades_without_aborting():
    g = np.array([2.0, 2.0, 1.0, 1.0, 1.0])
    h = np.array([3.0, 3.0, 1.0, 1.0, 1.0, 1.0])
    data = np.ones((4, 5, 6)) * g[None, :, None] * h[None, None, :]
    modes, triset = run_msc_dbscan(Tensor3(data), epsilon=0.01)
    assert modes[0].clusters == []
    assert not modes[0].msc.converged
    assert len(modes[0].msc.d) == 4
    assert modes[1].clusters == [(0, 1)]
    assert modes[2].clusters == [(0, 1)]
    assert triset.triclusters == []


def test_json_round_trip_and_key_order():
    t, _ = generate(_block_spec([25.0, 25.0]))
    modes, triset = run_msc_dbscan(t, epsilon=0.001)
    text = clusters_to_json(0.001, "msc-dbscan", modes, triset)
    doc = clusters_from_json(text)
    assert list(doc.keys()) == ["epsilon", "method", "modes", "triclusters"]
    assert list(doc["modes"][0].keys()) == [
        "mode", "msc_cluster", "clusters", "noise", "d", "bound", "converged",
    ]
    assert list(doc["triclusters"][0].keys()) == ["j1", "j2", "j3", "score"]
    assert doc["epsilon"] == 0.001
    assert doc["method"] == "msc-dbscan"
    assert doc["modes"][0]["msc_cluster"] == [0, 1, 2, 3, 4, 5]
    assert doc["modes"][0]["clusters"] == [[0, 1, 2], [3, 4, 5]]
    assert doc["triclusters"][0]["j1"] == [0, 1, 2]
    assert len(doc["modes"][0]["d"]) == 12


def test_repeated_runs_serialize_identically():
    spec = _block_spec([25.0, 25.0], noise=0.05, seed=3)
    docs = []
    for _ in range(2):
        t, _ = generate(spec)
        modes, triset = run_msc_dbscan(t, epsilon=0.001)
        docs.append(clusters_to_json(0.001, "msc-dbscan", modes, triset))
    assert docs[0] == docs[1]
