"""Command-line surface: synth, cluster, eval, and sweep subcommands.

Exit codes: 0 success, 1 I/O problem (missing or malformed file), 2 usage or
validation problem, 3 degenerate data (no usable signal or no detectable
cluster structure). All randomness flows from --seed (default 0); nothing is
seeded from the clock.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateInputError,
    FormatError,
    NoGapError,
    ValidationError,
)
from .metrics import ari, labels_from_clusters, rmse_subcube, weighted_mean_rmse
from .msc import MscResult
from .pipeline import (
    ModeClustering,
    Tricluster,
    TriclusterSet,
    clusters_from_json,
    clusters_to_json,
    modes_from_msc,
    run_msc,
    run_msc_dbscan,
)
from .spectral import EigConfig
from .synth import Component, SynthSpec, benchmark_spec, generate, truth_from_json, truth_to_json
from .tensor import load_tensor, save_tensor

RESULT_HEADER = "gamma,seed,method,mode,ari,rmse,wall_ms,status"
AGGREGATE_HEADER = "gamma,method,ari_mean,ari_std,rmse_mean"


def _parse_dims(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"--dims wants m1,m2,m3, got {text!r}")
    dims = tuple(int(p) for p in parts)
    if min(dims) < 1:
        raise ValueError(f"dims must be positive, got {dims}")
    return dims


def _parse_gammas(text, rank):
    vals = [float(p) for p in text.split(",")]
    if len(vals) == 1 and rank > 1:
        vals = vals * rank
    if len(vals) != rank:
        raise ValueError(
            f"--gamma gave {len(vals)} values for rank {rank}"
        )
    if min(vals) <= 0:
        raise ValueError("gamma values must be positive")
    return vals


def _parse_gamma_range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"--gamma wants start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError("gamma step must be positive")
    if stop < start:
        raise ValueError("gamma stop must be >= start")
    out = []
    v = start
    while v <= stop + 1e-9:
        out.append(round(v, 10))
        v += step
    return out


def _eig_config(args):
    return EigConfig(method=args.eig)


def cmd_synth(args):
    dims = _parse_dims(args.dims)
    gammas = _parse_gammas(args.gamma, args.rank)
    if args.rank * args.cluster_size > min(dims):
        raise ValueError(
            f"rank {args.rank} x cluster size {args.cluster_size} "
            f"exceeds min dim {min(dims)}"
        )
    comps = []
    for c in range(args.rank):
        block = tuple(range(c * args.cluster_size, (c + 1) * args.cluster_size))
        comps.append(Component(gamma=gammas[c], j1=block, j2=block, j3=block))
    spec = SynthSpec(dims=dims, components=comps, seed=args.seed,
                     noise_scale=args.noise)
    t, truth = generate(spec)
    save_tensor(t, args.out, fmt=args.format)
    if args.truth:
        with open(args.truth, "w") as fh:
            fh.write(truth_to_json(spec, truth))
    print(
        f"wrote {args.out} dims={dims[0]}x{dims[1]}x{dims[2]} "
        f"rank={args.rank} cluster_size={args.cluster_size} "
        f"noise={args.noise} seed={args.seed}"
    )
    return 0


def _iterated_msc(t, epsilon, config):
    """Repeated single-cluster extraction over shrinking complement sets.

    Runs the per-mode pass on the sub-tensor of still-unclaimed indices,
    records the recovered (original-index) sets, removes them, and repeats
    until any mode fails to produce a converged cluster.
    """
    active = [list(range(m)) for m in t.dims]
    rounds = []
    first_results = None
    while min(len(a) for a in active) >= 3:
        sub = t.subcube(active[0], active[1], active[2])
        try:
            results = run_msc(sub, epsilon, config)
        except NoGapError as e:
            if first_results is None:
                first_results = e
            break
        except DegenerateInputError:
            # a zero complement after successful rounds just ends the loop;
            # a zero tensor on the first round is a real degenerate input
            if first_results is None:
                raise
            break
        if first_results is None:
            first_results = results
        if not all(r.converged and r.size >= 2 for r in results):
            break
        triple = []
        for axis, r in enumerate(results):
            triple.append(tuple(active[axis][i] for i in r.cluster))
        rounds.append(tuple(triple))
        for axis in range(3):
            claimed = set(rounds[-1][axis])
            active[axis] = [i for i in active[axis] if i not in claimed]
    return rounds, first_results


def cmd_cluster(args):
    t = load_tensor(args.input, fmt=args.format)
    cfg = _eig_config(args)
    if args.method == "msc":
        results = run_msc(t, args.epsilon, cfg)
        modes, triset = modes_from_msc(results, tensor=t)
    elif args.method == "msc-dbscan":
        modes, triset = run_msc_dbscan(t, args.epsilon, cfg)
    else:
        modes, triset = _cluster_iterated(t, args.epsilon, cfg)
    text = clusters_to_json(args.epsilon, args.method, modes, triset)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        sizes = ["/".join(str(len(c)) for c in mc.clusters) or "-" for mc in modes]
        print(
            f"wrote {args.out} method={args.method} "
            f"clusters per mode: {' '.join(sizes)}"
        )
    else:
        print(text)
    return 0


def _cluster_iterated(t, epsilon, cfg):
    rounds, first = _iterated_msc(t, epsilon, cfg)
    if isinstance(first, NoGapError):
        raise first
    if first is None:
        raise ValueError(
            f"tensor dims {t.dims} too small for iterated extraction"
        )
    modes = []
    for axis in range(3):
        res = first[axis]
        clusters = [r[axis] for r in rounds]
        msc_cluster = rounds[0][axis] if rounds else tuple(res.cluster)
        base = MscResult(
            mode=res.mode, cluster=msc_cluster, d=res.d, epsilon=res.epsilon,
            size=len(msc_cluster), bound=res.bound, converged=res.converged,
            similarity=None, lambda_max=res.lambda_max,
            strength_ratio=res.strength_ratio,
        )
        modes.append(ModeClustering(mode=axis + 1, clusters=clusters,
                                    noise=(), msc=base))
    triples = [
        Tricluster(
            j1=r[0], j2=r[1], j3=r[2],
            score=float(np.abs(t.subcube(r[0], r[1], r[2]).data).mean()),
        )
        for r in rounds
    ]
    return modes, TriclusterSet(triclusters=triples,
                                pairing_rule="extraction-round")


def cmd_eval(args):
    with open(args.clusters, "r") as fh:
        pred = clusters_from_json(fh.read())
    lines = []
    if args.truth:
        with open(args.truth, "r") as fh:
            truth = truth_from_json(fh.read())
        dims = truth["dims"]
        mode_aris = []
        for entry in pred["modes"]:
            mode = entry["mode"]
            m = dims[mode - 1]
            if entry["d"] and len(entry["d"]) != m:
                raise ValidationError(
                    f"mode-{mode} size mismatch: prediction has "
                    f"{len(entry['d'])} slices, truth has {m}"
                )
            true_clusters = truth["modes"][mode - 1]["clusters"]
            a = labels_from_clusters(true_clusters, m)
            b = labels_from_clusters(entry["clusters"], m)
            mode_aris.append(ari(a, b))
            lines.append((f"ari_mode{mode}", mode_aris[-1]))
        lines.append(("ari_mean", float(np.mean(mode_aris))))
    if args.tensor:
        t = load_tensor(args.tensor, fmt=args.tensor_format)
        tris = [(tc["j1"], tc["j2"], tc["j3"]) for tc in pred["triclusters"]]
        for k, tri in enumerate(tris):
            lines.append((f"rmse_tri{k}", rmse_subcube(t, tri)))
        lines.append(("rmse_weighted_mean", weighted_mean_rmse(t, tris)))
    for name, value in lines:
        print(f"{name} {value!r}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("metric,value\n")
            for name, value in lines:
                fh.write(f"{name},{value!r}\n")
    return 0


def _mode_clusters_for_method(mc):
    return [list(c) for c in mc.clusters]


def _sweep_one(task):
    """One (gamma, seed) cell: generate, cluster, evaluate both methods.

    Returns (gamma, seed, rows) where rows are finished CSV fragments for
    methods msc and msc-dbscan across the three modes.
    """
    gamma, seed, epsilon, eig, dims, cluster_size, rank = task
    t0 = time.perf_counter()
    spec = benchmark_spec(gamma, seed, dims=dims, cluster_size=cluster_size,
                          rank=rank)
    t, truth = generate(spec)
    cfg = EigConfig(method=eig)
    rows = []
    try:
        modes, triset = run_msc_dbscan(t, epsilon, cfg)
    except (DegenerateInputError, ConvergenceError) as e:
        wall = (time.perf_counter() - t0) * 1000.0
        for method in ("msc", "msc-dbscan"):
            for mode in (1, 2, 3):
                rows.append((gamma, seed, method, mode, float("nan"),
                             float("nan"), wall, f"error:{type(e).__name__}"))
        return gamma, seed, rows

    # the single-stage method's output is the per-mode cluster the second
    # stage started from, so one pipeline run serves both methods
    msc_modes, msc_triset = modes_from_msc([mc.msc for mc in modes], tensor=t)
    wall = (time.perf_counter() - t0) * 1000.0

    for method, mmodes, mtriset in (
        ("msc", msc_modes, msc_triset),
        ("msc-dbscan", modes, triset),
    ):
        tris = [(tc.j1, tc.j2, tc.j3) for tc in mtriset.triclusters]
        rmse = weighted_mean_rmse(t, tris) if tris else float("nan")
        ok = all(mc.clusters for mc in mmodes)
        status = "ok" if ok else "empty"
        for mode in (1, 2, 3):
            truth_labels = truth.mode_labels(mode)
            pred_labels = labels_from_clusters(
                _mode_clusters_for_method(mmodes[mode - 1]), t.dims[mode - 1]
            )
            a = ari(truth_labels, pred_labels)
            rows.append((gamma, seed, method, mode, a, rmse, wall, status))
    return gamma, seed, rows


def _format_row(row):
    gamma, seed, method, mode, a, rmse, wall, status = row
    return (
        f"{float(gamma)!r},{seed},{method},{mode},{float(a)!r},"
        f"{float(rmse)!r},{wall:.3f},{status}"
    )


def cmd_sweep(args):
    gammas = _parse_gamma_range(args.gamma)
    seeds = [args.seed + r for r in range(args.runs)]
    dims = _parse_dims(args.dims)
    tasks = [
        (g, s, args.epsilon, args.eig, dims, args.cluster_size, args.rank)
        for g in gammas
        for s in seeds
    ]
    jobs = args.jobs
    results = {}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for gamma, seed, rows in pool.map(_sweep_one, tasks):
                results[(gamma, seed)] = rows
    else:
        for task in tasks:
            gamma, seed, rows = _sweep_one(task)
            results[(gamma, seed)] = rows

    ordered = []
    for g in gammas:
        for s in seeds:
            ordered.extend(results[(g, s)])
    # deterministic row order: gamma, then seed, then method, then mode
    ordered.sort(key=lambda r: (gammas.index(r[0]), seeds.index(r[1]),
                                r[2], r[3]))
    with open(args.out, "w") as fh:
        fh.write(RESULT_HEADER + "\n")
        for row in ordered:
            fh.write(_format_row(row) + "\n")

    agg_path = args.aggregate or _default_aggregate_path(args.out)
    with open(agg_path, "w") as fh:
        fh.write(AGGREGATE_HEADER + "\n")
        for g in gammas:
            for method in ("msc", "msc-dbscan"):
                rows = [r for r in ordered if r[0] == g and r[2] == method]
                aris = np.array([r[4] for r in rows], dtype=float)
                rmses = np.array(
                    [r[5] for r in rows if r[3] == 1], dtype=float
                )
                finite = rmses[np.isfinite(rmses)]
                ari_mean = float(np.mean(aris)) if aris.size else float("nan")
                ari_std = float(np.std(aris)) if aris.size else float("nan")
                rmse_mean = float(np.mean(finite)) if finite.size else float("nan")
                fh.write(
                    f"{float(g)!r},{method},{ari_mean!r},{ari_std!r},"
                    f"{rmse_mean!r}\n"
                )
    print(
        f"wrote {args.out} ({len(ordered)} rows) and {agg_path} "
        f"({len(gammas) * 2} rows)"
    )
    return 0


def _default_aggregate_path(out):
    root, ext = os.path.splitext(out)
    return f"{root}_agg{ext or '.csv'}"


def build_parser():
    parser = argparse.ArgumentParser(
        prog="msc3",
        description=(
            "Multi-slice spectral clustering of 3rd-order tensors with "
            "density-based cluster splitting."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a planted-cluster tensor")
    p.add_argument("--dims", required=True, help="m1,m2,m3")
    p.add_argument("--rank", type=int, default=1, help="number of planted components")
    p.add_argument("--gamma", required=True,
                   help="signal strength, one value or comma list per component")
    p.add_argument("--cluster-size", type=int, default=10)
    p.add_argument("--noise", type=float, default=1.0, help="noise scale (0 = none)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("t3b", "csv"), default="t3b")
    p.add_argument("-o", "--out", required=True, help="tensor output path")
    p.add_argument("--truth", help="ground-truth JSON output path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("cluster", help="cluster a tensor file")
    p.add_argument("input", help="tensor path")
    p.add_argument("--method", choices=("msc", "msc-dbscan", "msc-iterated"),
                   default="msc-dbscan")
    p.add_argument("--epsilon", type=float, default=0.001)
    p.add_argument("--eig", choices=("power", "exact"), default="power")
    p.add_argument("--format", choices=("t3b", "csv"), default="t3b")
    p.add_argument("-o", "--out", help="clusters JSON path (default: stdout)")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("eval", help="score a clusters JSON against truth or tensor")
    p.add_argument("clusters", help="clusters JSON path")
    p.add_argument("--truth", help="truth JSON path (enables ARI)")
    p.add_argument("--tensor", help="tensor path (enables RMSE)")
    p.add_argument("--tensor-format", choices=("t3b", "csv"), default="t3b")
    p.add_argument("-o", "--out", help="metrics CSV path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="signal-strength sweep emitting CSV")
    p.add_argument("--gamma", required=True, help="start:stop:step")
    p.add_argument("--runs", type=int, default=10, help="seeds per gamma")
    p.add_argument("--epsilon", type=float, default=0.001)
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--eig", choices=("power", "exact"), default="power")
    p.add_argument("--dims", default="50,50,50")
    p.add_argument("--cluster-size", type=int, default=10)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--jobs", type=int,
                   default=int(os.environ.get("MSC3_JOBS", "1")),
                   help="parallel workers over (gamma, seed) cells")
    p.add_argument("-o", "--out", required=True, help="results CSV path")
    p.add_argument("--aggregate", help="aggregate CSV path (default: <out>_agg)")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (FormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValidationError, ValueError, IndexError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (DegenerateInputError, NoGapError, ConvergenceError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
