"""Command-line entry point: ``forcembed <subcommand> ...``.

Subcommands: embed, grid-verify, energy-sweep, evaluate, project.
Effective settings are resolved as built-in defaults < ``--config`` JSON <
explicit flags and written to ``<output>.manifest.json``.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import warnings


from . import __version__, kernels
from .evaluate import PROTOCOL_RATIOS, run_protocol
from .forces import ForceParams
from .graph import GraphFormatError, grid_graph, parse_edge_list, parse_labels, write_node_map
from .io import align_embedding, atomic_write, read_embedding, write_embedding, write_trace
from .layout import adjacency_distance_ratio, hop_spearman
from .projection import pca_project
from .trainer import TrainConfig, default_workers, energy_stable, train

logger = logging.getLogger("forcembed")

# flag dest -> default; None means "resolve later"
TRAIN_DEFAULTS = {
    "dim": 100,
    "p": 1.0,
    "q": 5.0,
    "bias": 0.01,
    "repulsive_weight": 1.0,
    "seed": 0,
    "max_iters": 500,
    "tol": 1e-4,
    "patience": 10,
    "h0": 0.2,
    "tau": 3000.0,
    "delta_max": 1.0,
    "schedule": "decay",
    "threads": None,
    "backend": None,
    "weighted": True,
}


def _add_train_flags(parser, dim_default=None):
    g = parser.add_argument_group("training")
    g.add_argument("--dim", type=int, help=f"embedding dimension (default {dim_default or TRAIN_DEFAULTS['dim']})")
    g.add_argument("--p", type=float, help="attraction rate (default 1.0)")
    g.add_argument("--q", type=float, help="repulsion rate (default 5.0)")
    g.add_argument("--bias", type=float, help="distance bias b (default 0.01)")
    g.add_argument("--repulsive-weight", type=float, help="uniform repulsive pair weight (default 1.0)")
    g.add_argument("--seed", type=int, help="initialization seed (default 0)")
    g.add_argument("--max-iters", type=int, help="iteration cap (default 500)")
    g.add_argument("--tol", type=float, help="relative energy-change tolerance (default 1e-4)")
    g.add_argument("--patience", type=int, help="consecutive stable iterations required (default 10)")
    g.add_argument("--h0", type=float, help="initial learning speed (default 0.2)")
    g.add_argument("--tau", type=float, help="speed decay constant (default 3000)")
    g.add_argument("--delta-max", type=float, help="per-node displacement cap (default 1.0)")
    g.add_argument("--schedule", choices=["decay", "constant"], help="learning-speed schedule")
    g.add_argument("--threads", type=int, help="worker threads (default: CPU count)")
    g.add_argument("--backend", choices=["cython", "python"], help="force kernel backend")
    w = g.add_mutually_exclusive_group()
    w.add_argument("--weighted", dest="weighted", action="store_true", default=None,
                   help="use edge weights from the file (default)")
    w.add_argument("--binarize", dest="weighted", action="store_false",
                   help="treat every edge as weight 1")
    parser.set_defaults(_dim_default=dim_default)


def _resolve(args) -> dict:
    config = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            config = json.load(fh)
        unknown = set(config) - set(TRAIN_DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    eff = dict(TRAIN_DEFAULTS)
    if getattr(args, "_dim_default", None):
        eff["dim"] = args._dim_default
    eff.update(config)
    for key in TRAIN_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            eff[key] = value
    if eff["threads"] is None:
        eff["threads"] = default_workers()
    if eff["backend"] is None:
        eff["backend"] = kernels.BACKEND
    return eff


def _train_config(eff: dict, **overrides) -> TrainConfig:
    params = ForceParams(p=eff["p"], q=eff["q"], b=eff["bias"],
                         repulsive_weight=eff["repulsive_weight"])
    kw = dict(dim=eff["dim"], max_iters=eff["max_iters"], energy_rel_tol=eff["tol"],
              patience=eff["patience"], h0=eff["h0"], tau=eff["tau"],
              delta_max=eff["delta_max"], schedule=eff["schedule"], seed=eff["seed"],
              workers=eff["threads"], backend=eff["backend"], params=params)
    kw.update(overrides)
    return TrainConfig(**kw)


def _write_manifest(output: str, command: str, eff: dict, extra: dict | None = None):
    manifest = {"command": command, "version": __version__, "settings": eff}
    if extra:
        manifest.update(extra)
    with atomic_write(output + ".manifest.json") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_graph(path: str, weighted: bool):
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, weighted=weighted)


def cmd_embed(args) -> int:
    eff = _resolve(args)
    g = _load_graph(args.edges, eff["weighted"])
    cfg = _train_config(eff)
    U, state = train(g, cfg)
    with atomic_write(args.output) as fh:
        write_embedding(fh, g.ids, U)
    with atomic_write(args.trace or args.output + ".energy.csv") as fh:
        write_trace(fh, state.energies, cfg.dim)
    if args.node_map:
        with atomic_write(args.node_map) as fh:
            write_node_map(g, fh)
    _write_manifest(args.output, "embed", eff, {"iterations": state.iteration})
    return 0


def cmd_grid_verify(args) -> int:
    if args.rows < 2 or args.cols < 2:
        raise ValueError("grid-verify needs rows >= 2 and cols >= 2")
    if args.snapshot_every < 1:
        raise ValueError("--snapshot-every must be >= 1")
    eff = _resolve(args)
    g = grid_graph(args.rows, args.cols)
    cfg = _train_config(eff)
    frames = []

    def record(state):
        if state.iteration % args.snapshot_every == 0:
            U = state.U
            if U.shape[1] > 2:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    U = pca_project(U)
            frames.append((state.iteration, U.copy()))

    U, state = train(g, cfg, callback=record)
    metrics = {
        "rows": args.rows,
        "cols": args.cols,
        "dim": cfg.dim,
        "iterations": state.iteration,
        "converged": energy_stable(state.energies, cfg.energy_rel_tol, cfg.patience),
        "final_energy": state.energies[-1],
        "adjacent_ratio": adjacency_distance_ratio(g, U),
        "spearman": hop_spearman(g, U),
        "snapshots": len(frames),
    }
    with atomic_write(args.output) as fh:
        json.dump(metrics, fh, indent=2)
        fh.write("\n")
    with atomic_write(args.snapshots or args.output + ".frames.csv") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iter", "node", "x", "y"])
        for it, xy in frames:
            for k, (x, y) in enumerate(xy.tolist()):
                writer.writerow([it, g.ids[k], f"{x:.9g}", f"{y:.9g}"])
    _write_manifest(args.output, "grid-verify", eff)
    print(f"adjacent_ratio={metrics['adjacent_ratio']:.4f} spearman={metrics['spearman']:.4f} "
          f"iterations={state.iteration}")
    return 0


def _parse_dims(text: str) -> list[int]:
    try:
        dims = [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid dimension list {text!r}") from None
    if len(dims) < 2:
        raise argparse.ArgumentTypeError("need at least 2 dimensions")
    return dims


def cmd_energy_sweep(args) -> int:
    eff = _resolve(args)
    g = _load_graph(args.edges, eff["weighted"])
    summary, traces = [], []
    for dim in args.dims:
        cfg = _train_config(eff, dim=dim)
        _, state = train(g, cfg)
        E = state.energies
        summary.append([dim, state.iteration, repr(E[-1]), repr(E[-1] / dim)])
        traces.extend([dim, t, repr(e), repr(e / dim)] for t, e in enumerate(E, start=1))
    with atomic_write(args.output) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["dim", "iterations", "final_energy", "energy_per_dim"])
        writer.writerows(summary)
    with atomic_write(args.traces or args.output + ".traces.csv") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["dim", "iter", "energy", "energy_per_dim"])
        writer.writerows(traces)
    _write_manifest(args.output, "energy-sweep", eff, {"dims": args.dims})
    return 0


def cmd_evaluate(args) -> int:
    eff = _resolve(args)
    g = _load_graph(args.edges, eff["weighted"])
    with open(args.labels, encoding="utf-8") as fh:
        labels = parse_labels(fh, g)
    if len(labels) == 0:
        raise ValueError(f"no labels in {args.labels}")
    if args.load_embedding:
        with open(args.load_embedding, encoding="utf-8") as fh:
            ids, U = read_embedding(fh)
        U = align_embedding(ids, U, g.ids)
    else:
        U, _ = train(g, _train_config(eff))
        if args.save_embedding:
            with atomic_write(args.save_embedding) as fh:
                write_embedding(fh, g.ids, U)
            # score exactly what was written
            with open(args.save_embedding, encoding="utf-8") as fh:
                U = read_embedding(fh)[1]
    report = run_protocol(labels, U, ratios=args.ratios, repeat_count=args.repeats,
                          seed=args.eval_seed)
    with atomic_write(args.output) as fh:
        report.write_csv(fh, dataset=args.dataset)
    _write_manifest(args.output, "evaluate", eff,
                    {"load_embedding": args.load_embedding, "ratios": list(args.ratios),
                     "repeats": args.repeats, "eval_seed": args.eval_seed})
    for ratio, (mi, ma) in report.means().items():
        print(f"ratio={ratio:.1f} micro_f1={mi:.4f} macro_f1={ma:.4f}")
    return 0


def cmd_project(args) -> int:
    with open(args.embedding, encoding="utf-8") as fh:
        ids, U = read_embedding(fh)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        xy = pca_project(U)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    with atomic_write(args.output) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node", "x", "y"])
        for name, (x, y) in zip(ids, xy.tolist()):
            writer.writerow([name, f"{x:.9g}", f"{y:.9g}"])
    return 0


def _ratio_list(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(",", " ").split())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="forcembed", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of default settings")

    p = sub.add_parser("embed", parents=[common], help="train an embedding")
    p.add_argument("edges")
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--trace", help="energy trace CSV (default <output>.energy.csv)")
    p.add_argument("--node-map", help="write the dense_index original_id sidecar")
    _add_train_flags(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("grid-verify", parents=[common], help="train on a grid and score the layout")
    p.add_argument("rows", type=int)
    p.add_argument("cols", type=int)
    p.add_argument("--output", "-o", required=True, help="metrics JSON")
    p.add_argument("--snapshots", help="frames CSV (default <output>.frames.csv)")
    p.add_argument("--snapshot-every", type=int, default=10)
    _add_train_flags(p, dim_default=2)
    p.set_defaults(func=cmd_grid_verify)

    p = sub.add_parser("energy-sweep", parents=[common], help="final energy per dimension")
    p.add_argument("edges")
    p.add_argument("--dims", type=_parse_dims, default=[10, 50, 100],
                   help="comma-separated dimensions, at least two (default 10,50,100)")
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--traces", help="per-iteration CSV (default <output>.traces.csv)")
    _add_train_flags(p)
    p.set_defaults(func=cmd_energy_sweep)

    p = sub.add_parser("evaluate", parents=[common], help="label-prediction protocol")
    p.add_argument("edges")
    p.add_argument("labels")
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--load-embedding", help="score this embedding file instead of training")
    p.add_argument("--save-embedding", help="also write the trained embedding")
    p.add_argument("--dataset", default="", help="dataset name for the CSV")
    p.add_argument("--ratios", type=_ratio_list, default=PROTOCOL_RATIOS)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--eval-seed", type=int, default=0)
    _add_train_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("project", help="2-D PCA coordinates of an embedding")
    p.add_argument("embedding")
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_project)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, GraphFormatError, FloatingPointError) as exc:
        print(f"forcembed {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
