"""Command-line surface of the harness.

Subcommands: ``make-reals`` (synthetic source pool), ``synth`` (corpus
build), ``view`` (label-stripped manifest), ``score`` (AUC report),
``fuse`` (ensemble submission CSVs), ``run-detector`` (drive an external
detector over the line-delimited streaming protocol), ``serve`` (HTTP
scoring service), and ``leaderboard``.
"""

from __future__ import annotations

import argparse
import json
import shlex
import subprocess
import sys
from pathlib import Path

from . import fusion
from .corpus import (
    build_corpus,
    challenge_specs,
    make_synthetic_reals,
    participant_view,
    read_manifest,
    read_view,
    write_view,
)
from .degrade import default_profiles, load_profiles
from .metrics import LabeledScores, auc, bootstrap_ci, per_group_auc
from .service import BenchService, SubmissionStore, create_app, load_config, rank_entries, team_scores_from_records
from .submission import read_submission_csv, write_submission_csv


def _cmd_make_reals(args: argparse.Namespace) -> int:
    paths = make_synthetic_reals(args.out, count=args.count, seed=args.seed, size=args.size)
    print(f"wrote {len(paths)} synthetic source images to {args.out}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    profiles = load_profiles(args.profiles) if args.profiles else default_profiles()
    reals = sorted(Path(args.reals).glob("*.png")) + sorted(Path(args.reals).glob("*.jpg"))
    specs = challenge_specs(args.scale)
    result = build_corpus(reals, specs, profiles, seed=args.seed, out_dir=args.out)
    counts: dict[str, int] = {}
    for record in result.records:
        counts[record.split] = counts.get(record.split, 0) + 1
    print(f"built corpus at {result.out_dir}")
    for split in sorted(counts):
        print(f"  {split}: {counts[split]} items")
    print(f"  manifest: {result.manifest_path}")
    for split, path in sorted(result.view_paths.items()):
        print(f"  view[{split}]: {path} (shuffle seed {result.view_seeds[split]})")
    return 0


def _cmd_view(args: argparse.Namespace) -> int:
    records = read_manifest(args.manifest)
    rows = participant_view(records, args.seed)
    write_view(rows, args.out)
    print(f"wrote {len(rows)} label-stripped rows to {args.out} (shuffle seed {args.seed})")
    return 0


def _first_kind(recipe_json: str) -> str:
    steps = json.loads(recipe_json)["steps"]
    return steps[0]["kind"] if steps else "clean"


def _cmd_score(args: argparse.Namespace) -> int:
    records = {r.id: r for r in read_manifest(args.manifest)}
    rows = read_submission_csv(args.submission)
    row_ids = {i for i, _ in rows}
    missing = sorted(set(records) - row_ids)
    extra = sorted(row_ids - set(records))
    if missing or extra:
        print(f"error: submission does not match manifest (missing {len(missing)}, extra {len(extra)})", file=sys.stderr)
        return 2
    if args.group_key == "fake_method":
        groups = tuple(records[i].fake_method for i, _ in rows)
    else:
        groups = tuple(_first_kind(records[i].recipe.to_json()) for i, _ in rows)
    data = LabeledScores(
        ids=tuple(i for i, _ in rows),
        scores=[s for _, s in rows],
        labels=[records[i].label for i, _ in rows],
        groups=groups,
    )
    print(f"n: {len(data)}")
    print(f"auc: {auc(data):.6f}")
    if args.by_group:
        for group, value in per_group_auc(data).items():
            print(f"auc[{group}]: {value:.6f}")
    if args.ci:
        low, high = bootstrap_ci(data, n_resamples=args.ci, level=args.level, seed=args.seed)
        print(f"ci{int(args.level * 100)}: {low:.6f} {high:.6f}")
    return 0


def _read_aligned_inputs(paths: list[str]) -> tuple[list[str], list[list[float]]]:
    """Load submission CSVs and align rows on the first file's id order."""
    first = read_submission_csv(paths[0])
    ids = [i for i, _ in first]
    columns = [[s for _, s in first]]
    for path in paths[1:]:
        by_id = dict(read_submission_csv(path))
        if set(by_id) != set(ids):
            raise SystemExit(f"error: {path} covers different ids than {paths[0]}")
        columns.append([by_id[i] for i in ids])
    return ids, columns


def _parse_weights(text: str | None, n: int) -> list[float]:
    if not text:
        return [1.0] * n
    values = [float(v) for v in text.split(",")]
    if len(values) != n:
        raise SystemExit(f"error: got {len(values)} weights for {n} inputs")
    return values


def _cmd_fuse(args: argparse.Namespace) -> int:
    ids, columns = _read_aligned_inputs(args.inputs)
    n_inputs = len(columns)
    method = args.method
    fused: list[float]
    if method == "robust-tta":
        if n_inputs % args.views != 0:
            raise SystemExit(f"error: {n_inputs} inputs do not split into {args.views} views")
        per_view = n_inputs // args.views
        weights = _parse_weights(args.weights, per_view)
        fused = []
        for row in zip(*columns):
            views = [list(row[v * per_view : (v + 1) * per_view]) for v in range(args.views)]
            fused.append(fusion.tta_fuse(views, weights))
    elif method == "rank":
        weights = _parse_weights(args.weights, n_inputs)
        fused = list(fusion.rank_fuse(columns, weights))
    elif method == "topk":
        fused = [fusion.topk_pool(list(row), fraction=args.fraction, mode=args.mode) for row in zip(*columns)]
    else:
        weights = _parse_weights(args.weights, n_inputs)
        per_item = {
            "logit-mean": lambda row: fusion.mean_logit_fuse(row, weights),
            "weighted": lambda row: fusion.weighted_prob_fuse(row, weights),
            "discretized": lambda row: fusion.discretized_vote([fusion.quantize_prob(p) for p in row], weights),
        }[method]
        fused = [per_item(list(row)) for row in zip(*columns)]
    write_submission_csv(list(zip(ids, fused)), args.out)
    print(f"fused {n_inputs} inputs with method {method} into {args.out}")
    return 0


def _manifest_paths(path: str) -> list[tuple[str, str]]:
    header = Path(path).open(encoding="utf-8").readline().strip().split(",")
    if "label" in header:
        return [(r.id, r.path) for r in read_manifest(path)]
    return [(r["id"], r["path"]) for r in read_view(path)]


def _cmd_run_detector(args: argparse.Namespace) -> int:
    items = _manifest_paths(args.manifest)
    root = Path(args.images_root) if args.images_root else Path(args.manifest).parent
    command = shlex.split(args.cmd)
    rows: list[tuple[str, float]] = []
    failures = 0
    proc = subprocess.Popen(command, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True)
    try:
        for item_id, rel_path in items:
            request = json.dumps({"id": item_id, "image_path": str(root / rel_path)})
            proc.stdin.write(request + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
            if not line:
                raise SystemExit(f"error: detector exited early after {len(rows)} items")
            response = json.loads(line)
            if response.get("id") != item_id or "score" not in response:
                failures += 1
                print(f"warning: no score for {item_id}: {line.strip()}", file=sys.stderr)
                rows.append((item_id, 0.5))
            else:
                rows.append((item_id, float(response["score"])))
    finally:
        if proc.stdin:
            proc.stdin.close()
        proc.wait(timeout=30)
    write_submission_csv(rows, args.out)
    print(f"scored {len(rows)} items ({failures} fell back to 0.5) into {args.out}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    config = load_config(args.config)
    service = BenchService(config, SubmissionStore(args.data))
    uvicorn.run(create_app(service), host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_leaderboard(args: argparse.Namespace) -> int:
    store = SubmissionStore(args.data)
    entries = rank_entries(team_scores_from_records(store.records()))
    if not entries:
        print("no scored submissions")
        return 0
    print(f"{'rank':>4}  {'team':<24} {'public':>8} {'private':>8}")
    for e in entries:
        pub = f"{e.public_auc:.4f}" if e.public_auc is not None else "-"
        priv = f"{e.private_auc:.4f}" if e.private_auc is not None else "-"
        print(f"{e.rank:>4}  {e.team:<24} {pub:>8} {priv:>8}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dfbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-reals", help="generate a deterministic synthetic source-image pool")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--size", type=int, default=256)
    p.set_defaults(func=_cmd_make_reals)

    p = sub.add_parser("synth", help="build a challenge corpus from real source images")
    p.add_argument("--reals", required=True, help="directory of source PNG/JPEG images")
    p.add_argument("--out", required=True)
    p.add_argument("--profiles", default=None, help="YAML profile file (default: built-in profiles)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--scale", type=float, default=1.0, help="scale the 1000/100/1000/1000 split sizes")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("view", help="write the label-stripped participant view of a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_view)

    p = sub.add_parser("score", help="score a submission CSV against a labeled manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--submission", required=True)
    p.add_argument("--by-group", action="store_true")
    p.add_argument("--group-key", choices=["fake_method", "degradation"], default="fake_method")
    p.add_argument("--ci", type=int, default=0, help="bootstrap resamples (0 disables the interval)")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("fuse", help="fuse per-model submission CSVs into one")
    p.add_argument("--method", required=True, choices=["logit-mean", "weighted", "discretized", "rank", "robust-tta", "topk"])
    p.add_argument("--weights", default=None, help="comma-separated ratios, e.g. 1,2,2")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--views", type=int, default=2, help="robust-tta: number of consecutive input groups")
    p.add_argument("--fraction", type=float, default=0.1, help="topk: fraction of inputs pooled")
    p.add_argument("--mode", choices=["mean", "softmax"], default="mean", help="topk pooling mode")
    p.set_defaults(func=_cmd_fuse)

    p = sub.add_parser("run-detector", help="score a manifest by driving a detector subprocess")
    p.add_argument("--manifest", required=True, help="manifest or participant-view CSV")
    p.add_argument("--images-root", default=None, help="base directory for manifest paths (default: manifest's directory)")
    p.add_argument("--cmd", required=True, help="detector command speaking the line-delimited JSON protocol")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_run_detector)

    p = sub.add_parser("serve", help="run the scoring service over HTTP")
    p.add_argument("--data", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("leaderboard", help="print the leaderboard from a data directory")
    p.add_argument("--data", required=True)
    p.set_defaults(func=_cmd_leaderboard)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
