"""dfadapter command line: fit the baseline, batch-score manifests, or serve
the streaming protocol."""

from __future__ import annotations

import argparse
import csv
import sys

from .model import BaselineModel, fit_baseline, run
from .protocol import serve_stream


def _write_submission(rows: list[tuple[str, float]], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "score"])
        for item_id, score in rows:
            writer.writerow([item_id, repr(float(score))])


def _cmd_fit(args: argparse.Namespace) -> int:
    model = fit_baseline(args.manifest, images_root=args.root)
    model.save(args.out)
    print(f"fitted baseline on {args.manifest} (train auc {model.train_auc:.4f}) -> {args.out}")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    model = BaselineModel.load(args.model)
    tta = "flip" if args.tta else args.tta_mode
    rows = run(args.manifest, model, tta=tta, images_root=args.root)
    _write_submission(rows, args.out)
    print(f"scored {len(rows)} items (tta={tta}) -> {args.out}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    model = BaselineModel.load(args.model)
    tta = "flip" if args.tta else args.tta_mode
    serve_stream(model, sys.stdin, sys.stdout, tta=tta)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dfadapter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit the baseline on a labeled manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--root", default=None, help="base directory for manifest paths")
    p.add_argument("--out", required=True, help="output model JSON")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("run", help="score a manifest into a submission CSV")
    p.add_argument("--manifest", required=True, help="manifest or participant-view CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--root", default=None)
    p.add_argument("--tta", action="store_true", help="average original and horizontal flip")
    p.add_argument("--tta-mode", choices=["off", "flip", "flip3"], default="off")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("serve", help="speak the line-delimited scoring protocol on stdin/stdout")
    p.add_argument("--model", required=True)
    p.add_argument("--tta", action="store_true")
    p.add_argument("--tta-mode", choices=["off", "flip", "flip3"], default="off")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
