"""Command-line front door: train, recommend, rules, evaluate, serve."""

from __future__ import annotations

import argparse
import csv as csv_mod
import json
import os
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from .bundle import load_bundle, save_bundle
from .corpus import CorpusError, Table, clean_records, infer_column_types, parse_corpus
from .discretize import MdlpConfig
from .embed import TrainConfig
from .pipeline import recommend_table, rules_payload, train_from_records

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _build_parser() -> _Parser:
    parser = _Parser(prog="vizrec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model from a JSONL corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="JSON file with train/mdlp settings")
    p.add_argument("--telemetry", help="write per-step loss CSV here")

    p = sub.add_parser("recommend", help="recommend charts for one table")
    p.add_argument("--model", required=True)
    p.add_argument("--table", required=True, help="CSV or table JSON file")
    p.add_argument("-k", type=int, default=2)
    p.add_argument("--out", help="output JSON path (default: stdout)")

    p = sub.add_parser("rules", help="export the displayed rules")
    p.add_argument("--model", required=True)
    p.add_argument("--per-type", type=int, default=5)
    p.add_argument("--out", help="output JSON path (default: stdout)")
    p.add_argument("--matrix", help="also write the feature x chart-type score matrix here")

    p = sub.add_parser("evaluate", help="cross-validate on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--out", help="report JSON path (default: stdout)")
    p.add_argument("--config", help="JSON file with train/mdlp settings")

    p = sub.add_parser("serve", help="serve the HTTP API")
    p.add_argument("--model", required=True)
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--datasets", help="directory of persisted dataset JSON files")
    return parser


def _load_configs(path: str | None) -> tuple[TrainConfig, MdlpConfig]:
    if not path:
        return TrainConfig(), MdlpConfig()
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    train_keys = {f.name for f in fields(TrainConfig)}
    train_args = {k: v for k, v in obj.items() if k in train_keys}
    mdlp_args = obj.get("mdlp", {})
    return TrainConfig(**train_args), MdlpConfig(**mdlp_args)


def load_table_file(path: str | Path) -> Table:
    """Read a table from CSV (first row = header) or table JSON."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix.lower() == ".json":
        obj = json.loads(text)
        return table_from_json(obj, default_id=p.stem)
    return table_from_csv(text, table_id=p.stem)


def table_from_csv(text: str, table_id: str) -> Table:
    rows = list(csv_mod.reader(text.splitlines()))
    if len(rows) < 2:
        raise CorpusError("CSV needs a header row and at least one data row")
    header, data = rows[0], rows[1:]
    columns = []
    for i, name in enumerate(header):
        cells = [row[i] if i < len(row) else None for row in data]
        columns.append(infer_column_types(cells, name))
    return Table(id=table_id, columns=tuple(columns))


def table_from_json(obj: dict, default_id: str = "table") -> Table:
    from .corpus import _cell_to_text

    raw_cols = obj.get("columns")
    if not isinstance(raw_cols, list) or not raw_cols:
        raise CorpusError("table JSON needs a non-empty 'columns' list")
    columns = []
    for col in raw_cols:
        if not isinstance(col, dict) or not isinstance(col.get("name"), str):
            raise CorpusError("each column needs a 'name'")
        vals = col.get("values")
        if not isinstance(vals, list) or not vals:
            raise CorpusError("column %r needs values" % col["name"])
        columns.append(infer_column_types([_cell_to_text(c) for c in vals], col["name"]))
    return Table(id=str(obj.get("id") or default_id), columns=tuple(columns))


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _cmd_train(args) -> int:
    cfg, mdlp_cfg = _load_configs(args.config)
    records, report = parse_corpus(args.corpus)
    for line_no, message in report.diagnostics:
        print("corpus line %d skipped: %s" % (line_no, message), file=sys.stderr)
    records = clean_records(records)
    telemetry: list = []
    bundle = train_from_records(
        records, cfg, mdlp_cfg, np.random.default_rng(cfg.seed), telemetry=telemetry
    )
    save_bundle(bundle, args.out)
    if args.telemetry:
        with open(args.telemetry, "w", encoding="utf-8") as fh:
            fh.write("step,loss\n")
            for step, loss in telemetry:
                fh.write("%d,%r\n" % (step, loss))
    print("model written to %s (%d entities)" % (args.out, len(bundle.entity_keys)))
    return EXIT_OK


def _cmd_recommend(args) -> int:
    bundle = load_bundle(args.model)
    table = load_table_file(args.table)
    _emit(recommend_table(bundle, table, k=args.k), args.out)
    return EXIT_OK


def _cmd_rules(args) -> int:
    from .pipeline import rule_score_matrix

    bundle = load_bundle(args.model)
    _emit(rules_payload(bundle, per_type=args.per_type), args.out)
    if args.matrix:
        Path(args.matrix).write_text(
            json.dumps(rule_score_matrix(bundle), indent=2) + "\n", encoding="utf-8"
        )
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    from .evaluation import cross_validate

    cfg, mdlp_cfg = _load_configs(args.config)
    records, report = parse_corpus(args.corpus)
    for line_no, message in report.diagnostics:
        print("corpus line %d skipped: %s" % (line_no, message), file=sys.stderr)
    records = clean_records(records)
    result = cross_validate(
        records, cfg, folds=args.folds, rng=np.random.default_rng(cfg.seed), mdlp_cfg=mdlp_cfg
    )
    _emit(result.to_json(), args.out)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    bundle = load_bundle(args.model)
    app = create_app(bundle, datasets_dir=args.datasets)
    port = int(os.environ.get("KG4VIS_PORT", args.port))
    uvicorn.run(app, host=args.host, port=port, log_level="info")
    return EXIT_OK


_COMMANDS = {
    "train": _cmd_train,
    "recommend": _cmd_recommend,
    "rules": _cmd_rules,
    "evaluate": _cmd_evaluate,
    "serve": _cmd_serve,
}


def dispatch(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (OSError, ValueError, KeyError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
