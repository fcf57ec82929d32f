"""Command line interface: batch pipeline, verdict scoring, and the HTTP service.

``evimap run`` executes the whole pipeline on two BibTeX files and writes
the map, graphs, hierarchy, decision report, and the updated review (engine
include/exclude verdicts applied; undefined studies stay to-evaluate).
``evimap evaluate`` scores a verdict file against an oracle file.
``evimap serve`` starts the workbench API.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

from evimap.corpus import BibtexParseError, corpus_stats
from evimap.evaluation import score_against_oracle
from evimap.session import PipelineConfig, build_session, bundles_payload, map_payload


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SystemExit(f"error: cannot read {path}: {exc}")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")


def _load_verdict_file(path: str) -> dict[str, str]:
    """Accept a decision report, a plain {key: verdict} JSON map, or 2-column CSV."""
    text = _read_text(path)
    if path.endswith(".csv"):
        verdicts = {}
        for row in csv.reader(text.splitlines()):
            if not row or row[0].strip().startswith("#"):
                continue
            if len(row) < 2:
                raise SystemExit(f"error: {path}: CSV rows need 'key,verdict', got {row!r}")
            verdicts[row[0].strip()] = row[1].strip().lower()
        return verdicts
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemExit(f"error: {path} is not valid JSON: {exc}")
    if isinstance(payload, dict) and "decisions" in payload:
        return {entry["key"]: entry["verdict"] for entry in payload["decisions"]}
    if isinstance(payload, dict):
        return {str(k): str(v).lower() for k, v in payload.items()}
    raise SystemExit(f"error: {path}: expected a JSON object or a decision report")


def _cmd_run(args: argparse.Namespace) -> int:
    previous_text = _read_text(args.previous)
    new_text = _read_text(args.new)
    config = PipelineConfig(
        k=args.k,
        seed=args.seed,
        max_iterations=args.iterations,
        tolerance=args.tolerance,
        stoplist_path=args.stoplist,
    )
    # Content-derived id keeps batch artifacts bit-identical across reruns.
    digest = hashlib.sha256(
        (previous_text + "\x00" + new_text + "\x00" + repr(config)).encode("utf-8")
    ).hexdigest()[:16]
    try:
        session = build_session(previous_text, new_text, config, session_id=digest)
    except BibtexParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "map.json", map_payload(session))
    _write_json(
        out / "graphs.json",
        {
            "schema": "evimap/graphs@1",
            "knn": session.knn.to_json_dict(),
            "citations": session.citations.to_json_dict(),
        },
    )
    _write_json(out / "bundles.json", bundles_payload(session))
    _write_json(out / "decisions.json", session.decisions.to_json_dict())
    (out / "updated.bib").write_text(session.export_bibtex(), encoding="utf-8")
    session.save(out / "session.json")

    counts = corpus_stats(session.corpus)
    verdict_counts = session.decisions.counts()
    report_lines = [
        f"studies: {counts.total} "
        f"(included {counts.included}, excluded {counts.excluded}, "
        f"to evaluate {counts.to_evaluate})",
        f"projection stress: {session.projected.final_stress:.6f} "
        f"after {session.projected.iterations_run} iterations (seed {config.seed})",
        f"decisions: include {verdict_counts['include']}, "
        f"exclude {verdict_counts['exclude']}, undefined {verdict_counts['undefined']}",
    ]
    for decision in session.decisions:
        report_lines.append(f"  {decision.key}: {decision.verdict.value}")
    if session.corpus.warnings:
        report_lines.append(f"warnings: {len(session.corpus.warnings)}")
        report_lines.extend(f"  {w}" for w in session.corpus.warnings)
    report = "\n".join(report_lines) + "\n"
    (out / "report.txt").write_text(report, encoding="utf-8")
    print(report, end="")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    verdicts = _load_verdict_file(args.decisions)
    oracle = _load_verdict_file(args.oracle)
    if not oracle:
        print("error: oracle file contains no labels", file=sys.stderr)
        return 2
    undefined = sorted(k for k, v in verdicts.items() if v == "undefined")
    if undefined:
        print(
            "error: undefined verdicts must be resolved before scoring: "
            + ", ".join(undefined),
            file=sys.stderr,
        )
        return 2
    try:
        counts = score_against_oracle(verdicts, oracle)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(counts.to_json_dict(), indent=2, sort_keys=True))
    print(f"correct: {counts.total_correct}/{counts.total_evaluated} "
          f"({counts.percent_correct * 100:.1f}%)")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from evimap.service import create_app

    app = create_app(args.sessions_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evimap")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the pipeline on previous + new study files")
    run.add_argument("previous", help="BibTeX file from the previous review")
    run.add_argument("new", help="BibTeX file with the new search results")
    run.add_argument("--k", type=int, default=5, help="nearest-neighbor count (default 5)")
    run.add_argument("--seed", type=int, default=0, help="projection seed (default 0)")
    run.add_argument("--iterations", type=int, default=300, help="max projection iterations")
    run.add_argument("--tolerance", type=float, default=1e-6, help="projection stop tolerance")
    run.add_argument("--stoplist", default=None, help="custom stopword file (one word per line)")
    run.add_argument("--out", default="out", help="output directory (default ./out)")
    run.set_defaults(func=_cmd_run)

    evaluate = sub.add_parser("evaluate", help="score verdicts against an oracle")
    evaluate.add_argument("decisions", help="decision report JSON, {key: verdict} JSON, or CSV")
    evaluate.add_argument("oracle", help="oracle labels: {key: verdict} JSON or CSV")
    evaluate.set_defaults(func=_cmd_evaluate)

    serve = sub.add_parser("serve", help="start the workbench HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--sessions-dir", default="sessions")
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
