"""Command-line interface.

Every subcommand (except `serve`) is a thin client: it builds a request
body, sends it to the in-process HTTP service, and renders the response.
Running `slproto serve` exposes the very same endpoints over a socket.

Exit codes: 0 ok, 2 usage, 3 data, 4 solver/fit, 5 internal. Failures
print one machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx

from .errors import SlprotoError, UsageError, error_from_payload
from .service import create_app


class _Parser(argparse.ArgumentParser):
    """argparse that reports flag problems through the error taxonomy
    instead of exiting on its own."""

    def error(self, message: str):
        raise UsageError(message)


def _post(path: str, payload: dict) -> dict:
    async def go() -> dict:
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://slproto.service"
        ) as client:
            response = await client.post(path, json=payload, timeout=None)
        if response.status_code >= 400:
            raise error_from_payload(response.json())
        return response.json()

    return asyncio.run(go())


def _parse_lines(raw: str) -> int | None:
    if raw == "auto":
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise UsageError(f'--lines must be an integer or "auto", got {raw!r}') from exc


def _fmt_float(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.6f}"


def cmd_fit(args) -> int:
    body = {
        "data": args.data,
        "out": args.out,
        "shots": args.shots,
        "seed": args.seed,
        "lines": _parse_lines(args.lines),
        "epsilon": args.epsilon,
        "algo": args.algo,
        "budget": args.budget,
        "config_file": args.config,
    }
    result = _post("/api/fit", body)
    print(f"prototypes: {result['m']}")
    print(f"classes: {result['n']} ({', '.join(result['class_order'])})")
    for line in result["lines"]:
        fallback = " fallback=hard-labels" if line["fallback"] else ""
        print(
            f"line {line['index']}: classes={','.join(line['classes'])} "
            f"assigned={','.join(line['assigned'])} "
            f"margin={_fmt_float(line['margin'])}{fallback}"
        )
    if result["uncovered"]:
        print(f"uncovered (hard prototypes): {', '.join(result['uncovered'])}")
    for warning in result["warnings"]:
        print(f"warning: {warning}", file=sys.stderr)
    if result["out"]:
        print(f"model: {result['out']}")
    return 0


def cmd_eval(args) -> int:
    body = {
        "data": args.data,
        "episodes": args.episodes,
        "classifiers": [c.strip() for c in args.classifiers.split(",") if c.strip()],
        "shots": args.shots,
        "k": args.k,
        "lines": _parse_lines(args.lines),
        "epsilon": args.epsilon,
        "algo": args.algo,
        "budget": args.budget,
        "out_json": args.out_json,
        "out_csv": args.out_csv,
        "config_file": args.config,
    }
    result = _post("/api/eval", body)
    reports = result["reports"]
    if reports:
        head = reports[0]
        print(f"task={head['task']} shots={head['shots']}")
    for report in reports:
        if report["mean"] is None:
            score = "n/a (all episodes failed)"
        else:
            score = f"{report['mean'] * 100:.2f} ± {report['std'] * 100:.2f}"
        failed = f" failed={len(report['failures'])}" if report["failures"] else ""
        print(
            f"{report['classifier']:<10} {score}  "
            f"episodes={report['episodes']}{failed}"
        )
    if result["out_json"]:
        print(f"report: {result['out_json']}")
    if result["out_csv"]:
        print(f"csv: {result['out_csv']}")
    return 0


def cmd_inspect(args) -> int:
    result = _post("/api/inspect", {"path": args.model})
    print(f"schema: {result['schema_version']}")
    print(f"prototypes: {result['m']}")
    print(f"classes: {result['n']} ({', '.join(result['class_order'])})")
    for proto in result["prototypes"]:
        provenance = (
            "hard-label (no line)"
            if proto["line_index"] is None
            else f"line {proto['line_index']}"
        )
        print(f"prototype {proto['index']}: norm={proto['norm']:.6f} from {provenance}")
        for cls in result["class_order"]:
            print(f"  {cls}: {proto['distribution'][cls]:.6f}")
    for line in result["lines"]:
        fallback = " fallback=hard-labels" if line["fallback"] else ""
        print(
            f"line {line['index']}: classes={','.join(line['classes'])} "
            f"margin={_fmt_float(line['margin'])}{fallback}"
        )
    if args.csv:
        from .data import atomic_write_text

        atomic_write_text(args.csv, result["bar_chart_csv"])
        print(f"bar chart csv: {args.csv}")
    else:
        print(result["bar_chart_csv"], end="")
    return 0


def cmd_synth(args) -> int:
    try:
        specs = json.loads(args.spec)
    except json.JSONDecodeError:
        try:
            with open(args.spec, encoding="utf-8") as handle:
                specs = json.load(handle)
        except OSError as exc:
            raise UsageError(
                f"--spec must be inline JSON or a readable JSON file: {exc}"
            ) from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"spec file {args.spec} is not valid JSON: {exc}") from exc
    if not isinstance(specs, list):
        raise UsageError("spec must be a JSON array of class descriptions")
    result = _post(
        "/api/synth",
        {"specs": specs, "seed": args.seed, "out": args.out, "fmt": args.format},
    )
    print(
        f"wrote {result['instances']} instances, "
        f"{len(result['classes'])} classes, dimension {result['dimension']}"
    )
    print(f"dataset: {result['out']}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="slproto", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit soft-label prototypes and save the model")
    fit.add_argument("--data", required=True, help="dataset path (.jsonl or .slpb)")
    fit.add_argument("--shots", type=int, default=None,
                     help="subsample this many support instances per class")
    fit.add_argument("--lines", default="auto", help='line budget, integer or "auto"')
    fit.add_argument("--epsilon", type=float, default=None,
                     help="residual tolerance for line membership")
    fit.add_argument("--algo", choices=["brute", "recursive"], default=None)
    fit.add_argument("--budget", type=int, default=None,
                     help="evaluation cap for the exhaustive search")
    fit.add_argument("--seed", type=int, default=None, help="support subsampling seed")
    fit.add_argument("--out", default=None, help="model JSON output path")
    fit.add_argument("--config", default=None, help="JSON config file")
    fit.set_defaults(func=cmd_fit)

    ev = sub.add_parser("eval", help="run episodic evaluation and write reports")
    ev.add_argument("--data", required=True)
    ev.add_argument("--episodes", required=True,
                    help='episode file path or "sample:N,seed"')
    ev.add_argument("--classifiers", default="slp,1nn,centroid",
                    help="comma-separated: slp, 1nn, centroid")
    ev.add_argument("--shots", type=int, default=None,
                    help='per-class support size for "sample:..." episodes')
    ev.add_argument("--k", type=int, default=None, help="neighbors for slp")
    ev.add_argument("--lines", default="auto")
    ev.add_argument("--epsilon", type=float, default=None)
    ev.add_argument("--algo", choices=["brute", "recursive"], default=None)
    ev.add_argument("--budget", type=int, default=None)
    ev.add_argument("--out-json", default=None, help="report JSON output path")
    ev.add_argument("--out-csv", default=None, help="report CSV output path")
    ev.add_argument("--config", default=None, help="JSON config file")
    ev.set_defaults(func=cmd_eval)

    ins = sub.add_parser("inspect", help="dump a saved model's prototypes")
    ins.add_argument("model", help="model JSON path")
    ins.add_argument("--csv", default=None,
                     help="write the per-prototype bar-chart CSV here "
                          "(default: print to stdout)")
    ins.set_defaults(func=cmd_inspect)

    synth = sub.add_parser("synth", help="generate a synthetic Gaussian-blob dataset")
    synth.add_argument("--spec", required=True,
                       help="inline JSON array or path to one: "
                            '[{"label","mean","sigma","count"}, ...]')
    synth.add_argument("--seed", type=int, required=True)
    synth.add_argument("--out", required=True)
    synth.add_argument("--format", choices=["jsonl", "binary"], default=None)
    synth.set_defaults(func=cmd_synth)

    serve = sub.add_parser("serve", help="serve the HTTP API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SlprotoError as exc:
        print(json.dumps(exc.payload()), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
