"""Command line entry points: serve the HTTP/WS service, replay a session
record, or render a report from one."""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys

from .session import CorruptRecord, SessionConfig, replay


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", choices=("mock", "remote"), default="mock")
    parser.add_argument("--model-endpoint", default=None)
    parser.add_argument("--ocr", choices=("mock", "remote"), default="mock")
    parser.add_argument("--ocr-endpoint", default=None)
    parser.add_argument("--debounce-ms", type=float, default=500.0)
    parser.add_argument("--timeout-ms", type=int, default=10_000)
    parser.add_argument("--runner-cmd", default=None, help="interpreter command line")
    parser.add_argument("--workdir", default=None, help="directory for run sandboxes")
    parser.add_argument("--seed-dir", default=None, help="directory of seed code files")


def _config_from_args(args) -> SessionConfig:
    return SessionConfig(
        model=args.model,
        ocr=args.ocr,
        model_endpoint=args.model_endpoint,
        ocr_endpoint=args.ocr_endpoint,
        model_api_key=os.environ.get("MODEL_API_KEY"),
        ocr_api_key=os.environ.get("OCR_API_KEY"),
        debounce_ms=args.debounce_ms,
        timeout_ms=args.timeout_ms,
        runner_cmd=shlex.split(args.runner_cmd) if args.runner_cmd else None,
        workdir=args.workdir,
        seed_dir=args.seed_dir,
    )


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(default_config=_config_from_args(args))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_replay(args) -> int:
    try:
        session = replay(args.record)
    except CorruptRecord as exc:
        print(f"corrupt record: {exc}", file=sys.stderr)
        return 2
    digest = session.state_digest()
    if args.verify:
        with open(args.record, encoding="utf-8") as fh:
            original = [line for line in fh.read().splitlines() if line.strip()]
        replayed = [
            json.dumps(e, sort_keys=True, separators=(",", ":")) for e in session.events
        ]
        if original != replayed:
            limit = min(len(original), len(replayed))
            diverge = next(
                (i for i in range(limit) if original[i] != replayed[i]), limit
            )
            print(f"replay diverges at event {diverge + 1}", file=sys.stderr)
            return 1
        print("replay matches the record")
    print(f"state digest: {digest}")
    print(f"active file:  {session.active_file}")
    print(f"final code:\n{session.fs.history.current.text}")
    return 0


def _cmd_report(args) -> int:
    from .report import generate_report

    try:
        written = generate_report(args.record, args.out_dir)
    except CorruptRecord as exc:
        print(f"corrupt record: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inkedit")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP/WebSocket service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8721)
    _add_config_flags(serve)
    serve.set_defaults(func=_cmd_serve)

    rep = sub.add_parser("replay", help="rebuild a session from its record")
    rep.add_argument("record", help="session record (JSON lines)")
    rep.add_argument(
        "--verify",
        action="store_true",
        help="fail unless the re-emitted record matches the input byte for byte",
    )
    rep.set_defaults(func=_cmd_replay)

    report = sub.add_parser("report", help="render figures and a CSV from a record")
    report.add_argument("record", help="session record (JSON lines)")
    report.add_argument("--out-dir", default=None)
    report.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
