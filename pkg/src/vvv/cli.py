"""Command-line entry points.

    vvv run --config run.yaml [--selections walk.txt]
    vvv serve --config run.yaml --port 8000 [--host H] [--ui-dir DIR]
    vvv list-stages [--json]
    vvv encode --settings 5,3,2,0 --shares 2,1,1
    vvv decode --code 103935 --shares 2,1,1 [--config run.yaml]

Exit codes: 0 success, 2 validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .codec import Infeasible, PhaseShares, decode_config, decode_structure, encode_config
from .config import parse_config, to_session_config
from .explorer import SelectionError, ValidationError, run_batch, state_summary
from .pipeline import list_stages
from .runio import parse_selection_script

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3


def _parse_int_csv(text: str, label: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValidationError([f"{label}: expected comma-separated integers, got {text!r}"])
    if any(v < 0 for v in values):
        raise ValidationError([f"{label}: values must be non-negative, got {text!r}"])
    return values


def _parse_shares(text: str) -> PhaseShares:
    values = _parse_int_csv(text, "shares")
    if len(values) != 3:
        raise ValidationError([f"shares: expected a,b,c, got {text!r}"])
    return PhaseShares(*values)


def _state_line(summary: dict) -> str:
    values = " ".join(f"{k}={v:g}" for k, v in summary["values"].items())
    indices = ",".join(str(i) for i in summary["indices"])
    feasible = sum(1 for c in summary["window"] if c["status"] == "feasible")
    return (
        f"iter {summary['iteration']}  code {summary['code']}  "
        f"indices [{indices}]  {values}  "
        f"(window {len(summary['window'])}, feasible {feasible})"
    )


def cmd_run(args) -> int:
    run_config = parse_config(args.config)
    selections = []
    selections_path = Path(args.selections) if args.selections else run_config.selections_path
    if selections_path is not None:
        try:
            selections = parse_selection_script(selections_path.read_text(encoding="utf-8"))
        except ValueError as exc:
            raise ValidationError([f"{selections_path}: {exc}"])
    session_config = to_session_config(run_config)
    result = run_batch(session_config, selections)
    lines = [_state_line(state_summary(state)) for state in result.states]
    if result.terminal is not None:
        final = ",".join(str(i) for i in result.terminal.final_settings)
        lines.append(
            f"terminated at iter {result.terminal.iteration}  final indices [{final}]"
        )
    report = "\n".join(lines)
    print(report)
    root = Path(session_config.output_root)
    root.mkdir(parents=True, exist_ok=True)
    (root / "trajectory.txt").write_text(report + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    run_config = parse_config(args.config)
    ui_dir = Path(args.ui_dir) if args.ui_dir else None
    app = create_app(default_config=run_config, ui_dir=ui_dir)
    print(f"serving on http://{args.host}:{args.port} (POST /sessions to begin)")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def cmd_list_stages(args) -> int:
    stages = list_stages()
    if args.json:
        print(
            json.dumps(
                [
                    {
                        "id": s.id,
                        "phase": s.phase.value,
                        "params": [
                            {"name": p.name, "min": p.min, "step": p.step, "count": p.count}
                            for p in s.default_schemas
                        ],
                    }
                    for s in stages
                ],
                indent=2,
            )
        )
        return EXIT_OK
    for stage in stages:
        params = ", ".join(
            f"{p.name}(min={p.min:g}, step={p.step:g}, count={p.count})"
            for p in stage.default_schemas
        )
        print(f"{stage.id:16} {stage.phase.value:8} {params or '-'}")
    return EXIT_OK


def cmd_encode(args) -> int:
    shares = _parse_shares(args.shares)
    settings = _parse_int_csv(args.settings, "settings")
    try:
        code = encode_config(settings, shares)
    except ValueError as exc:
        raise ValidationError([str(exc)])
    print(code)
    return EXIT_OK


def cmd_decode(args) -> int:
    shares = _parse_shares(args.shares)
    text = args.code.strip()
    if not text.isdigit():
        raise ValidationError([f"code: expected a decimal natural, got {text!r}"])
    code = int(text)
    if args.config:
        run_config = parse_config(args.config)
        if run_config.shares != shares:
            raise ValidationError(
                [
                    f"shares {shares.as_tuple()} do not match the "
                    f"config's {run_config.shares.as_tuple()}"
                ]
            )
        schemas = tuple(s for stage in run_config.stages for s in stage.schemas)
        result = decode_config(code, shares, schemas)
    else:
        result = decode_structure(code, shares)
    if isinstance(result, Infeasible):
        print(f"infeasible: {result.reason}")
    else:
        print(",".join(str(i) for i in result))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vvv",
        description="Explore an image pipeline's parameter space by code windows.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="replay a selection script headlessly")
    run.add_argument("--config", required=True, help="run configuration file")
    run.add_argument("--selections", help="selection script (one code or NONE per line)")
    run.set_defaults(fn=cmd_run)

    serve = sub.add_parser("serve", help="serve sessions over HTTP")
    serve.add_argument("--config", required=True, help="run configuration file")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--ui-dir", help="directory with the built gallery UI")
    serve.set_defaults(fn=cmd_serve)

    stages = sub.add_parser("list-stages", help="print the stage registry")
    stages.add_argument("--json", action="store_true")
    stages.set_defaults(fn=cmd_list_stages)

    encode = sub.add_parser("encode", help="settings indices to code")
    encode.add_argument("--settings", required=True, help="comma-separated indices")
    encode.add_argument("--shares", required=True, help="a,b,c")
    encode.set_defaults(fn=cmd_encode)

    decode = sub.add_parser("decode", help="code to settings indices")
    decode.add_argument("--code", required=True, help="decimal code")
    decode.add_argument("--shares", required=True, help="a,b,c")
    decode.add_argument("--config", help="check indices against this config's grids")
    decode.set_defaults(fn=cmd_decode)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValidationError, SelectionError) as exc:
        errors = getattr(exc, "errors", None) or [str(exc)]
        for error in errors:
            print(f"error: {error}", file=sys.stderr)
        return EXIT_VALIDATION
    except (FileNotFoundError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
