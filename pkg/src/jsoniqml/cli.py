"""Command-line driver.

Subcommands:
    run       execute a query file against bound external variables
    gen-data  write a synthetic messy-text dataset
    to-libsvm validate a JSON-lines file against a schema and write LibSVM

`run` exits 0 on success and otherwise with the error's exit-code family:
1 parse, 2 resolve, 3 dynamic, 4 io, 5 materialization cap. Results go to
stdout (or --output), one canonical line per top-level item; diagnostics go
to stderr only.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .engine import compile_query, evaluate_query
from .errors import EngineError, SourceIOError
from .frame import annotate_rows
from .items import (
    AtomicValue,
    Item,
    canonical_serialize,
    parse_canonical,
    render_atomic,
)
from .datagen import generate_dataset
from .libsvm import write_libsvm
from .modes import POLICIES, POLICY_AUTO
from .runtime import DEFAULT_CAP


@dataclass
class RunConfig:
    query_path: str
    variables: "dict[str, Item]" = field(default_factory=dict)
    output_path: Optional[str] = None
    output_format: str = "json-lines"  # or "text"
    mode_policy: str = POLICY_AUTO
    materialization_cap: int = DEFAULT_CAP
    schema_path: Optional[str] = None  # bound as $schema when given


def _parse_var(text: str) -> "tuple[str, Item]":
    name, sep, raw = text.partition("=")
    if not sep or not name:
        raise SystemExit(f"--var expects NAME=VALUE, got {text!r}")
    try:
        item = parse_canonical(raw)
    except EngineError:
        item = AtomicValue("string", raw)
    return name, item


def _render(item: Item, output_format: str) -> str:
    if output_format == "text" and isinstance(item, AtomicValue):
        return render_atomic(item)
    return canonical_serialize(item)


def run(config: RunConfig) -> int:
    try:
        try:
            query_text = Path(config.query_path).read_text(encoding="utf-8")
        except OSError as err:
            raise SourceIOError(f"cannot read query {config.query_path}: {err}") from err
        variables = dict(config.variables)
        if config.schema_path:
            try:
                schema_text = Path(config.schema_path).read_text(encoding="utf-8")
            except OSError as err:
                raise SourceIOError(
                    f"cannot read schema {config.schema_path}: {err}"
                ) from err
            variables["schema"] = parse_canonical(schema_text)

        compiled = compile_query(query_text, config.mode_policy)
        result = evaluate_query(compiled, variables, cap=config.materialization_cap)

        sink = sys.stdout if config.output_path is None else open(
            config.output_path, "w", encoding="utf-8"
        )
        try:
            for item in result.iter_items():
                sink.write(_render(item, config.output_format))
                sink.write("\n")
        finally:
            if sink is not sys.stdout:
                sink.close()
        return 0
    except EngineError as err:
        position = ""
        if err.position is not None:
            position = f" at line {err.position[0]}, column {err.position[1]}"
        print(f"error[{err.code}]{position}: {err.message}", file=sys.stderr)
        return err.exit_code
    except RecursionError:
        print("error[RECURSION_LIMIT]: query nesting or recursion too deep", file=sys.stderr)
        return 3


def _cmd_run(args) -> int:
    variables = dict(_parse_var(v) for v in args.var or [])
    config = RunConfig(
        query_path=args.query,
        variables=variables,
        output_path=args.output,
        output_format=args.format,
        mode_policy=args.mode,
        materialization_cap=args.cap,
        schema_path=args.schema,
    )
    return run(config)


def _cmd_gen_data(args) -> int:
    try:
        generate_dataset(args.n, args.d, args.margin, args.seed, args.output)
    except EngineError as err:
        print(f"error[{err.code}]: {err.message}", file=sys.stderr)
        return err.exit_code
    return 0


def _cmd_to_libsvm(args) -> int:
    try:
        try:
            lines = Path(args.input).read_text(encoding="utf-8").splitlines()
        except OSError as err:
            raise SourceIOError(f"cannot read {args.input}: {err}") from err
        try:
            schema_text = Path(args.schema).read_text(encoding="utf-8")
        except OSError as err:
            raise SourceIOError(f"cannot read schema {args.schema}: {err}") from err
        descriptor = parse_canonical(schema_text)
        rows = (parse_canonical(line) for line in lines if line.strip())
        frame = annotate_rows(rows, descriptor)
        write_libsvm(frame, args.label, args.features, args.output)
    except EngineError as err:
        print(f"error[{err.code}]: {err.message}", file=sys.stderr)
        return err.exit_code
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jsoniqml")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a query file")
    p_run.add_argument("--query", required=True)
    p_run.add_argument(
        "--var",
        action="append",
        metavar="NAME=VALUE",
        help="external variable; VALUE parsed as JSON when possible, else bound as a string",
    )
    p_run.add_argument("--output")
    p_run.add_argument("--format", choices=("json-lines", "text"), default="json-lines")
    p_run.add_argument("--mode", choices=POLICIES, default=POLICY_AUTO)
    p_run.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p_run.add_argument("--schema", help="JSON schema file bound as $schema")
    p_run.set_defaults(fn=_cmd_run)

    p_gen = sub.add_parser("gen-data", help="generate a synthetic messy dataset")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--d", type=int, required=True)
    p_gen.add_argument("--margin", type=float, default=1.0)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--output", required=True)
    p_gen.set_defaults(fn=_cmd_gen_data)

    p_svm = sub.add_parser("to-libsvm", help="convert validated JSON lines to LibSVM")
    p_svm.add_argument("--input", required=True)
    p_svm.add_argument("--schema", required=True)
    p_svm.add_argument("--label", default="label")
    p_svm.add_argument("--features", default="features")
    p_svm.add_argument("--output", required=True)
    p_svm.set_defaults(fn=_cmd_to_libsvm)
    return parser


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
