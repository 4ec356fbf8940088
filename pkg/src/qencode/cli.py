"""Command-line front end.

    qencode encode '{"pattern":"sparse","entries":[[19,1.0]]}' -N 64 --emit qasm
    qencode predict spec.json -N 4096
    qencode mps gaussian.csv --bond-dim 8 --validate

Exit codes: 0 success, 1 validation failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import base64
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .encoding import ValidationError, encode
from .jsonio import DocumentError, complex_from_json, parse_pattern, to_jsonable
from .mps import MpsError, encode_mps, encode_mps_from_tensors
from .patterns import PatternError
from .predict import predict_gates
from .qasm import to_qasm

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_json_text(text: str, origin: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"{origin}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None


def load_spec(arg: str):
    if arg.lstrip().startswith("{"):
        doc = _load_json_text(arg, "inline spec")
    else:
        path = Path(arg)
        if not path.is_file():
            raise UsageError(f"spec file not found: {arg}")
        doc = _load_json_text(path.read_text(), arg)
    try:
        return parse_pattern(doc)
    except DocumentError as e:
        raise UsageError(str(e)) from None


def load_vector(path: str, fmt: str | None = None) -> np.ndarray:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"vector file not found: {path}")
    fmt = fmt or {".json": "json", ".csv": "csv", ".txt": "csv"}.get(p.suffix.lower(), "binary-f64")
    if fmt == "json":
        data = _load_json_text(p.read_text(), path)
        if not isinstance(data, list):
            raise UsageError(f"{path}: expected a JSON array")
        try:
            v = np.array([complex_from_json(x, f"$[{i}]") for i, x in enumerate(data)], dtype=complex)
        except DocumentError as e:
            raise UsageError(f"{path}: {e}") from None
    elif fmt == "csv":
        vals = []
        for lineno, line in enumerate(p.read_text().splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [s.strip() for s in line.split(",")]
            try:
                if len(parts) == 1:
                    vals.append(complex(float(parts[0])))
                elif len(parts) == 2:
                    vals.append(complex(float(parts[0]), float(parts[1])))
                else:
                    raise ValueError
            except ValueError:
                raise UsageError(f"{path}: line {lineno}: expected 'value' or 're,im'") from None
        v = np.array(vals, dtype=complex)
    elif fmt == "binary-f64":
        raw = p.read_bytes()
        if len(raw) % 8:
            raise UsageError(f"{path}: size {len(raw)} is not a multiple of 8 bytes")
        v = np.frombuffer(raw, dtype="<f8").astype(complex)
    else:
        raise UsageError(f"unknown vector format {fmt!r}")
    if v.size == 0:
        raise UsageError(f"{path}: empty vector")
    return v


def load_tensors(path: str) -> list[np.ndarray]:
    """{"tensors": [{"shape": [l, 2, r], "re": [...], "im": [...]} | {"shape": .., "b64": ..}]}."""
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"tensor file not found: {path}")
    doc = _load_json_text(p.read_text(), path)
    items = doc.get("tensors") if isinstance(doc, dict) else doc
    if not isinstance(items, list) or not items:
        raise UsageError(f'{path}: expected {{"tensors": [...]}}')
    out = []
    for i, t in enumerate(items):
        try:
            shape = tuple(int(s) for s in t["shape"])
            if "b64" in t:
                arr = np.frombuffer(base64.b64decode(t["b64"]), dtype="<c16")
            else:
                arr = np.asarray(t["re"], dtype=float) + 1j * np.asarray(t.get("im", np.zeros(len(t["re"]))), dtype=float)
            out.append(arr.reshape(shape))
        except (KeyError, TypeError, ValueError) as e:
            raise UsageError(f"{path}: tensors[{i}]: {e}") from None
    return out


def info_dict(info) -> dict:
    return to_jsonable(dataclasses.asdict(info))


def _emit(args, circ, info) -> None:
    qasm = to_qasm(circ) if (args.emit == "qasm" or args.qasm_out) else None
    doc = json.dumps(info_dict(info), indent=2)
    if args.qasm_out:
        Path(args.qasm_out).write_text(qasm)
    if args.info_out:
        Path(args.info_out).write_text(doc + "\n")
    if args.emit == "qasm":
        sys.stdout.write(qasm)
    elif args.emit == "json":
        print(doc)
    elif args.emit == "counts":
        print(json.dumps({k: getattr(info, k) for k in ("gate_count", "gate_count_1q", "gate_count_2q", "circuit_depth")}))


def cmd_encode(args) -> int:
    pattern = load_spec(args.spec)
    try:
        circ, info = encode(pattern, args.N, validate=args.validate, tol=args.tol)
    except PatternError as e:
        raise UsageError(str(e)) from None
    _emit(args, circ, info)
    return EXIT_OK


def cmd_predict(args) -> int:
    pattern = load_spec(args.spec)
    try:
        res = predict_gates(pattern, args.N)
    except (PatternError, TypeError) as e:
        raise UsageError(str(e)) from None
    print(json.dumps(res.as_dict(), indent=2))
    return EXIT_OK


def cmd_mps(args) -> int:
    try:
        if args.tensors_in:
            circ, info = encode_mps_from_tensors(load_tensors(args.tensors_in), validate=args.validate, tol=args.tol)
        else:
            if not args.vector:
                raise UsageError("a vector file is required unless --tensors-in is given")
            if args.bond_dim is None:
                raise UsageError("--bond-dim is required")
            v = load_vector(args.vector, args.format)
            circ, info = encode_mps(v, args.bond_dim, validate=args.validate, tol=args.tol)
    except MpsError as e:
        raise UsageError(str(e)) from None
    _emit(args, circ, info)
    return EXIT_OK


def _output_flags(p: argparse.ArgumentParser, default_emit: str):
    p.add_argument("--emit", choices=("qasm", "json", "counts", "none"), default=default_emit, help="what to print on stdout")
    p.add_argument("--qasm-out", help="write OpenQASM 2.0 here")
    p.add_argument("--info-out", help="write the info JSON here")
    p.add_argument("--validate", action="store_true")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, help="accepted for compatibility; all algorithms are deterministic")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qencode", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    enc = sub.add_parser("encode", help="synthesize a circuit for a pattern")
    enc.add_argument("spec", help="pattern document: a JSON file path or inline JSON")
    enc.add_argument("-N", type=int, required=True, help="vector length (power of two)")
    _output_flags(enc, "qasm")
    enc.set_defaults(func=cmd_encode)

    pred = sub.add_parser("predict", help="predict transpiled counts without synthesis")
    pred.add_argument("spec")
    pred.add_argument("-N", type=int, required=True)
    pred.set_defaults(func=cmd_predict)

    mps = sub.add_parser("mps", help="approximate loader for a numeric vector")
    mps.add_argument("vector", nargs="?", help="vector file (.json, .csv or little-endian f64 binary)")
    mps.add_argument("--format", choices=("json", "csv", "binary-f64"))
    mps.add_argument("--bond-dim", type=int)
    mps.add_argument("--tensors-in", help="JSON file of right-canonical site tensors")
    _output_flags(mps, "json")
    mps.set_defaults(func=cmd_mps)
    return ap


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"qencode: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as e:
        print(f"qencode: validation failed: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"qencode: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
