"""Request loop: newline-delimited JSON over stdin/stdout.

Exactly one response line per request line; stdout carries nothing but
protocol JSON (diagnostics go to stderr). Malformed requests get an error
response and the loop continues. The process exits 0 on "bye" or on end
of input.
"""

from __future__ import annotations

import json
import sys

from .models import ModelError, load_model, predict_values

PROTOCOL_VERSION = 1
HELLO_RESPONSE = {"ok": True, "capabilities": ["predict"]}


def _emit(out, payload: dict) -> None:
    out.write(json.dumps(payload, separators=(",", ":")) + "\n")
    out.flush()


def serve(model, lines, out) -> int:
    """Answer requests from ``lines`` until "bye" or end of input."""
    for line in lines:
        if not line.strip():
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError:
            _emit(out, {"error": "parse"})
            continue
        if not isinstance(request, dict):
            _emit(out, {"error": "request is not an object"})
            continue
        op = request.get("op")
        if op == "hello":
            _emit(out, HELLO_RESPONSE)
        elif op == "predict":
            record = request.get("record")
            if not isinstance(record, dict):
                _emit(out, {"error": "missing record"})
                continue
            try:
                _emit(out, {"class": predict_values(model, record)})
            except (ModelError, KeyError, TypeError, ValueError) as exc:
                _emit(out, {"error": str(exc) or "bad record"})
        elif op == "bye":
            return 0
        else:
            _emit(out, {"error": f"unknown op {op!r}"})
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: nomos-adapter MODEL.json", file=sys.stderr)
        return 2
    try:
        model = load_model(argv[0])
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return serve(model, sys.stdin, sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
