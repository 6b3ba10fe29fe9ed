"""Line-delimited JSON responder over stdio.

One request per line: ``{"op": "predict"|"embed"|"info", "id": <int>, ...}``.
Replies echo the request id and arrive in request order.  Malformed input
produces a structured ``{"error": ...}`` reply, never a silent drop; a model
that fails to load exits nonzero before the first reply.
"""

from __future__ import annotations

import argparse
import json
import sys

from .graphio import GraphFormatError, parse
from .models import ModelError, load_model

PROTOCOL_VERSION = 1


def handle(msg: dict, classifier, embedder, ident: str) -> dict:
    reply = {"id": msg.get("id")}
    op = msg.get("op")
    if op == "info":
        reply.update(l=embedder.dim, model=ident,
                     protocol=PROTOCOL_VERSION)
    elif op == "predict":
        graphs = msg.get("graphs")
        if not isinstance(graphs, list):
            raise GraphFormatError('"predict" needs a "graphs" list')
        reply["p"] = [classifier.predict(parse(t)) for t in graphs]
    elif op == "embed":
        text = msg.get("graph")
        if not isinstance(text, str):
            raise GraphFormatError('"embed" needs a "graph" string')
        reply["vec"] = embedder.embed(parse(text))
    else:
        raise GraphFormatError(f"unknown op {op!r}")
    return reply


def serve(classifier, embedder, ident: str, stdin=None, stdout=None) -> None:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for line in stdin:
        if not line.strip():
            continue
        rid = None
        try:
            msg = json.loads(line)
            if not isinstance(msg, dict):
                raise GraphFormatError("request must be a JSON object")
            rid = msg.get("id")
            reply = handle(msg, classifier, embedder, ident)
        except (json.JSONDecodeError, GraphFormatError, ModelError) as exc:
            reply = {"id": rid, "error": str(exc)}
        stdout.write(json.dumps(reply) + "\n")
        stdout.flush()


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="modelbridge-serve",
        description="Serve a graph classifier/embedder over stdio.")
    ap.add_argument("--model", default=None,
                    help="JSON model spec path (default: $MODELBRIDGE_MODEL "
                         "or the built-in motif model)")
    args = ap.parse_args(argv)
    try:
        classifier, embedder, ident = load_model(args.model)
    except ModelError as exc:
        print(f"model load failed: {exc}", file=sys.stderr)
        return 2
    serve(classifier, embedder, ident)
    return 0


if __name__ == "__main__":
    sys.exit(main())
