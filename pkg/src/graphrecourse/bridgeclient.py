"""Client for out-of-process classifier/embedder servers.

One JSON document per line over the child process's stdio; graphs cross the
boundary in the line-oriented text serialization.  Replies must echo the
request id and arrive in order; one batch is in flight per connection.
"""

from __future__ import annotations

import json
import subprocess

import numpy as np

from .classifiers import Prediction
from .graphs import LabeledGraph


class BridgeError(RuntimeError):
    pass


class BridgeConnection:
    def __init__(self, command: list[str], timeout: float = 30.0):
        self.command = list(command)
        self.timeout = timeout
        self._proc = None
        self._next_id = 0

    def _ensure(self):
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                text=True, bufsize=1)
        return self._proc

    def request(self, op: str, **payload) -> dict:
        proc = self._ensure()
        self._next_id += 1
        msg = {"op": op, "id": self._next_id, **payload}
        try:
            proc.stdin.write(json.dumps(msg) + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise BridgeError(f"bridge process failed: {exc}") from exc
        if not line:
            raise BridgeError("bridge closed the connection")
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BridgeError(f"malformed bridge reply: {line!r}") from exc
        if reply.get("id") != self._next_id:
            raise BridgeError(
                f"bridge reply id {reply.get('id')} != request id {self._next_id}")
        if "error" in reply:
            raise BridgeError(f"bridge error: {reply['error']}")
        return reply

    def close(self):
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=5)
        self._proc = None

    def info(self) -> dict:
        return self.request("info")


class BridgeClassifier:
    def __init__(self, command: list[str]):
        self.conn = BridgeConnection(command)

    def predict(self, g: LabeledGraph) -> Prediction:
        return self.predict_batch([g])[0]

    def predict_batch(self, gs: list[LabeledGraph]) -> list[Prediction]:
        reply = self.conn.request("predict", graphs=[g.to_text() for g in gs])
        ps = reply.get("p")
        if not isinstance(ps, list) or len(ps) != len(gs):
            raise BridgeError(f"predict reply has {ps!r} for {len(gs)} graphs")
        return [Prediction(float(p)) for p in ps]


class BridgeEmbedder:
    def __init__(self, command: list[str]):
        self.conn = BridgeConnection(command)
        self.dim = int(self.conn.info()["l"])

    def embed(self, g: LabeledGraph) -> np.ndarray:
        reply = self.conn.request("embed", graph=g.to_text())
        vec = np.asarray(reply.get("vec", []), dtype=float)
        if vec.shape != (self.dim,):
            raise BridgeError(
                f"embed reply length {vec.shape} != declared dim {self.dim}")
        vec.flags.writeable = False
        return vec
