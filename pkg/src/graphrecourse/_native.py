"""Marshaling helpers bridging LabeledGraph to the native extension.

Labels are interned to dense ids mirrored on both sides; graphs travel as
little-endian uint16 buffers (label ids, then sorted normalized edges).
"""

from __future__ import annotations

from array import array

from .graphs import GraphEdit, LabeledGraph

try:
    from . import _fastspace as ext
except ImportError:  # pragma: no cover - built as part of the package
    ext = None

_label_ids: dict[str, int] = {}
_id_labels: list[str] = []

# expand() packs node ids and label ids into 12-bit edit-code fields
MAX_NATIVE_NODES = 4094


def label_id(lab: str) -> int:
    i = _label_ids.get(lab)
    if i is None:
        i = ext.label_id(lab.encode())
        _label_ids[lab] = i
        while len(_id_labels) <= i:
            _id_labels.append("")
        _id_labels[i] = lab
    return i


def marshal_labels(labels) -> bytes:
    return array("H", [label_id(l) for l in labels]).tobytes()


def marshal_edges(edges) -> bytes:
    flat = array("H")
    for u, v in sorted(edges):
        flat.append(u)
        flat.append(v)
    return flat.tobytes()


def marshal_graph(g: LabeledGraph) -> tuple[bytes, bytes]:
    return marshal_labels(g.labels), marshal_edges(g.edges)


def decode_edit(code: int) -> GraphEdit:
    kind = code >> 24
    a = (code >> 12) & 0xFFF
    b = code & 0xFFF
    if kind == 0:
        return GraphEdit.insert_node(_id_labels[b])
    if kind == 1:
        return GraphEdit.delete_node(a)
    if kind == 2:
        return GraphEdit.insert_edge(a, b)
    if kind == 3:
        return GraphEdit.delete_edge(a, b)
    return GraphEdit.relabel(a, _id_labels[b])
