"""JSON documents for sets, flows, presentations and morphisms.

Flow document::

    {"states": ["0", "1"],
     "paths": {"0->1": ["u"]},
     "compose": [["x", "y", "xy"]],
     "presentation": {"edges": [["u", "0", "1"]], "relations": [[["a", "b"], ["c"]]]}}

Path references inside "compose" are bare labels when the label is unique
in the flow, otherwise qualified as ``"a->b:label"``.

Morphism document::

    {"source": <flow>, "target": <flow>, "f0": {"0": "0"}, "paths": {"0->1": {"u": "v"}}}

A morphism whose source and target have no paths loads as a :class:`SetMap`.
"""
from __future__ import annotations

import json
from typing import Any

from .finset import FinSet, SetMap
from .flows import Flow, FlowError, FlowMorphism, FlowPresentation, Path, edge_names


class DocumentError(ValueError):
    pass


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _pair_key(a: str, b: str) -> str:
    return f"{a}->{b}"


def _split_pair(key: str) -> tuple[str, str]:
    if "->" not in key:
        raise DocumentError(f"path-set key {key!r} must look like 'a->b'")
    a, b = key.split("->", 1)
    return a, b


def flow_to_json(X: Flow) -> dict:
    names = edge_names(X)
    doc = {"states": list(X.states.elements), "paths": {}, "compose": []}
    for p in X.paths:
        doc["paths"].setdefault(_pair_key(p[0], p[1]), []).append(p[2])
    doc["compose"] = sorted([names[x], names[y], names[z]] for x, y, z in X.composition)
    if X.truncated:
        doc["truncated"] = True
    return doc


def presentation_to_json(p: FlowPresentation) -> dict:
    return {"states": list(p.vertices.elements),
            "presentation": {"edges": [list(e) for e in p.edges],
                             "relations": [[list(u), list(v)] for u, v in p.relations]}}


def set_to_json(s: FinSet) -> dict:
    return {"states": list(s.elements)}


def _resolve(ref: str, lookup: dict[str, Path]) -> Path:
    try:
        return lookup[ref]
    except KeyError:
        raise DocumentError(f"compose triple references unknown or ambiguous path {ref!r}") from None


def flow_from_json(doc: dict) -> Flow | FlowPresentation:
    if not isinstance(doc, dict) or "states" not in doc:
        raise DocumentError("flow document needs a 'states' list")
    states = [str(s) for s in doc["states"]]
    try:
        if "presentation" in doc:
            pres = doc["presentation"]
            edges = tuple((str(e[0]), str(e[1]), str(e[2])) for e in pres.get("edges", []))
            rels = tuple((tuple(u), tuple(v)) for u, v in pres.get("relations", []))
            return FlowPresentation(FinSet(tuple(states)), edges, rels)
        paths = []
        for key, labels in doc.get("paths", {}).items():
            a, b = _split_pair(key)
            paths.extend((a, b, str(lab)) for lab in labels)
        counts: dict[str, int] = {}
        for p in paths:
            counts[p[2]] = counts.get(p[2], 0) + 1
        lookup = {f"{p[0]}->{p[1]}:{p[2]}": p for p in paths}
        lookup.update({p[2]: p for p in paths if counts[p[2]] == 1})
        comp = [tuple(_resolve(r, lookup) for r in triple) for triple in doc.get("compose", [])]
        return Flow(FinSet(tuple(states)), tuple(paths), tuple(comp), bool(doc.get("truncated", False)))
    except (FlowError, ValueError, TypeError) as exc:
        if isinstance(exc, DocumentError):
            raise
        raise DocumentError(str(exc)) from exc


def set_map_to_json(f: SetMap) -> dict:
    return {"source": set_to_json(f.domain), "target": set_to_json(f.codomain), "f0": f.as_dict()}


def morphism_to_json(f) -> dict:
    if isinstance(f, SetMap):
        return set_map_to_json(f)
    doc = {"source": flow_to_json(f.source), "target": flow_to_json(f.target),
           "f0": dict(zip(f.source.states.elements, f.f0)), "paths": {}}
    for p in f.source.paths:
        q = f.path(p)
        doc["paths"].setdefault(_pair_key(p[0], p[1]), {})[p[2]] = q[2]
    return doc


def morphism_from_json(doc: dict):
    if not isinstance(doc, dict):
        raise DocumentError("morphism document must be an object")
    if "domain" in doc and "table" in doc:
        try:
            dom, cod = FinSet(tuple(doc["domain"])), FinSet(tuple(doc["codomain"]))
            return SetMap.from_dict(dom, cod, doc["table"])
        except (ValueError, KeyError) as exc:
            raise DocumentError(str(exc)) from exc
    for key in ("source", "target", "f0"):
        if key not in doc:
            raise DocumentError(f"morphism document is missing {key!r}")
    X, Y = flow_from_json(doc["source"]), flow_from_json(doc["target"])
    if not isinstance(X, Flow) or not isinstance(Y, Flow):
        raise DocumentError("morphism endpoints must be materialized flows")
    try:
        if X.is_set() and Y.is_set():
            return SetMap.from_dict(X.states, Y.states, doc["f0"])
        paths = {}
        for key, table in doc.get("paths", {}).items():
            a, b = _split_pair(key)
            fa, fb = doc["f0"][a], doc["f0"][b]
            for lab, img in table.items():
                paths[(a, b, lab)] = (fa, fb, img)
        return FlowMorphism.build(X, Y, doc["f0"], paths)
    except (FlowError, ValueError, KeyError) as exc:
        raise DocumentError(f"invalid morphism: {exc}") from exc


def arrow_summary(f) -> str:
    """Compact one-line rendering used in human-readable reports."""
    if isinstance(f, SetMap):
        body = ",".join(f"{x}:{v}" for x, v in zip(f.domain, f.table))
        return f"{{{','.join(f.domain)}}}→{{{','.join(f.codomain)}}} [{body}]"
    return repr(f)
