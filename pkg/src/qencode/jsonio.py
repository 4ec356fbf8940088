"""JSON pattern documents: {"pattern": "<name>", ...fields}, compositions nested."""

from __future__ import annotations

import numpy as np

from . import patterns as P


class DocumentError(ValueError):
    """Malformed pattern document; ``path`` names the offending field."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


def complex_to_json(z):
    z = complex(z)
    return z.real if z.imag == 0 else {"re": z.real, "im": z.imag}


def complex_from_json(v, path: str) -> complex:
    if isinstance(v, bool):
        raise DocumentError("expected a number", path)
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, dict) and set(v) <= {"re", "im"} and v:
        try:
            return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
        except (TypeError, ValueError):
            pass
    raise DocumentError('expected a number or {"re": .., "im": ..}', path)


def _int(v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise DocumentError("expected an integer", path)
    return v


def _real(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise DocumentError("expected a real number", path)
    return float(v)


def _list(v, path: str) -> list:
    if not isinstance(v, list):
        raise DocumentError("expected an array", path)
    return v


# name -> (class, {field: (kind, required)})
_LEAF_FIELDS = {
    "sparse": (P.Sparse, {"entries": ("entries", True)}),
    "step": (P.Step, {"k_e": ("int", True), "c": ("complex", False)}),
    "square": (P.Square, {"k_s": ("int", True), "k_e": ("int", True), "c": ("complex", False)}),
    "walsh": (P.Walsh, {"k": ("int", True), "c0": ("complex", False), "c1": ("complex", False)}),
    "fourier": (P.Fourier, {"modes": ("modes", True)}),
    "geometric": (P.Geometric, {"r": ("complex", True), "k_s": ("int", False), "c": ("complex", False)}),
    "hamming": (P.Hamming, {"r": ("complex", True), "c": ("complex", False)}),
    "staircase": (P.Staircase, {"r": ("complex", True), "c": ("complex", False)}),
    "dicke": (P.Dicke, {"k": ("int", True), "c": ("real", False)}),
    "polynomial": (P.Polynomial, {"coeffs": ("coeffs", True)}),
}


def _field(kind: str, v, path: str):
    if kind == "int":
        return _int(v, path)
    if kind == "real":
        return _real(v, path)
    if kind == "complex":
        return complex_from_json(v, path)
    if kind == "entries":
        out = []
        for i, e in enumerate(_list(v, path)):
            e = _list(e, f"{path}[{i}]")
            if len(e) != 2:
                raise DocumentError("entry must be [index, amplitude]", f"{path}[{i}]")
            out.append((_int(e[0], f"{path}[{i}][0]"), complex_from_json(e[1], f"{path}[{i}][1]")))
        return out
    if kind == "modes":
        out = []
        for i, e in enumerate(_list(v, path)):
            e = _list(e, f"{path}[{i}]")
            if len(e) != 3:
                raise DocumentError("mode must be [n, amplitude, phase]", f"{path}[{i}]")
            out.append((_int(e[0], f"{path}[{i}][0]"), _real(e[1], f"{path}[{i}][1]"), _real(e[2], f"{path}[{i}][2]")))
        return out
    if kind == "coeffs":
        return [complex_from_json(c, f"{path}[{i}]") for i, c in enumerate(_list(v, path))]
    raise AssertionError(kind)


def _check_keys(doc: dict, allowed: set, required: set, path: str):
    extra = set(doc) - allowed
    if extra:
        raise DocumentError(f"unknown field(s) {sorted(extra)}", path)
    missing = required - set(doc)
    if missing:
        raise DocumentError(f"missing field(s) {sorted(missing)}", path)


def parse_pattern(doc, path: str = "$"):
    if not isinstance(doc, dict):
        raise DocumentError("expected an object", path)
    name = doc.get("pattern")
    if not isinstance(name, str):
        raise DocumentError('missing "pattern" name', path)
    name = name.lower()
    if name in _LEAF_FIELDS:
        cls, fields = _LEAF_FIELDS[name]
        _check_keys(doc, {"pattern"} | set(fields), {k for k, (_, req) in fields.items() if req}, path)
        kwargs = {k: _field(kind, doc[k], f"{path}.{k}") for k, (kind, _) in fields.items() if k in doc}
        if name == "sparse":
            return P.Sparse(kwargs["entries"])
        if name == "fourier":
            return P.Fourier(kwargs["modes"])
        if name == "polynomial":
            return P.Polynomial(kwargs["coeffs"])
        return cls(**kwargs)
    if name == "sum":
        _check_keys(doc, {"pattern", "terms"}, {"terms"}, path)
        terms = []
        for i, t in enumerate(_list(doc["terms"], f"{path}.terms")):
            tp = f"{path}.terms[{i}]"
            if not isinstance(t, dict):
                raise DocumentError("expected an object", tp)
            _check_keys(t, {"weight", "of"}, {"of"}, tp)
            w = complex_from_json(t.get("weight", 1.0), f"{tp}.weight")
            terms.append((w, parse_pattern(t["of"], f"{tp}.of")))
        return P.Sum(terms)
    if name == "partition":
        _check_keys(doc, {"pattern", "parts"}, {"parts"}, path)
        parts = _list(doc["parts"], f"{path}.parts")
        return P.Partition([parse_pattern(p, f"{path}.parts[{i}]") for i, p in enumerate(parts)])
    if name == "tensor":
        _check_keys(doc, {"pattern", "parts"}, {"parts"}, path)
        parts = []
        for i, t in enumerate(_list(doc["parts"], f"{path}.parts")):
            tp = f"{path}.parts[{i}]"
            if not isinstance(t, dict):
                raise DocumentError("expected an object", tp)
            _check_keys(t, {"of", "N"}, {"of", "N"}, tp)
            parts.append((parse_pattern(t["of"], f"{tp}.of"), _int(t["N"], f"{tp}.N")))
        return P.Tensor(parts)
    raise DocumentError(f"unknown pattern {name!r}", f"{path}.pattern")


def pattern_to_doc(p) -> dict:
    if isinstance(p, P.Sum):
        return {"pattern": "sum", "terms": [{"weight": complex_to_json(w), "of": pattern_to_doc(q)} for w, q in p.terms]}
    if isinstance(p, P.Partition):
        return {"pattern": "partition", "parts": [pattern_to_doc(q) for q in p.parts]}
    if isinstance(p, P.Tensor):
        return {"pattern": "tensor", "parts": [{"of": pattern_to_doc(q), "N": n} for q, n in p.parts]}
    name = p.name.lower()
    _, fields = _LEAF_FIELDS[name]
    doc = {"pattern": name}
    for k, (kind, _) in fields.items():
        v = getattr(p, k)
        if kind == "complex":
            doc[k] = complex_to_json(v)
        elif kind == "entries":
            doc[k] = [[i, complex_to_json(a)] for i, a in v]
        elif kind == "modes":
            doc[k] = [list(m) for m in v]
        elif kind == "coeffs":
            doc[k] = [complex_to_json(c) for c in v]
        else:
            doc[k] = v
    return doc


def to_jsonable(x):
    """Recursively convert numpy and complex values for json.dumps."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [to_jsonable(v) for v in x.tolist()]
    if isinstance(x, (complex, np.complexfloating)):
        return complex_to_json(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if hasattr(x, "name") and hasattr(x, "params"):
        return pattern_to_doc(x)
    return x
