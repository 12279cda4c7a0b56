"""Lossless JSON-ready renderings of the package's exact objects.

Every rational becomes ``{"exact": "p/q", "approx": "<12 significant digits>"}``;
only ``exact`` is authoritative.
"""

from decimal import Context, Decimal
from fractions import Fraction

from .core import as_fraction

_CTX = Context(prec=40)


def rational(q) -> dict:
    q = as_fraction(q)
    approx = _CTX.divide(Decimal(q.numerator), Decimal(q.denominator))
    return {"exact": f"{q.numerator}/{q.denominator}", "approx": format(approx, ".12g")}


def parse_rational(obj) -> Fraction:
    """Inverse of :func:`rational`; also accepts a bare ``"p/q"`` string."""
    if isinstance(obj, dict):
        obj = obj["exact"]
    return as_fraction(obj)


def optional_rational(q):
    return None if q is None else rational(q)


def vector(v) -> list:
    return [rational(c) for c in v]


def label(pt):
    return list(label(x) for x in pt) if isinstance(pt, tuple) else pt


def distribution(d) -> dict:
    return {"points": [label(p) for p in d.space.points], "masses": [rational(m) for m in d.masses]}


def kernel(k) -> dict:
    return {
        "source": [label(p) for p in k.source.points],
        "target": [label(p) for p in k.target.points],
        "rows": [[rational(x) for x in row] for row in k.rows],
    }


def embedding(e) -> dict:
    return {"points": [label(p) for p in e.space.points], "values": [vector(v) for v in e.values]}


def partial_function(f) -> list:
    return [
        {"point": label(pt), "defined": v is not None, "value": None if v is None else vector(v)}
        for pt, v in zip(f.space.points, f.values)
    ]


def instance_to_dict(inst) -> dict:
    p, m, e, m1, m2 = inst
    return {"p": distribution(p), "m": kernel(m), "e": embedding(e), "m1": kernel(m1), "m2": kernel(m2)}


def joint_to_dict(j) -> dict:
    return {
        "embedding": embedding(j.embedding),
        "s1": [label(p) for p in j.s1.points],
        "s2": [label(p) for p in j.s2.points],
        "s3": [label(p) for p in j.s3.points],
        "mass": [{"point": label(k), "mass": rational(v)} for k, v in j.mass.items()],
    }


def table_to_dict(t) -> dict:
    return {"grid": [list(row) for row in t.grid]}
