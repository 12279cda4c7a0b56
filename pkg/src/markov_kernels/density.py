"""Conditional expectations and independence computed from joint densities.

This is a second, independent way to get the quantities of :mod:`core`. It
starts from the joint law of four discrete variables ``(X, X1, X2, X3)``
and works only with densities against counting measure (pointwise masses):

* ``f_i`` the density of ``X_i``, ``f_i3`` that of ``(X_i, X3)``,
* ``g3`` the density of ``(X, X3)``,
* ``phi_i(w3, .) = f_i3(., w3) / f3(w3)`` the density of ``P^{X_i | X3}``.

Integrals over ``X3`` become finite sums over the support of ``f3``.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence, Union

from .core import (
    ZERO,
    Distribution,
    Embedding,
    FiniteSpace,
    MarkovKernel,
    PartialVectorFunction,
    as_fraction,
)
from .diagnosis import BINARY, IDENTITY_EMBEDDING, InducedModel
from .errors import MaskedPointError, StructuralError

AXES = ("x", "x1", "x2", "x3")


@dataclass(frozen=True)
class JointPMF:
    """Joint law of ``(X, X1, X2, X3)``; ``mass`` maps ``(x, w1, w2, w3)`` to a probability.

    ``X`` takes values in ``embedding.space``; absent keys have mass zero.
    """

    embedding: Embedding
    s1: FiniteSpace
    s2: FiniteSpace
    s3: FiniteSpace
    mass: Mapping

    def __post_init__(self):
        clean = {}
        spaces = self.spaces
        for key, m in self.mass.items():
            if len(key) != 4:
                raise StructuralError(f"joint point {key!r} does not have 4 coordinates")
            for ax, sp, pt in zip(AXES, spaces, key):
                if pt not in sp:
                    raise StructuralError(f"{pt!r} is not a point of axis {ax}")
            m = as_fraction(m)
            if m < 0:
                raise StructuralError(f"negative mass {m} at {key!r}")
            if m:
                clean[tuple(key)] = m
        total = sum(clean.values(), ZERO)
        if total != 1:
            raise StructuralError(f"joint masses sum to {total}, not 1")
        object.__setattr__(self, "mass", clean)

    @property
    def spaces(self) -> tuple:
        return (self.embedding.space, self.s1, self.s2, self.s3)

    @classmethod
    def from_records(cls, embedding, s1, s2, s3, records: Iterable) -> "JointPMF":
        """Build from ``((x, w1, w2, w3), mass)`` records; repeated points are rejected."""
        mass = {}
        for key, m in records:
            key = tuple(key)
            if key in mass:
                raise StructuralError(f"point {key!r} listed twice")
            mass[key] = m
        return cls(embedding, s1, s2, s3, mass)


def joint_pmf_from_table(t) -> JointPMF:
    """Joint law of a :class:`~markov_kernels.diagnosis.ScenarioTable` (counts / n)."""
    n = t.total
    mass = {(l, i, j, k): Fraction(c, n) for (i, j, k, l), c in t.cells() if c}
    return JointPMF(IDENTITY_EMBEDDING, BINARY, BINARY, BINARY, mass)


def _axis_index(name: str) -> int:
    try:
        return AXES.index(name)
    except ValueError:
        raise StructuralError(f"unknown axis {name!r}; expected one of {AXES}") from None


def marginal_density(j: JointPMF, which: Union[str, Sequence[str]]) -> dict:
    """Marginal mass table over the named axes, zeros included.

    Keys are tuples in the order of ``which`` (a single name is accepted).
    """
    names = (which,) if isinstance(which, str) else tuple(which)
    if not names:
        raise StructuralError("marginal_density needs at least one axis")
    idx = [_axis_index(a) for a in names]
    if len(set(idx)) != len(idx):
        raise StructuralError(f"repeated axis in {names}")
    table = {key: ZERO for key in product(*(j.spaces[i].points for i in idx))}
    for key, m in j.mass.items():
        table[tuple(key[i] for i in idx)] += m
    return table


class _Densities:
    """The handful of marginals every formula below needs, computed once."""

    def __init__(self, j: JointPMF):
        self.j = j
        f3 = marginal_density(j, "x3")
        self.f3 = {w3: f3[(w3,)] for w3 in j.s3}
        self.support3 = [w3 for w3 in j.s3 if self.f3[w3] > 0]
        if not self.support3:
            raise StructuralError("f3 vanishes everywhere")
        f1 = marginal_density(j, "x1")
        f2 = marginal_density(j, "x2")
        self.f1 = {w: f1[(w,)] for w in j.s1}
        self.f2 = {w: f2[(w,)] for w in j.s2}
        self.f13 = marginal_density(j, ("x1", "x3"))
        self.f23 = marginal_density(j, ("x2", "x3"))
        self.g3 = marginal_density(j, ("x", "x3"))

    def joint_with_x3(self, which):
        return {"x": self.g3, "x1": self.f13, "x2": self.f23}[which]

    def phi(self, which, w3, point) -> Fraction:
        if which not in ("x", "x1", "x2"):
            raise StructuralError(f"phi is defined for 'x', 'x1', 'x2', not {which!r}")
        f3 = self.f3[w3]
        if not f3:
            raise MaskedPointError(f"f3({w3!r}) = 0: the conditional density is undefined there")
        return self.joint_with_x3(which)[point, w3] / f3


def phi_density(j: JointPMF, which: str, w3, point) -> Fraction:
    """Density of ``P^{which | X3}(w3, .)`` at ``point``: joint density over ``f3(w3)``."""
    if w3 not in j.s3:
        raise StructuralError(f"{w3!r} is not a point of axis x3")
    return _Densities(j).phi(which, w3, point)


def product_density_m_m1(j: JointPMF, w3, x, w1) -> Fraction:
    """Density of ``(M x M1)(w3, .)`` at ``(x, w1)``: ``g3 f13 / f3^2``."""
    d = _Densities(j)
    if not d.f3.get(w3):
        raise MaskedPointError(f"f3({w3!r}) = 0: the conditional density is undefined there")
    return d.g3[x, w3] * d.f13[w1, w3] / d.f3[w3] ** 2


def independence_via_density(j: JointPMF) -> bool:
    """Density form of ``M2 indep M x M1``.

    Checks, at every ``(w2, x, w1)``,
    ``sum_w3 f23 g3 f13 / f3^2 == (sum_w3 f23) * sum_w3 g3 f13 / f3``.
    """
    d = _Densities(j)
    sx, s1, s2 = j.embedding.space, j.s1, j.s2
    for w2, x, w1 in product(s2.points, sx.points, s1.points):
        lhs = ZERO
        inner = ZERO
        for w3 in d.support3:
            f3 = d.f3[w3]
            gf = d.g3[x, w3] * d.f13[w1, w3]
            if gf:
                lhs += d.f23[w2, w3] * gf / (f3 * f3)
                inner += gf / f3
        f2 = sum((d.f23[w2, w3] for w3 in j.s3), ZERO)
        if lhs != f2 * inner:
            return False
    return True


def _weighted_mean(embedding: Embedding, weights: Mapping) -> tuple:
    acc = [ZERO] * embedding.dim
    for x, w in weights.items():
        if w:
            for c, coord in enumerate(embedding[x]):
                acc[c] += w * coord
    return tuple(acc)


def cond_exp_via_density(j: JointPMF, given: Union[str, Sequence[str]] = "x1") -> PartialVectorFunction:
    """``E(M|M1)`` (``given="x1"``) or ``E(M|M1 x M2)`` (``given=("x1", "x2")``).

    Single conditioning variable::

        E(M|M1)(w1) = sum_x x sum_w3 g3(x,w3) f13(w1,w3) / (f3(w3) f1(w1))

    defined where ``f1(w1) > 0``. For the pair the normaliser is the density of
    ``P^{M1 x M2}``, ``h12(w1,w2) = sum_w3 f13 f23 / f3``::

        E(M|M1 x M2)(w1,w2) = sum_x x sum_w3 g3 f13 f23 / (f3^2 h12(w1,w2))

    defined where ``h12 > 0``. See :func:`printed_pair_cond_exp` for the
    variant normalised by ``f1 f2``.
    """
    d = _Densities(j)
    e = j.embedding
    names = (given,) if isinstance(given, str) else tuple(given)
    if names == ("x1",):
        values = []
        for w1 in j.s1.points:
            f1 = d.f1[w1]
            if not f1:
                values.append(None)
                continue
            weights = {
                x: sum((d.g3[x, w3] * d.f13[w1, w3] / (d.f3[w3] * f1) for w3 in d.support3), ZERO)
                for x in e.space.points
            }
            values.append(_weighted_mean(e, weights))
        return PartialVectorFunction(j.s1, e.dim, tuple(values))
    if names == ("x1", "x2"):
        space = FiniteSpace.product(j.s1, j.s2)
        values = []
        for w1, w2 in space.points:
            h12 = sum((d.f13[w1, w3] * d.f23[w2, w3] / d.f3[w3] for w3 in d.support3), ZERO)
            if not h12:
                values.append(None)
                continue
            weights = {
                x: sum(
                    (d.g3[x, w3] * d.f13[w1, w3] * d.f23[w2, w3] / (d.f3[w3] ** 2 * h12)
                     for w3 in d.support3),
                    ZERO,
                )
                for x in e.space.points
            }
            values.append(_weighted_mean(e, weights))
        return PartialVectorFunction(space, e.dim, tuple(values))
    raise StructuralError(f"given must be 'x1' or ('x1', 'x2'), not {given!r}")


def printed_pair_cond_exp(j: JointPMF) -> PartialVectorFunction:
    """Pair formula normalised by ``f1(w1) f2(w2)`` instead of ``h12(w1, w2)``.

    ``sum_x x sum_w3 g3 f13 f23 / (f3 f1 f2)``, defined where ``f1 f2 > 0``.
    Its weights over ``x`` sum to ``sum_w3 f13 f23 / (f1 f2)``, which is not 1
    in general, so it is not a conditional expectation; kept for comparison.
    """
    d = _Densities(j)
    e = j.embedding
    space = FiniteSpace.product(j.s1, j.s2)
    values = []
    for w1, w2 in space.points:
        f12 = d.f1[w1] * d.f2[w2]
        if not f12:
            values.append(None)
            continue
        weights = {
            x: sum(
                (d.g3[x, w3] * d.f13[w1, w3] * d.f23[w2, w3] / (d.f3[w3] * f12) for w3 in d.support3),
                ZERO,
            )
            for x in e.space.points
        }
        values.append(_weighted_mean(e, weights))
    return PartialVectorFunction(space, e.dim, tuple(values))


def induced_kernels(j: JointPMF):
    """``(Q, M, M1, M2, e)`` with ``Q = P^{X3}`` and each kernel ``P^{. | X3}``.

    Rows at ``w3`` with ``f3(w3) = 0`` are arbitrary; they are set uniform.
    """
    d = _Densities(j)
    q = Distribution(j.s3, tuple(d.f3[w3] for w3 in j.s3))

    def kernel(which, target):
        rows = []
        for w3 in j.s3.points:
            if d.f3[w3]:
                rows.append(tuple(d.phi(which, w3, pt) for pt in target.points))
            else:
                rows.append(Distribution.uniform(target).masses)
        return MarkovKernel(j.s3, target, tuple(rows))

    return InducedModel(
        q,
        kernel("x", j.embedding.space),
        kernel("x1", j.s1),
        kernel("x2", j.s2),
        j.embedding,
    )
