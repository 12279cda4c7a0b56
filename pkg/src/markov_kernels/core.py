"""Exact Markov-kernel calculus on finite spaces.

Every measurable space is a :class:`FiniteSpace` whose sigma-field is the
power set, so a Markov kernel is a row-stochastic matrix and every integral
is a finite sum. All arithmetic uses :class:`fractions.Fraction`; nothing in
this module ever rounds.

Values are immutable once built and every operation is a pure function, so
the objects can be shared freely between threads.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain, combinations, product
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

from .errors import EnumerationBudgetError, MaskedPointError, StructuralError

ZERO = Fraction(0)
ONE = Fraction(1)

Vector = tuple  # tuple of Fractions

#: Default cap on the number of singleton checks done by
#: :func:`lemma1_functional_check`.
DEFAULT_ENUMERATION_BUDGET = 100_000

#: Largest product space on which the all-subsets mode may be used.
FULL_SUBSET_LIMIT = 12


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and ``"a/b"`` strings to a Fraction.

    Floats are refused: they would smuggle rounding into exact identities.
    """
    if type(value) is Fraction:
        return value
    if isinstance(value, bool):
        raise StructuralError(f"refusing boolean {value!r} as a probability")
    if isinstance(value, float):
        raise StructuralError(f"refusing float {value!r}; use Fraction or 'a/b' strings")
    try:
        return Fraction(value)
    except (TypeError, ValueError) as exc:
        raise StructuralError(f"cannot read {value!r} as an exact rational") from exc


def _vzero(dim):
    return (ZERO,) * dim


def _vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _vscale(c, v):
    return tuple(c * a for a in v)


# ---------------------------------------------------------------------------
# Spaces, distributions, kernels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteSpace:
    """A finite outcome set with a fixed canonical order.

    ``factors`` is non-empty only for product spaces, whose points are tuples
    ordered lexicographically in the factors' orders.
    """

    points: tuple
    factors: tuple = ()
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        points = tuple(self.points)
        object.__setattr__(self, "points", points)
        if not points:
            raise StructuralError("a FiniteSpace needs at least one point")
        index = {}
        for pos, pt in enumerate(points):
            if not isinstance(pt, Hashable):
                raise StructuralError(f"point {pt!r} is not hashable")
            if pt in index:
                raise StructuralError(f"duplicate point label {pt!r}")
            index[pt] = pos
        object.__setattr__(self, "_index", index)

    @classmethod
    def product(cls, *spaces: "FiniteSpace") -> "FiniteSpace":
        if not spaces:
            raise StructuralError("product of zero spaces")
        return cls(tuple(product(*(s.points for s in spaces))), factors=tuple(spaces))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, point):
        return point in self._index

    def index(self, point) -> int:
        try:
            return self._index[point]
        except KeyError:
            raise StructuralError(f"{point!r} is not a point of {self.describe()}") from None

    def describe(self) -> str:
        pts = ", ".join(repr(p) for p in self.points[:6])
        if len(self.points) > 6:
            pts += ", ..."
        return f"FiniteSpace[{len(self)}]({pts})"


def require_same_space(a: FiniteSpace, b: FiniteSpace, what: str) -> None:
    if a != b:
        raise StructuralError(f"{what}: {a.describe()} is not {b.describe()}")


def _indices(space: FiniteSpace, subset) -> list:
    # a tuple may be a product-space point or a collection of points; points win
    if isinstance(subset, (set, frozenset, list)) or (
        isinstance(subset, tuple) and subset not in space
    ):
        return [space.index(pt) for pt in subset]
    return [space.index(subset)]


@dataclass(frozen=True)
class Distribution:
    """An exact probability vector over ``space`` (aligned with its point order)."""

    space: FiniteSpace
    masses: tuple

    def __post_init__(self):
        masses = tuple(as_fraction(m) for m in self.masses)
        object.__setattr__(self, "masses", masses)
        if len(masses) != len(self.space):
            raise StructuralError(
                f"{len(masses)} masses given for a space of {len(self.space)} points"
            )
        for pt, m in zip(self.space.points, masses):
            if m < 0:
                raise StructuralError(f"negative mass {m} at {pt!r}")
        total = sum(masses, ZERO)
        if total != 1:
            raise StructuralError(f"masses sum to {total}, not 1")

    @classmethod
    def from_mapping(cls, space: FiniteSpace, mass: Mapping) -> "Distribution":
        for pt in mass:
            space.index(pt)
        return cls(space, tuple(mass.get(pt, ZERO) for pt in space.points))

    @classmethod
    def point_mass(cls, space: FiniteSpace, point) -> "Distribution":
        k = space.index(point)
        return cls(space, tuple(ONE if i == k else ZERO for i in range(len(space))))

    @classmethod
    def uniform(cls, space: FiniteSpace) -> "Distribution":
        w = Fraction(1, len(space))
        return cls(space, (w,) * len(space))

    @classmethod
    def product(cls, *dists: "Distribution") -> "Distribution":
        """Product measure, laid out on the lexicographic product space."""
        space = FiniteSpace.product(*(d.space for d in dists))
        masses = []
        for combo in product(*(d.masses for d in dists)):
            w = ONE
            for m in combo:
                w *= m
            masses.append(w)
        return cls(space, tuple(masses))

    def __getitem__(self, point) -> Fraction:
        return self.masses[self.space.index(point)]

    @property
    def mass(self) -> dict:
        return dict(zip(self.space.points, self.masses))

    def prob(self, subset) -> Fraction:
        return sum((self.masses[i] for i in _indices(self.space, subset)), ZERO)

    def support(self) -> tuple:
        return tuple(pt for pt, m in zip(self.space.points, self.masses) if m > 0)

    def mean(self, embedding: "Embedding") -> Vector:
        require_same_space(self.space, embedding.space, "mean: embedding space")
        acc = _vzero(embedding.dim)
        for m, v in zip(self.masses, embedding.values):
            if m:
                acc = _vadd(acc, _vscale(m, v))
        return acc

    def marginal(self, axis: int) -> "Distribution":
        """Marginal on factor ``axis`` of a product-space distribution."""
        if not self.space.factors:
            raise StructuralError("marginal() needs a distribution on a product space")
        fac = self.space.factors[axis]
        acc = [ZERO] * len(fac)
        for pt, m in zip(self.space.points, self.masses):
            acc[fac.index(pt[axis])] += m
        return Distribution(fac, tuple(acc))


@dataclass(frozen=True)
class MarkovKernel:
    """Row-stochastic exact matrix from ``source`` to ``target``.

    ``rows[s][t]`` is the probability the kernel assigns to target point ``t``
    from source point ``s`` (both by canonical index).
    """

    source: FiniteSpace
    target: FiniteSpace
    rows: tuple

    def __post_init__(self):
        if len(self.rows) != len(self.source):
            raise StructuralError(
                f"{len(self.rows)} rows given for a source of {len(self.source)} points"
            )
        rows = []
        for pt, row in zip(self.source.points, self.rows):
            try:
                rows.append(Distribution(self.target, tuple(row)).masses)
            except StructuralError as exc:
                raise StructuralError(f"row {pt!r}: {exc}") from None
        object.__setattr__(self, "rows", tuple(rows))

    @classmethod
    def from_rows(cls, source, target, rows) -> "MarkovKernel":
        """Build from a mapping source-point -> row, or a sequence of rows.

        A row may be a :class:`Distribution`, a mapping target-point -> mass,
        or a sequence aligned with ``target``.
        """
        if isinstance(rows, Mapping):
            rows = [rows[pt] for pt in source.points]
        out = []
        for row in rows:
            if isinstance(row, Distribution):
                require_same_space(row.space, target, "kernel row")
                out.append(row.masses)
            elif isinstance(row, Mapping):
                out.append(Distribution.from_mapping(target, row).masses)
            else:
                out.append(tuple(row))
        return cls(source, target, tuple(out))

    @classmethod
    def identity(cls, space: FiniteSpace) -> "MarkovKernel":
        n = len(space)
        return cls(space, space, tuple(
            tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)
        ))

    @classmethod
    def constant(cls, source: FiniteSpace, row: Distribution) -> "MarkovKernel":
        return cls(source, row.space, (row.masses,) * len(source))

    @classmethod
    def deterministic(cls, source, target, func: Callable) -> "MarkovKernel":
        """The kernel ``omega -> delta_{func(omega)}`` (a random variable)."""
        return cls(source, target, tuple(
            Distribution.point_mass(target, func(pt)).masses for pt in source.points
        ))

    def row(self, omega) -> Distribution:
        return Distribution(self.target, self.rows[self.source.index(omega)])

    def __call__(self, omega, subset) -> Fraction:
        """``M(omega, A)`` for a target point or an iterable of target points."""
        row = self.rows[self.source.index(omega)]
        return sum((row[i] for i in _indices(self.target, subset)), ZERO)


@dataclass(frozen=True)
class Embedding:
    """Identifies each point of ``space`` with a rational vector in R^dim."""

    space: FiniteSpace
    values: tuple

    def __post_init__(self):
        if len(self.values) != len(self.space):
            raise StructuralError(
                f"{len(self.values)} vectors given for a space of {len(self.space)} points"
            )
        values = tuple(tuple(as_fraction(c) for c in v) for v in self.values)
        dims = {len(v) for v in values}
        if len(dims) != 1 or 0 in dims:
            raise StructuralError(f"embedding vectors must share one positive length, got {sorted(dims)}")
        object.__setattr__(self, "values", values)

    @classmethod
    def scalar(cls, space: FiniteSpace, values) -> "Embedding":
        """One-dimensional embedding from a mapping or an aligned sequence."""
        if isinstance(values, Mapping):
            values = [values[pt] for pt in space.points]
        return cls(space, tuple((v,) for v in values))

    @property
    def dim(self) -> int:
        return len(self.values[0])

    def __getitem__(self, point) -> Vector:
        return self.values[self.space.index(point)]


@dataclass(frozen=True)
class VectorMeasure:
    """Signed R^dim-valued measure on a finite space, given by its atoms."""

    space: FiniteSpace
    dim: int
    atoms: tuple

    def __call__(self, subset) -> Vector:
        acc = _vzero(self.dim)
        for i in _indices(self.space, subset):
            acc = _vadd(acc, self.atoms[i])
        return acc

    def total(self) -> Vector:
        acc = _vzero(self.dim)
        for a in self.atoms:
            acc = _vadd(acc, a)
        return acc


@dataclass(frozen=True)
class PartialVectorFunction:
    """Vector-valued function defined only where ``values`` is not None.

    Represents one member of an almost-sure equivalence class: points off the
    support mask have no value and are never compared.
    """

    space: FiniteSpace
    dim: int
    values: tuple

    @property
    def mask(self) -> tuple:
        return tuple(v is not None for v in self.values)

    def defined(self, point) -> bool:
        return self.values[self.space.index(point)] is not None

    def __getitem__(self, point) -> Vector:
        v = self.values[self.space.index(point)]
        if v is None:
            raise MaskedPointError(f"value at {point!r} is masked (zero reference mass)")
        return v

    def get(self, point, default=None):
        v = self.values[self.space.index(point)]
        return default if v is None else v

    def items(self):
        """Pairs ``(point, value)`` over the defined points only."""
        return [(pt, v) for pt, v in zip(self.space.points, self.values) if v is not None]


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def diagonal_product(m1: MarkovKernel, m2: MarkovKernel) -> MarkovKernel:
    """``(m1 x m2)(omega, (a, b)) = m1(omega, a) * m2(omega, b)``.

    Both factors are fed the same source point; this is not composition.
    """
    require_same_space(m1.source, m2.source, "diagonal_product: sources differ")
    target = FiniteSpace.product(m1.target, m2.target)
    rows = tuple(
        tuple(a * b for a in r1 for b in r2) for r1, r2 in zip(m1.rows, m2.rows)
    )
    return MarkovKernel(m1.source, target, rows)


def image_distribution(p: Distribution, m: MarkovKernel) -> Distribution:
    """The mixture ``P^M(a) = sum_omega m(omega, a) p(omega)``."""
    require_same_space(p.space, m.source, "image_distribution: p lives elsewhere")
    acc = [ZERO] * len(m.target)
    for w, row in zip(p.masses, m.rows):
        if not w:
            continue
        for t, r in enumerate(row):
            if r:
                acc[t] += w * r
    return Distribution(m.target, tuple(acc))


def mean_vectors(m: MarkovKernel, e: Embedding) -> tuple:
    """``omega -> int x m(omega, dx)`` as a tuple aligned with ``m.source``."""
    require_same_space(e.space, m.target, "embedding must live on the kernel target")
    return tuple(Distribution(m.target, row).mean(e) for row in m.rows)


def expectation(p: Distribution, m: MarkovKernel, e: Embedding) -> Vector:
    """``E_P(M) = sum_omega p(omega) sum_x e(x) m(omega, x)``."""
    require_same_space(p.space, m.source, "expectation: p lives elsewhere")
    acc = _vzero(e.dim)
    for w, mv in zip(p.masses, mean_vectors(m, e)):
        if w:
            acc = _vadd(acc, _vscale(w, mv))
    return acc


def expectation_via_image(p: Distribution, m: MarkovKernel, e: Embedding) -> Vector:
    """Same quantity, taken as the mean of the image law ``P^M``."""
    return image_distribution(p, m).mean(e)


def dot_measure(p: Distribution, m: MarkovKernel, e: Embedding) -> VectorMeasure:
    """The vector measure ``(M.P)(A) = int_A int x M(omega, dx) dP(omega)``."""
    require_same_space(p.space, m.source, "dot_measure: p lives elsewhere")
    atoms = tuple(_vscale(w, mv) for w, mv in zip(p.masses, mean_vectors(m, e)))
    return VectorMeasure(p.space, e.dim, atoms)


def conditional_expectation(
    p: Distribution, m: MarkovKernel, e: Embedding, m2: MarkovKernel
) -> PartialVectorFunction:
    """Radon-Nikodym derivative of ``(M.P)^{M2}`` with respect to ``P^{M2}``.

    Returned as a function on ``m2.target``, defined exactly where ``P^{M2}``
    is positive.
    """
    require_same_space(p.space, m.source, "conditional_expectation: p vs m source")
    require_same_space(p.space, m2.source, "conditional_expectation: p vs m2 source")
    atoms = dot_measure(p, m, e).atoms
    num = [_vzero(e.dim) for _ in m2.target.points]
    den = [ZERO] * len(m2.target)
    for w, atom, row in zip(p.masses, atoms, m2.rows):
        if not w:
            continue
        for t, r in enumerate(row):
            if r:
                den[t] += r * w
                num[t] = _vadd(num[t], _vscale(r, atom))
    values = tuple(
        _vscale(1 / d, v) if d else None for v, d in zip(num, den)
    )
    return PartialVectorFunction(m2.target, e.dim, values)


def are_independent(p: Distribution, a: MarkovKernel, b: MarkovKernel) -> bool:
    """True iff ``P^{a x b} = P^a x P^b`` exactly."""
    require_same_space(a.source, b.source, "are_independent: sources differ")
    joint = image_distribution(p, diagonal_product(a, b))
    return joint == Distribution.product(image_distribution(p, a), image_distribution(p, b))


def _powerset(items):
    items = list(items)
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


def integrate(p: Distribution, kernels: Sequence[MarkovKernel], f: Mapping) -> Fraction:
    """``int int f d(k1 x ... x kr)(omega, .) dP(omega)`` for sparse ``f``.

    ``f`` maps tuples ``(t1, ..., tr)`` of target points to values and is zero
    off its keys.
    """
    for k in kernels:
        require_same_space(p.space, k.source, "integrate: kernel source")
    total = ZERO
    for pts, val in f.items():
        if not val:
            continue
        cols = [k.target.index(pt) for k, pt in zip(kernels, pts)]
        inner = ZERO
        for w, *rows in zip(p.masses, *(k.rows for k in kernels)):
            if not w:
                continue
            term = w
            for row, c in zip(rows, cols):
                term *= row[c]
                if not term:
                    break
            inner += term
        total += val * inner
    return total


def lemma1_functional_check(
    p: Distribution,
    m: MarkovKernel,
    m1: MarkovKernel,
    m2: MarkovKernel,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    all_subsets: bool = False,
) -> bool:
    """Test ``m2`` against ``m x m1`` through the bounded-function identity.

    For functions ``f01`` on ``m.target x m1.target`` and ``f2`` on
    ``m2.target`` the check compares

        int f01 (x) f2  d(m x m1 x m2) dP   and   int f01 d(m x m1) dP * int f2 dm2 dP.

    Both sides are bilinear in ``(f01, f2)`` and singleton indicators span all
    functions on a finite set, so it is enough to run singleton pairs; that is
    the default. With ``all_subsets=True`` every pair of subset indicators is
    tried instead (only allowed up to ``FULL_SUBSET_LIMIT`` product points).
    """
    for k, name in ((m1, "m1"), (m2, "m2")):
        require_same_space(m.source, k.source, f"lemma1_functional_check: {name} source")
    require_same_space(p.space, m.source, "lemma1_functional_check: p lives elsewhere")
    size01 = len(m.target) * len(m1.target)
    size = size01 * len(m2.target)
    if all_subsets:
        if size > FULL_SUBSET_LIMIT:
            raise EnumerationBudgetError(
                f"all-subsets mode allows at most {FULL_SUBSET_LIMIT} product points, got {size}"
            )
        sets01 = [frozenset(s) for s in _powerset(product(m.target, m1.target))]
        sets2 = [frozenset(s) for s in _powerset(m2.target)]
    else:
        if size > budget:
            raise EnumerationBudgetError(
                f"{size} singleton checks exceed the enumeration budget of {budget}"
            )
        sets01 = [frozenset([pt]) for pt in product(m.target, m1.target)]
        sets2 = [frozenset([pt]) for pt in m2.target]

    both = (m, m1)
    left01 = {s: integrate(p, both, {pt: ONE for pt in s}) for s in sets01}
    right2 = {s: integrate(p, (m2,), {(pt,): ONE for pt in s}) for s in sets2}
    triple = (m, m1, m2)
    for s01 in sets01:
        for s2 in sets2:
            f = {(x, w1, w2): ONE for (x, w1) in s01 for w2 in s2}
            if integrate(p, triple, f) != left01[s01] * right2[s2]:
                return False
    return True


@dataclass(frozen=True)
class Theorem1Report:
    independent: bool
    equal: bool
    given_m1: PartialVectorFunction
    given_m1m2: PartialVectorFunction

    @property
    def consistent(self) -> bool:
        """False only if independence holds but equality fails."""
        return self.equal or not self.independent


def theorem1_report(
    p: Distribution, m: MarkovKernel, e: Embedding, m1: MarkovKernel, m2: MarkovKernel
) -> Theorem1Report:
    """Evaluate both sides of ``M2 indep M x M1  =>  E(M|M1 x M2) = E(M|M1)``.

    ``equal`` compares the two conditional expectations at every point of
    ``m1.target x m2.target`` charged by ``P^{M1 x M2}``; uncharged points are
    never compared.
    """
    independent = are_independent(p, diagonal_product(m, m1), m2)
    m12 = diagonal_product(m1, m2)
    ce1 = conditional_expectation(p, m, e, m1)
    ce12 = conditional_expectation(p, m, e, m12)
    equal = all(ce1[w1] == val for (w1, _w2), val in ce12.items())
    return Theorem1Report(independent, equal, ce1, ce12)


def subsets(space: FiniteSpace) -> Iterable[tuple]:
    """Every subset of ``space``, as tuples of points."""
    return _powerset(space.points)


def defining_identity_holds(
    p: Distribution, m: MarkovKernel, e: Embedding, m2: MarkovKernel,
    ce: Optional[PartialVectorFunction] = None,
) -> bool:
    """Check ``int M2(., A) dot(M.P) = int_A E(M|M2) dP^{M2}`` for every ``A``."""
    if ce is None:
        ce = conditional_expectation(p, m, e, m2)
    image = image_distribution(p, m2)
    atoms = dot_measure(p, m, e).atoms
    for subset in subsets(m2.target):
        cols = [m2.target.index(pt) for pt in subset]
        lhs = _vzero(e.dim)
        for atom, row in zip(atoms, m2.rows):
            lhs = _vadd(lhs, _vscale(sum((row[c] for c in cols), ZERO), atom))
        rhs = _vzero(e.dim)
        for pt in subset:
            w = image[pt]
            if w:
                rhs = _vadd(rhs, _vscale(w, ce[pt]))
        if lhs != rhs:
            return False
    return True


def tower_holds(
    p: Distribution, m: MarkovKernel, e: Embedding, m2: MarkovKernel,
    ce: Optional[PartialVectorFunction] = None,
) -> bool:
    """``sum_{w2} E(M|M2)(w2) P^{M2}(w2) = E_P(M)``."""
    if ce is None:
        ce = conditional_expectation(p, m, e, m2)
    image = image_distribution(p, m2)
    acc = _vzero(e.dim)
    for pt, val in ce.items():
        acc = _vadd(acc, _vscale(image[pt], val))
    return acc == expectation(p, m, e)
