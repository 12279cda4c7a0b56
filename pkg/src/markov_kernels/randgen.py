"""Seeded generation of exact random instances, and the category search.

Randomness comes from SplitMix64 (Steele, Lea and Flood, 2014) implemented
here, so a given seed yields the same instances on every platform and Python
version. A generator is stateful and meant for one thread; use separate
instances with distinct seeds for parallel work.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

from .core import Distribution, Embedding, FiniteSpace, MarkovKernel
from .density import JointPMF
from .diagnosis import Category, ScenarioTable, classify, independence_by_counts, report
from .errors import GenerationExhausted, StructuralError

MASK64 = (1 << 64) - 1


class SplitMix64:
    """64-bit SplitMix generator; ``next_u64`` matches the reference C code."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` (rejection sampling, no modulo bias)."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        limit = (1 << 64) - (1 << 64) % n
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``."""
        return lo + self.below(hi - lo + 1)


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_denominator: int = 12
    max_count: int = 10
    space_size_range: tuple = (1, 4)
    dim_range: tuple = (1, 2)

    def __post_init__(self):
        if not 0 <= self.seed <= MASK64:
            raise StructuralError("seed must be an unsigned 64-bit integer")
        if self.max_denominator < 1 or self.max_count < 1:
            raise StructuralError("max_denominator and max_count must be positive")
        for name in ("space_size_range", "dim_range"):
            lo, hi = getattr(self, name)
            if not 1 <= lo <= hi:
                raise StructuralError(f"{name} must satisfy 1 <= min <= max, got {(lo, hi)}")


class KernelInstance(NamedTuple):
    p: Distribution
    m: MarkovKernel
    e: Embedding
    m1: MarkovKernel
    m2: MarkovKernel


class InstanceGenerator:
    """Draws exact distributions, kernels, embeddings and S-tables from one seed."""

    def __init__(self, cfg: GenConfig, retry_cap: int = 1000):
        self.cfg = cfg
        self.rng = SplitMix64(cfg.seed)
        self.retry_cap = retry_cap

    def space(self, prefix: str, size: Optional[int] = None) -> FiniteSpace:
        if size is None:
            size = self.rng.randint(*self.cfg.space_size_range)
        return FiniteSpace(tuple(f"{prefix}{i}" for i in range(size)))

    def distribution(self, space: FiniteSpace) -> Distribution:
        # integer numerators summing to a drawn total <= max_denominator, so
        # every reduced denominator divides that total
        total = self.rng.randint(1, self.cfg.max_denominator)
        counts = [0] * len(space)
        for _ in range(total):
            counts[self.rng.below(len(space))] += 1
        return Distribution(space, tuple(Fraction(c, total) for c in counts))

    def kernel(self, source: FiniteSpace, target: FiniteSpace) -> MarkovKernel:
        return MarkovKernel(source, target, tuple(self.distribution(target).masses for _ in source))

    def embedding(self, space: FiniteSpace, dim: Optional[int] = None) -> Embedding:
        if dim is None:
            dim = self.rng.randint(*self.cfg.dim_range)
        md = self.cfg.max_denominator
        return Embedding(space, tuple(
            tuple(Fraction(self.rng.randint(-md, md), self.rng.randint(1, md)) for _ in range(dim))
            for _ in space
        ))

    def table(self) -> ScenarioTable:
        for _ in range(self.retry_cap):
            cells = [self.rng.randint(0, self.cfg.max_count) for _ in range(16)]
            top, bottom = cells[:8], cells[8:]
            # columns with k = 0 are the even ones
            if sum(top[0::2]) + sum(bottom[0::2]) and sum(top[1::2]) + sum(bottom[1::2]):
                return ScenarioTable((tuple(top), tuple(bottom)))
        raise GenerationExhausted(f"no table with positive X3 margins in {self.retry_cap} draws")

    def kernel_instance(self, mode: str = "random") -> KernelInstance:
        """A random ``(p, m, e, m1, m2)`` on a common source.

        ``mode="constant_m2"`` makes ``m2`` constant, hence independent of
        everything. ``mode="product"`` puts ``p`` on a product ``A x B`` with
        ``m, m1`` reading only ``A`` and ``m2`` only ``B``, which makes ``m2``
        independent of ``m x m1`` without being constant.
        """
        sx, s1, s2 = self.space("x"), self.space("a"), self.space("b")
        e = self.embedding(sx)
        if mode == "product":
            a, b = self.space("u"), self.space("v")
            pa, pb = self.distribution(a), self.distribution(b)
            p = Distribution.product(pa, pb)
            src = p.space
            ka, k1 = self.kernel(a, sx), self.kernel(a, s1)
            kb = self.kernel(b, s2)
            m = MarkovKernel(src, sx, tuple(ka.rows[a.index(u)] for u, _ in src.points))
            m1 = MarkovKernel(src, s1, tuple(k1.rows[a.index(u)] for u, _ in src.points))
            m2 = MarkovKernel(src, s2, tuple(kb.rows[b.index(v)] for _, v in src.points))
            return KernelInstance(p, m, e, m1, m2)
        src = self.space("w")
        p = self.distribution(src)
        m, m1 = self.kernel(src, sx), self.kernel(src, s1)
        if mode == "constant_m2":
            m2 = MarkovKernel.constant(src, self.distribution(s2))
        elif mode == "random":
            m2 = self.kernel(src, s2)
        else:
            raise StructuralError(f"unknown instance mode {mode!r}")
        return KernelInstance(p, m, e, m1, m2)

    def joint_pmf(self) -> JointPMF:
        sx, s1, s2, s3 = (self.space(n) for n in ("x", "a", "b", "w"))
        e = self.embedding(sx)
        d = self.distribution(FiniteSpace.product(sx, s1, s2, s3))
        return JointPMF(e, s1, s2, s3, {pt: m for pt, m in zip(d.space.points, d.masses) if m})


class SearchOutcome(NamedTuple):
    target: Category
    found: Optional[ScenarioTable]
    attempts: int

    @property
    def exhausted(self) -> bool:
        return self.found is None


_NEEDS_INDEPENDENCE = {
    Category.BOTH_HOLD: True,
    Category.INDEPENDENCE_WITHOUT_EQUALITY: True,
    Category.BOTH_FAIL: False,
    Category.EQUALITY_WITHOUT_INDEPENDENCE: False,
}


def search_category(cfg: GenConfig, target, budget: int) -> SearchOutcome:
    """Draw tables until one falls in ``target`` or ``budget`` draws are spent.

    The integer count criterion screens out tables on the wrong side of
    independence; survivors are classified through the kernel route. A table showing
    independence without equality raises
    :class:`~markov_kernels.errors.InconsistencyError` from :func:`classify`.
    """
    target = Category(target)
    if budget < 1:
        raise ValueError("budget must be at least 1")
    gen = InstanceGenerator(cfg)
    want_indep = _NEEDS_INDEPENDENCE[target]
    for attempt in range(1, budget + 1):
        t = gen.table()
        if independence_by_counts(t) != want_indep:
            continue
        if classify(t, report(t)) is target:
            return SearchOutcome(target, t, attempt)
    return SearchOutcome(target, None, budget)
