"""Two diagnostic tests, a reference disease and a second disease.

A population of ``n`` individuals is split by four binary variables
``X1, X2, X3, X`` with cell counts ``n[i, j, k, l]``. ``X1`` and ``X2`` are
test results, ``X3`` is the presence of the reference disease and ``X`` a
second disease. The counts are written as a 2 x 8 grid ("S-table"): the top
row holds ``l = 0``, the bottom row ``l = 1``, and column ``4i + 2j + k`` holds
``(i, j, k)``::

    n0000 n0010 n0100 n0110 n1000 n1010 n1100 n1110
    n0001 n0011 n0101 n0111 n1001 n1011 n1101 n1111

Conditioning on ``X3`` turns the table into a probability ``Q`` on {0, 1} and
three kernels ``M = P^{X|X3}``, ``M1 = P^{X1|X3}``, ``M2 = P^{X2|X3}``. Note
that the kernels only see each variable's joint law with ``X3``.
"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from fractions import Fraction
from itertools import product
from typing import NamedTuple, Optional, Sequence

from .core import (
    Distribution,
    Embedding,
    FiniteSpace,
    MarkovKernel,
    Theorem1Report,
    theorem1_report,
)
from .errors import InconsistencyError, ParseError, ValidationError

BINARY = FiniteSpace((0, 1))
IDENTITY_EMBEDDING = Embedding.scalar(BINARY, (0, 1))


def column_of(i: int, j: int, k: int) -> int:
    return 4 * i + 2 * j + k


@dataclass(frozen=True)
class ScenarioTable:
    """Validated S-table; ``grid[l][4i + 2j + k] = n[i, j, k, l]``."""

    grid: tuple

    def __post_init__(self):
        grid = tuple(tuple(row) for row in self.grid)
        if len(grid) != 2 or any(len(row) != 8 for row in grid):
            raise ValidationError("an S-table has 2 rows of 8 counts")
        for l, row in enumerate(grid):
            for c, v in enumerate(row):
                if isinstance(v, bool) or not isinstance(v, int):
                    raise ValidationError(f"count at row {l + 1}, column {c + 1} is not an integer: {v!r}")
                if v < 0:
                    raise ValidationError(f"negative count {v} at row {l + 1}, column {c + 1}")
        object.__setattr__(self, "grid", grid)
        for k in (0, 1):
            if self.marginal(f"++{k}+") == 0:
                raise ValidationError(f"margin n_++{k}+ is zero: no individual has X3={k}")

    def n(self, i: int, j: int, k: int, l: int) -> int:
        return self.grid[l][column_of(i, j, k)]

    def cells(self):
        """Yield ``((i, j, k, l), count)`` over all 16 cells."""
        for i, j, k, l in product((0, 1), repeat=4):
            yield (i, j, k, l), self.n(i, j, k, l)

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.grid)

    def marginal(self, pattern) -> int:
        return marginal(self, pattern)

    @cached_property
    def _margins(self) -> dict:
        out = dict(self.cells())
        # sum out one slot at a time; patterns already holding None feed later slots
        for slot in range(4):
            for pat in [p for p in out if p[slot] is not None and p[slot] == 0]:
                other = pat[:slot] + (1,) + pat[slot + 1:]
                out[pat[:slot] + (None,) + pat[slot + 1:]] = out[pat] + out[other]
        return out

    def flat(self) -> tuple:
        return self.grid[0] + self.grid[1]

    def to_text(self) -> str:
        return "\n".join(" ".join(str(v) for v in row) for row in self.grid) + "\n"

    def scaled(self, factor: int) -> "ScenarioTable":
        return ScenarioTable(tuple(tuple(factor * v for v in row) for row in self.grid))


def parse_table(grid: Sequence) -> ScenarioTable:
    """Build a table from a 2 x 8 grid or a flat row-major list of 16 counts."""
    grid = list(grid)
    if len(grid) == 16 and all(not isinstance(v, (list, tuple)) for v in grid):
        grid = [grid[:8], grid[8:]]
    return ScenarioTable(tuple(tuple(row) for row in grid))


def parse_table_text(text: str) -> ScenarioTable:
    """Parse the two-line text format (eight whitespace-separated counts per line).

    Blank lines and ``#`` comments are ignored.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        row = []
        col = 0
        for tok in line.split():
            col = line.index(tok, col)
            try:
                row.append(int(tok))
            except ValueError:
                raise ParseError(f"expected a non-negative integer, got {tok!r}", lineno, col + 1) from None
            if row[-1] < 0:
                raise ParseError(f"negative count {tok}", lineno, col + 1)
            col += len(tok)
        if len(row) != 8:
            raise ParseError(f"expected 8 counts, found {len(row)}", lineno)
        rows.append(row)
    if len(rows) != 2:
        raise ParseError(f"expected 2 rows of counts, found {len(rows)}")
    return parse_table(rows)


def _read_pattern(pattern):
    if isinstance(pattern, str):
        if len(pattern) != 4 or any(ch not in "01+" for ch in pattern):
            raise ValueError(f"pattern must be 4 characters from '0', '1', '+': {pattern!r}")
        return tuple(None if ch == "+" else int(ch) for ch in pattern)
    pattern = tuple(pattern)
    if len(pattern) != 4 or any(p not in (0, 1, None) for p in pattern):
        raise ValueError(f"pattern must be 4 slots of 0, 1 or None: {pattern!r}")
    return pattern


def marginal(t: ScenarioTable, pattern) -> int:
    """Count for a pattern such as ``"+0+1"`` (``+`` sums over that index)."""
    return t._margins[_read_pattern(pattern)]


def _m(t, *slots):
    return t._margins[slots]


class InducedModel(NamedTuple):
    q: Distribution
    m: MarkovKernel
    m1: MarkovKernel
    m2: MarkovKernel
    e: Embedding


def induced_model(t: ScenarioTable) -> InducedModel:
    """``Q = P^{X3}`` and the kernels ``M``, ``M1``, ``M2`` given ``X3``.

    ``M1(k, i) = n_{i+k+} / n_{++k+}``; the numerator must depend on ``k`` for
    the rows to be the conditional laws ``(e1, 1 - e1; 1 - s1, s1)``.
    """
    n = t.total
    nk = [_m(t, None, None, k, None) for k in (0, 1)]
    q = Distribution(BINARY, tuple(Fraction(c, n) for c in nk))
    m1 = MarkovKernel(BINARY, BINARY, tuple(
        tuple(Fraction(_m(t, i, None, k, None), nk[k]) for i in (0, 1)) for k in (0, 1)
    ))
    m2 = MarkovKernel(BINARY, BINARY, tuple(
        tuple(Fraction(_m(t, None, j, k, None), nk[k]) for j in (0, 1)) for k in (0, 1)
    ))
    m = MarkovKernel(BINARY, BINARY, tuple(
        tuple(Fraction(_m(t, None, None, k, l), nk[k]) for l in (0, 1)) for k in (0, 1)
    ))
    return InducedModel(q, m, m1, m2, IDENTITY_EMBEDDING)


def _ratio(a: int, b: int) -> Optional[Fraction]:
    return Fraction(a, b) if b else None


@dataclass(frozen=True)
class DiagnosticMetrics:
    """Diagnostic quantities read from an S-table; ``None`` marks a zero denominator.

    Sensitivity and specificity follow the variable definitions,
    ``s_i = P(Xi=1 | X3=1)`` and ``e_i = P(Xi=0 | X3=0)``. PPV and NPV are
    those of test ``X1`` for disease ``X3``.
    """

    prevalence: Fraction
    sensitivity_1: Fraction
    sensitivity_2: Fraction
    specificity_1: Fraction
    specificity_2: Fraction
    prevalence_x: Fraction
    ppv_1: Optional[Fraction]
    npv_1: Optional[Fraction]
    p_d_given_d3: Fraction
    p_d_given_not_d3: Fraction

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def metrics(t: ScenarioTable) -> DiagnosticMetrics:
    n = t.total
    n0, n1 = _m(t, None, None, 0, None), _m(t, None, None, 1, None)
    pos1, neg1 = _m(t, 1, None, None, None), _m(t, 0, None, None, None)
    return DiagnosticMetrics(
        prevalence=Fraction(n1, n),
        sensitivity_1=Fraction(_m(t, 1, None, 1, None), n1),
        sensitivity_2=Fraction(_m(t, None, 1, 1, None), n1),
        specificity_1=Fraction(_m(t, 0, None, 0, None), n0),
        specificity_2=Fraction(_m(t, None, 0, 0, None), n0),
        prevalence_x=Fraction(_m(t, None, None, None, 1), n),
        ppv_1=_ratio(_m(t, 1, None, 1, None), pos1),
        npv_1=_ratio(_m(t, 0, None, 0, None), neg1),
        p_d_given_d3=Fraction(_m(t, None, None, 1, 1), n1),
        p_d_given_not_d3=Fraction(_m(t, None, None, 0, 1), n0),
    )


def independence_by_counts(t: ScenarioTable) -> bool:
    """Count form of ``M2 indep_Q M x M1``.

    For all ``i, j, l``:
    ``sum_k n_{+jk+} n_{++kl} n_{i+k+} / n_{++k+}^2
      == n_{+j++} / n_{++++} * sum_k n_{++kl} n_{i+k+} / n_{++k+}``,
    compared in integers after multiplying through by ``n n_{++0+}^2 n_{++1+}^2``.
    """
    g = t._margins
    n = g[None, None, None, None]
    n0, n1 = g[None, None, 0, None], g[None, None, 1, None]
    for i, j, l in product((0, 1), repeat=3):
        b0 = g[None, None, 0, l] * g[i, None, 0, None]
        b1 = g[None, None, 1, l] * g[i, None, 1, None]
        lhs = n * (g[None, j, 0, None] * b0 * n1 * n1 + g[None, j, 1, None] * b1 * n0 * n0)
        rhs = g[None, j, None, None] * n0 * n1 * (b0 * n1 + b1 * n0)
        if lhs != rhs:
            return False
    return True


@dataclass(frozen=True)
class ClosedForms:
    """Count-formula conditional expectations; ``None`` marks an uncharged point."""

    e_m_given_m1: dict
    e_m_given_m1m2: dict


def cond_exp_closed_forms(t: ScenarioTable) -> ClosedForms:
    """``E(M|M1)(i)`` and ``E(M|M1 x M2)(i, j)`` straight from the counts."""
    n0, n1 = _m(t, None, None, 0, None), _m(t, None, None, 1, None)
    d0 = Fraction(_m(t, None, None, 0, 1), n0)  # P(X=1 | X3=0)
    d1 = Fraction(_m(t, None, None, 1, 1), n1)  # P(X=1 | X3=1)
    given1 = {}
    for i in (0, 1):
        ni = _m(t, i, None, None, None)
        given1[i] = (
            d0 * Fraction(_m(t, i, None, 0, None), ni) + d1 * Fraction(_m(t, i, None, 1, None), ni)
            if ni else None
        )
    given12 = {}
    for i, j in product((0, 1), repeat=2):
        w0 = _m(t, i, None, 0, None) * _m(t, None, j, 0, None) * n1
        w1 = _m(t, i, None, 1, None) * _m(t, None, j, 1, None) * n0
        given12[i, j] = (w0 * d0 + w1 * d1) / (w0 + w1) if w0 + w1 else None
    return ClosedForms(given1, given12)


def ppv_decomposition_check(t: ScenarioTable) -> Optional[bool]:
    """``E(M|M1=1) == PPV1 P(D|D3) + (1 - PPV1) P(D|not D3)``; ``None`` if masked."""
    if _m(t, 1, None, None, None) == 0:
        return None
    mt = metrics(t)
    value = cond_exp_closed_forms(t).e_m_given_m1[1]
    return value == mt.ppv_1 * mt.p_d_given_d3 + (1 - mt.ppv_1) * mt.p_d_given_not_d3


class Category(str, Enum):
    BOTH_HOLD = "both_hold"
    BOTH_FAIL = "both_fail"
    EQUALITY_WITHOUT_INDEPENDENCE = "equality_without_independence"
    INDEPENDENCE_WITHOUT_EQUALITY = "independence_without_equality"

    @classmethod
    def from_flags(cls, independent: bool, equal: bool) -> "Category":
        if independent:
            return cls.BOTH_HOLD if equal else cls.INDEPENDENCE_WITHOUT_EQUALITY
        return cls.EQUALITY_WITHOUT_INDEPENDENCE if equal else cls.BOTH_FAIL


def report(t: ScenarioTable) -> Theorem1Report:
    q, m, m1, m2, e = induced_model(t)
    return theorem1_report(q, m, e, m1, m2)


def classify(t: ScenarioTable, rep: Optional[Theorem1Report] = None) -> Category:
    """Place a table in one of the four (independence, equality) categories.

    Raises :class:`InconsistencyError` for independence without equality,
    which the main theorem rules out.
    """
    if rep is None:
        rep = report(t)
    cat = Category.from_flags(rep.independent, rep.equal)
    if cat is Category.INDEPENDENCE_WITHOUT_EQUALITY:
        raise InconsistencyError(
            "independence holds but the conditional expectations differ for table\n"
            + t.to_text()
        )
    return cat


PAPER_TABLES = {
    "S1": parse_table([[1, 1, 2, 2, 3, 3, 4, 4], [3, 4, 4, 3, 1, 2, 2, 1]]),
    "S2": parse_table([[1, 1, 2, 2, 3, 3, 4, 4], [1, 2, 1, 2, 3, 3, 4, 4]]),
    "S3": parse_table([[1, 1, 2, 2, 3, 3, 4, 4], [3, 4, 4, 1, 1, 2, 2, 3]]),
}

PAPER_CATEGORIES = {
    "S1": Category.BOTH_HOLD,
    "S2": Category.BOTH_FAIL,
    "S3": Category.EQUALITY_WITHOUT_INDEPENDENCE,
}
