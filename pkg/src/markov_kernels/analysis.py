"""Full analysis of one S-table, as a structured document and as text."""

from dataclasses import dataclass
from typing import Optional

from . import serialize as ser
from .checks import same_on_common_support
from .core import are_independent, diagonal_product, lemma1_functional_check
from .density import cond_exp_via_density, independence_via_density, joint_pmf_from_table
from .diagnosis import (
    PAPER_CATEGORIES,
    PAPER_TABLES,
    Category,
    DiagnosticMetrics,
    InducedModel,
    ScenarioTable,
    classify,
    cond_exp_closed_forms,
    independence_by_counts,
    induced_model,
    metrics,
    ppv_decomposition_check,
    report,
)
from .errors import InconsistencyError


@dataclass(frozen=True)
class AnalysisReport:
    table: ScenarioTable
    metrics: DiagnosticMetrics
    model: InducedModel
    independent: bool
    equal: bool
    category: Category
    e_m_given_m1: dict
    e_m_given_m1m2: dict
    route_checks: dict

    @property
    def routes_agree(self) -> bool:
        return all(v is not False for v in self.route_checks.values())

    def to_dict(self) -> dict:
        q, m, m1, m2, _e = self.model
        return {
            "table": ser.table_to_dict(self.table)["grid"],
            "metrics": {k: ser.optional_rational(v) for k, v in self.metrics.as_dict().items()},
            "kernels": {
                "Q": ser.distribution(q),
                "M": ser.kernel(m),
                "M1": ser.kernel(m1),
                "M2": ser.kernel(m2),
            },
            "independent": self.independent,
            "equal": self.equal,
            "category": self.category.value,
            "e_m_given_m1": {
                str(i): {"defined": v is not None, "value": ser.optional_rational(v)}
                for i, v in self.e_m_given_m1.items()
            },
            "e_m_given_m1m2": {
                f"{i},{j}": {"defined": v is not None, "value": ser.optional_rational(v)}
                for (i, j), v in self.e_m_given_m1m2.items()
            },
            "route_checks": dict(self.route_checks),
        }

    def to_text(self) -> str:
        lines = ["S-table (top row X=0, bottom row X=1):"]
        lines += ["  " + " ".join(f"{v:>3}" for v in row) for row in self.table.grid]
        lines.append("metrics:")
        for k, v in self.metrics.as_dict().items():
            lines.append(f"  {k:<18} {_fmt(v)}")
        lines.append(f"independent (M2 indep M x M1): {self.independent}")
        lines.append(f"equal (E(M|M1xM2) = E(M|M1)):  {self.equal}")
        lines.append(f"category: {self.category.value}")
        for i, v in self.e_m_given_m1.items():
            lines.append(f"  E(M|M1)({i})       = {_fmt(v)}")
        for (i, j), v in self.e_m_given_m1m2.items():
            lines.append(f"  E(M|M1xM2)({i},{j}) = {_fmt(v)}")
        lines.append("route checks:")
        for k, v in self.route_checks.items():
            lines.append(f"  {k:<20} {'masked' if v is None else v}")
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if v is None:
        return "masked"
    return f"{v.numerator}/{v.denominator} (~{ser.rational(v)['approx']})"


def analyze(t: ScenarioTable) -> AnalysisReport:
    """Everything the CLI reports about a table, with all route cross-checks.

    Raises :class:`~markov_kernels.errors.InconsistencyError` if the table
    shows independence without equality.
    """
    model = induced_model(t)
    q, m, m1, m2, e = model
    rep = report(t)
    category = classify(t, rep)
    forms = cond_exp_closed_forms(t)

    given1 = {i: rep.given_m1.get(i, (None,))[0] for i in (0, 1)}
    given12 = {ij: rep.given_m1m2.get(ij, (None,))[0] for ij in forms.e_m_given_m1m2}
    counts_ok = (
        independence_by_counts(t) == rep.independent
        and forms.e_m_given_m1 == given1
        and forms.e_m_given_m1m2 == given12
    )
    j = joint_pmf_from_table(t)
    d1 = cond_exp_via_density(j, "x1")
    d12 = cond_exp_via_density(j, ("x1", "x2"))
    density_ok = (
        independence_via_density(j) == rep.independent
        and d1.mask == rep.given_m1.mask and same_on_common_support(d1, rep.given_m1)
        and d12.mask == rep.given_m1m2.mask and same_on_common_support(d12, rep.given_m1m2)
    )
    route_checks = {
        "counts_formula": counts_ok,
        "density_route": density_ok,
        "lemma1": lemma1_functional_check(q, m, m1, m2) == are_independent(q, diagonal_product(m, m1), m2),
        "ppv_decomposition": ppv_decomposition_check(t),
    }
    return AnalysisReport(
        table=t,
        metrics=metrics(t),
        model=model,
        independent=rep.independent,
        equal=rep.equal,
        category=category,
        e_m_given_m1=given1,
        e_m_given_m1m2=given12,
        route_checks=route_checks,
    )


@dataclass(frozen=True)
class PaperCheck:
    name: str
    expected: Category
    observed: Optional[Category]
    report: Optional[AnalysisReport]
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return (
            self.observed is self.expected
            and self.report is not None
            and self.report.routes_agree
        )


def verify_paper(tables=None, expected=None) -> list:
    """Analyse the three built-in tables and compare with their stated categories."""
    tables = PAPER_TABLES if tables is None else tables
    expected = PAPER_CATEGORIES if expected is None else expected
    results = []
    for name, t in tables.items():
        try:
            rep = analyze(t)
        except InconsistencyError as exc:
            results.append(PaperCheck(name, expected[name], None, None, str(exc)))
            continue
        results.append(PaperCheck(name, expected[name], rep.category, rep))
    return results
