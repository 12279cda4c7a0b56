"""Randomised cross-checks between independent computation routes.

Each check returns True on agreement. :func:`run_crosscheck` draws instances
from a seeded generator, runs every check, and collects a reproduction
bundle for each failure.
"""

from collections import Counter
from dataclasses import dataclass, field

from . import core, diagnosis
from .core import (
    are_independent,
    conditional_expectation,
    defining_identity_holds,
    diagonal_product,
    lemma1_functional_check,
    theorem1_report,
    tower_holds,
)
from .density import cond_exp_via_density, independence_via_density, induced_kernels, joint_pmf_from_table
from .randgen import GenConfig, InstanceGenerator
from .serialize import instance_to_dict, joint_to_dict, table_to_dict


def same_on_common_support(a, b) -> bool:
    """Two partial functions agree wherever both are defined."""
    if a.space != b.space:
        return False
    return all(
        va == vb for va, vb in zip(a.values, b.values) if va is not None and vb is not None
    )


def kernel_checks(inst) -> dict:
    """Invariant checks on one ``(p, m, e, m1, m2)`` instance."""
    p, m, e, m1, m2 = inst
    out = {}
    mm1 = diagonal_product(m, m1)
    indep = are_independent(p, mm1, m2)
    out["lemma1_vs_definition"] = lemma1_functional_check(p, m, m1, m2) == indep
    ce2 = conditional_expectation(p, m, e, m2)
    out["defining_identity"] = defining_identity_holds(p, m, e, m2, ce2)
    out["tower"] = tower_holds(p, m, e, m2, ce2)
    out["expectation_two_routes"] = core.expectation(p, m, e) == core.expectation_via_image(p, m, e)
    joint = core.image_distribution(p, diagonal_product(m1, m2))
    out["marginal_consistency"] = (
        joint.marginal(0) == core.image_distribution(p, m1)
        and joint.marginal(1) == core.image_distribution(p, m2)
    )
    rep = theorem1_report(p, m, e, m1, m2)
    out["theorem1"] = rep.consistent and rep.independent == indep
    return out


def density_checks(j) -> dict:
    """Density route against the kernel route on one joint law."""
    q, m, m1, m2, e = induced_kernels(j)
    out = {}
    out["density_independence"] = independence_via_density(j) == are_independent(
        q, diagonal_product(m, m1), m2
    )
    k1 = conditional_expectation(q, m, e, m1)
    d1 = cond_exp_via_density(j, "x1")
    k12 = conditional_expectation(q, m, e, diagonal_product(m1, m2))
    d12 = cond_exp_via_density(j, ("x1", "x2"))
    out["density_cond_exp_x1"] = k1.mask == d1.mask and same_on_common_support(k1, d1)
    out["density_cond_exp_pair"] = k12.mask == d12.mask and same_on_common_support(k12, d12)
    return out


def table_checks(t) -> dict:
    """Count formulas and both generic routes on one S-table."""
    q, m, m1, m2, e = diagnosis.induced_model(t)
    indep = are_independent(q, diagonal_product(m, m1), m2)
    out = {"counts_independence": diagnosis.independence_by_counts(t) == indep}
    forms = diagnosis.cond_exp_closed_forms(t)
    k1 = conditional_expectation(q, m, e, m1)
    k12 = conditional_expectation(q, m, e, diagonal_product(m1, m2))
    out["closed_form_given_m1"] = all(
        (forms.e_m_given_m1[i] is None) == (not k1.defined(i))
        and (forms.e_m_given_m1[i] is None or (forms.e_m_given_m1[i],) == k1[i])
        for i in (0, 1)
    )
    out["closed_form_given_m1m2"] = all(
        (v is None) == (not k12.defined(ij)) and (v is None or (v,) == k12[ij])
        for ij, v in forms.e_m_given_m1m2.items()
    )
    ppv = diagnosis.ppv_decomposition_check(t)
    out["ppv_decomposition"] = ppv is not False
    out.update(density_checks(joint_pmf_from_table(t)))
    out["lemma1_vs_definition"] = lemma1_functional_check(q, m, m1, m2) == indep
    rep = theorem1_report(q, m, e, m1, m2)
    out["theorem1"] = rep.consistent
    return out


@dataclass
class CrosscheckSummary:
    seed: int
    iterations: int
    checked: Counter = field(default_factory=Counter)
    failed: Counter = field(default_factory=Counter)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, kind, index, results, instance):
        bad = sorted(name for name, passed in results.items() if not passed)
        for name, passed in results.items():
            self.checked[name] += 1
            if not passed:
                self.failed[name] += 1
        if bad:
            self.failures.append({
                "seed": self.seed,
                "index": index,
                "kind": kind,
                "failed_checks": bad,
                "instance": instance(),
            })

    def to_dict(self) -> dict:
        return {
            "command": "crosscheck",
            "seed": self.seed,
            "iterations": self.iterations,
            "checks": {
                name: {"checked": self.checked[name], "failed": self.failed[name]}
                for name in sorted(self.checked)
            },
            "total_failed": sum(self.failed.values()),
            "failures": self.failures,
        }


_MODES = ("random", "constant_m2", "product")


def run_crosscheck(seed: int, iterations: int, cfg: GenConfig = None) -> CrosscheckSummary:
    """Run every check family ``iterations`` times from one seed.

    Kernel instances cycle through the random, constant-``m2`` and product
    (independent by construction) modes.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    if cfg is None:
        cfg = GenConfig(seed=seed)
    gen = InstanceGenerator(cfg)
    summary = CrosscheckSummary(seed, iterations)
    for i in range(iterations):
        inst = gen.kernel_instance(_MODES[i % len(_MODES)])
        summary.record("kernel", i, kernel_checks(inst), lambda: instance_to_dict(inst))
        j = gen.joint_pmf()
        summary.record("joint", i, density_checks(j), lambda: joint_to_dict(j))
        t = gen.table()
        summary.record("table", i, table_checks(t), lambda: table_to_dict(t))
    return summary
