"""
Conditional expectations from densities
=======================================

Given the joint law of (X, X1, X2, X3) the same quantities can be computed
from marginal densities alone. With X3 shared by both tests the pair has to
be normalised by the law of (X1, X2) under the kernel model, not by f1 * f2.
"""

from markov_kernels import PAPER_TABLES, conditional_expectation, diagonal_product
from markov_kernels.density import (
    cond_exp_via_density,
    independence_via_density,
    induced_kernels,
    joint_pmf_from_table,
    printed_pair_cond_exp,
)

j = joint_pmf_from_table(PAPER_TABLES["S1"])
q, m, m1, m2, e = induced_kernels(j)

print("independent (densities):", independence_via_density(j))

pair = cond_exp_via_density(j, ("x1", "x2"))
kernel_pair = conditional_expectation(q, m, e, diagonal_product(m1, m2))
naive = printed_pair_cond_exp(j)
for ij in pair.space:
    print(ij, "density", pair[ij][0], "kernel", kernel_pair[ij][0], "f1*f2 version", naive[ij][0])
