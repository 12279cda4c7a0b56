"""
Markov kernels on finite spaces
===============================

A kernel is a row-stochastic matrix. Everything below is exact.
"""

from fractions import Fraction as F

from markov_kernels import (
    Distribution,
    Embedding,
    FiniteSpace,
    MarkovKernel,
    are_independent,
    conditional_expectation,
    diagonal_product,
    expectation,
    image_distribution,
)

# a two-point source with a biased coin on it
source = FiniteSpace(("rain", "dry"))
p = Distribution(source, (F(1, 3), F(2, 3)))

# two kernels reading the same source point
umbrella = MarkovKernel(source, FiniteSpace(("yes", "no")), ((F(9, 10), F(1, 10)), (F(1, 5), F(4, 5))))
traffic = MarkovKernel(source, FiniteSpace(("slow", "fast")), ((F(3, 4), F(1, 4)), (F(1, 4), F(3, 4))))

print("law of umbrella:", image_distribution(p, umbrella).masses)

# the diagonal product feeds one source point to both factors
both = diagonal_product(umbrella, traffic)
print("joint law:", dict(zip(both.target.points, image_distribution(p, both).masses)))
print("independent?", are_independent(p, umbrella, traffic))

# embed "slow" as 1 to get a mean, then condition it on the umbrella
slow = Embedding(traffic.target, ((1,), (0,)))
print("P(slow) =", expectation(p, traffic, slow)[0])
ce = conditional_expectation(p, traffic, slow, umbrella)
for point, value in ce.items():
    print(f"P(slow | umbrella={point}) = {value[0]}")

# a constant kernel carries no information, so it is independent of anything
coin = MarkovKernel.constant(source, Distribution.uniform(FiniteSpace(("h", "t"))))
print("constant kernel independent?", are_independent(p, both, coin))
