"""Brute-force oracles used to freeze expected values.

Nothing here imports the library. Each oracle builds a joint law by
enumeration and answers questions by counting/summing over it, which is a
different computation from the Radon-Nikodym ratios in the package.
"""

from collections import defaultdict
from fractions import Fraction
from itertools import product


def individuals(top, bottom):
    """Expand an S-table into one ``(i, j, k, l)`` tuple per individual."""
    people = []
    for l, row in enumerate((top, bottom)):
        for col, count in enumerate(row):
            i, j, k = col >> 2, (col >> 1) & 1, col & 1
            people.extend([(i, j, k, l)] * count)
    return people


def count(people, **fixed):
    slot = {"i": 0, "j": 1, "k": 2, "l": 3}
    return sum(1 for p in people if all(p[slot[name]] == v for name, v in fixed.items()))


def kernel_model_joint(people):
    """Joint law of ``(k, l, i, j)`` when X, X1, X2 are redrawn independently given X3.

    This is ``Q (x) (M x M1 x M2)``: ``Q(k) P(l|k) P(i|k) P(j|k)`` with each
    factor a ratio of head counts.
    """
    n = len(people)
    joint = {}
    for k, l, i, j in product((0, 1), repeat=4):
        nk = count(people, k=k)
        joint[k, l, i, j] = (
            Fraction(nk, n)
            * Fraction(count(people, k=k, l=l), nk)
            * Fraction(count(people, k=k, i=i), nk)
            * Fraction(count(people, k=k, j=j), nk)
        )
    return joint


def conditional_mean_by_enumeration(joint, value_slot, cond_slots):
    """``E[value | cond]`` at every charged conditioning value, by summing a joint table."""
    num = defaultdict(Fraction)
    den = defaultdict(Fraction)
    for key, w in joint.items():
        c = tuple(key[s] for s in cond_slots)
        num[c] += w * key[value_slot]
        den[c] += w
    return {c: num[c] / den[c] for c in den if den[c]}


def independent_by_enumeration(joint, left_slots, right_slots):
    """Does the joint factor as (law of left slots) x (law of right slots)?"""
    def marg(slots):
        out = defaultdict(Fraction)
        for key, w in joint.items():
            out[tuple(key[s] for s in slots)] += w
        return out

    lr = marg(left_slots + right_slots)
    left, right = marg(left_slots), marg(right_slots)
    return all(
        lr[a + b] == left[a] * right[b] for a in left for b in right
    )


def kernel_table_oracle(top, bottom):
    """Independence and both conditional expectations for an S-table, by enumeration.

    Slots of the joint: 0 = k (X3), 1 = l (X), 2 = i (X1), 3 = j (X2).
    """
    joint = kernel_model_joint(individuals(top, bottom))
    given1 = {c[0]: v for c, v in conditional_mean_by_enumeration(joint, 1, (2,)).items()}
    given12 = conditional_mean_by_enumeration(joint, 1, (2, 3))
    indep = independent_by_enumeration(joint, (1, 2), (3,))
    equal = all(given1[i] == v for (i, _j), v in given12.items())
    return {"independent": indep, "equal": equal, "given1": given1, "given12": given12}


def generic_joint(p, rows_m, values, rows_m2):
    """Joint weights over ``(omega, x, w2)`` from plain lists, with ``x`` replaced by its vector."""
    joint = {}
    for w, pw in enumerate(p):
        for x, mx in enumerate(rows_m[w]):
            for t, m2x in enumerate(rows_m2[w]):
                joint[w, x, t] = pw * mx * m2x
    out = {}
    dim = len(values[0])
    for t in range(len(rows_m2[0])):
        den = sum(wt for (w, x, tt), wt in joint.items() if tt == t)
        if den:
            out[t] = tuple(
                sum(wt * values[x][c] for (w, x, tt), wt in joint.items() if tt == t) / den
                for c in range(dim)
            )
    return out
