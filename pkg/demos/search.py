"""
Searching for tables by category
================================

Random 2x8 tables are drawn from a seeded generator until one lands in the
requested category. Independence without equality never turns up.
"""

from markov_kernels import Category, GenConfig, classify, search_category

for cat in Category:
    out = search_category(GenConfig(seed=1), cat, 20_000)
    if out.exhausted:
        print(f"{cat.value:<32} none in {out.attempts} draws")
        continue
    print(f"{cat.value:<32} after {out.attempts} draws")
    print(out.found.to_text(), end="")
    assert classify(out.found) is cat
