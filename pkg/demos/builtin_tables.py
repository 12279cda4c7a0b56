"""
The three S-tables
==================

Each table counts 40 people by two test results, the true disease state and
the outcome X. The classification compares E(M|M1 x M2) with E(M|M1) and
asks whether M2 is independent of M x M1.
"""

from markov_kernels import PAPER_TABLES, analyze

for name, table in PAPER_TABLES.items():
    rep = analyze(table)
    print(f"--- {name}: {rep.category.value}")
    print(table.to_text(), end="")
    print("E(M|M1):", {k: str(v) for k, v in rep.e_m_given_m1.items()})
    print("E(M|M1xM2):", {k: str(v) for k, v in rep.e_m_given_m1m2.items()})
    print("routes agree:", rep.routes_agree)

# S2 is the only one where the pair actually moves the estimate
rep = analyze(PAPER_TABLES["S2"])
for (i, j), v in rep.e_m_given_m1m2.items():
    print(f"({i},{j}): {v} vs {rep.e_m_given_m1[i]}  diff {float(v - rep.e_m_given_m1[i]):+.2e}")
