"""Discrete-operator certification.

Runs the randomized check suite: eigenvalue sandwich inequalities for the
second- and fourth-order difference operators against the spectral symbols,
norm equivalences, the H^-1 sandwich, the fourth-order gap bound, the
summation-by-parts identity, and operator symmetry.  Each check reports its
worst margin over all trials; a non-negative margin means the inequality
held with room to spare.
"""

from chfd4.verify import lemma_suite

checks = lemma_suite(seed=2024, trials=100)

width = max(len(c.name) for c in checks)
npass = 0
for c in checks:
    tag = "pass" if c.passed else "FAIL"
    print(f"[{tag}] N={c.N:<3} {c.name:<{width}}  worst margin {c.margin:+.3e}")
    npass += c.passed

print(f"\n{npass}/{len(checks)} checks passed")
