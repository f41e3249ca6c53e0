"""The compound approximation, from the combinatorics up.

Walks through the building blocks for P(M_n^(q) <= x): the index sets
J_{q,k}, the cluster coefficients gamma_{q,k}, and how the q-th-maximum CDF
interpolates between the phantom CDF G^n (q = 1) and the Poisson partial
sums of the classical iid theory (beta = (1, 0, ...)).

Run:  python demos/01_compound_formula.py
"""

import math

import numpy as np

from regenext import approx_cdf, enumerate_J, gamma

beta = (0.5, 0.3, 0.2)

print("index sets J_{q,k} and coefficients gamma_{q,k} for beta =", beta)
for q in (2, 3, 4):
    for k in range(q):
        J = enumerate_J(q, k)
        print(f"  q={q} k={k}: J = {list(J.members)!s:40s} gamma = {gamma(q, k, beta[: q - 1]):.4f}")

print()
print("compound CDF of the q-th maximum at a few values of G^n:")
print(f"{'G^n':>8s}" + "".join(f"  q={q}" + " " * 5 for q in (1, 2, 3, 4)))
for gn in (0.2, 0.5, 0.8, 0.95):
    row = [approx_cdf(q, gn, beta[: q - 1]) for q in (1, 2, 3, 4)]
    print(f"{gn:8.2f}" + "".join(f"  {v:8.4f}" for v in row))
print("(each column dominates the previous: more maxima fit below x)")

print()
print("degenerate clusters beta = (1,) recover the Poisson partial sums:")
lam = 0.7
gn = math.exp(-lam)
for q in (1, 2, 3):
    partial = gn * sum(lam**k / math.factorial(k) for k in range(q))
    print(f"  q={q}: compound = {approx_cdf(q, gn, (1.0,)[: q - 1]):.6f}, "
          f"Poisson partial sum = {partial:.6f}")
