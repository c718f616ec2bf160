"""The q-exponential and the q-Bessel function J^(2) close to q = 1.

The defining series cancel heavily there; the library notices and finishes the
sum in extended precision.
"""

from qortho import QContext, eps_q_series, qbessel2
from qortho.qfuncs import classical_bessel_j

for q in (0.5, 0.8, 0.95):
    ctx = QContext(q)
    res = eps_q_series(-0.9, -1j, 0.75, ctx)
    print(f"q={q}: eps_q = {res.value:.12f}  terms={res.terms}  "
          f"extended={res.extended_precision}")

# J^(2)_nu(x (1 - q); q) tends to the classical J_nu(x)
for q in (0.9, 0.99, 0.999):
    ctx = QContext(q)
    row = [qbessel2(nu, 2.0 * (1 - q), ctx).real for nu in range(3)]
    print(f"q={q}: J^(2)_0..2 =", " ".join(f"{v:.6f}" for v in row))
print("classical:     ", " ".join(f"{classical_bessel_j(nu, 2.0):.6f}" for nu in range(3)))
