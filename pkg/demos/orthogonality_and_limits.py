"""q-Hermite and q-ultraspherical polynomials: Gram matrices and the q -> 1 limit."""

import numpy as np

from qortho import QContext, hermite_eval, ultraspherical_eval
from qortho.verify import verify_orthogonality

# %% evaluate a few q-Hermite polynomials on a grid
ctx = QContext(0.5)
x = np.linspace(-1, 1, 5)
for n in range(4):
    print(f"H_{n}(x | 0.5) =", np.round(hermite_eval(n, x, ctx).real, 6))

# %% orthogonality against the continuous weight, by Gauss-Legendre quadrature
for q in (0.3, 0.7):
    rep = verify_orthogonality("hermite", (), 8, QContext(q))
    print(f"q={q}: off-diagonal Gram mass {rep.max_residual:.2e} (passed={rep.passed})")

# %% C_n(x; q^lambda | q) approaches the classical Gegenbauer polynomial as q -> 1
lam, n, x0 = 1.5, 3, 0.4
gegen = 8 * lam * (lam + 1) * (lam + 2) / 6 * x0 ** 3 - 2 * lam * (lam + 1) * x0  # classical C_3^lambda
for q in (0.9, 0.99, 0.999):
    c = QContext(q)
    print(f"q={q}: C_3 = {ultraspherical_eval(n, q ** lam, x0, c).real:.6f}  (classical {gegen:.6f})")
