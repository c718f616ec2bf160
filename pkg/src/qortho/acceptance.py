"""The acceptance criteria as runnable checks.

Each criterion is a function returning a merged :class:`VerificationReport`;
:func:`run_criterion` times it against its runtime budget. The command-line
``suite`` and ``tests/test_acceptance.py`` both go through this module.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Sequence

from .qcore import QContext
from .qops import ACTIONS, LADDERS, RELATIONS, check_commutator, check_ladder, check_module_action
from .report import VerificationReport
from . import verify as V

Q_DEFAULT = (0.3, 0.5, 0.8)


def _ctxs(qs: Sequence[float], **kw) -> list[QContext]:
    return [QContext(q, **kw) for q in qs]


def ladders(qs=Q_DEFAULT) -> VerificationReport:
    sizes = {"hermite_tau": 25, "hermite_tau_star": 25, "hermite_mu": 25,
             "psi_tau": 15, "ultraspherical_tau": 12}
    reps = [check_ladder(name, sizes[name], ctx) for ctx in _ctxs(qs) for name in LADDERS]
    return VerificationReport.merge("ladders", reps, 1e-10)


def algebra_relations(qs=Q_DEFAULT) -> VerificationReport:
    reps = []
    for ctx in _ctxs(qs):
        for rel in RELATIONS:
            reps.append(check_commutator(rel, 10 if rel in RELATIONS[:4] else 3, ctx))
    return VerificationReport.merge("algebra_relations", reps, 1e-10)


def module_actions(qs=Q_DEFAULT) -> VerificationReport:
    reps = [check_module_action(a, 4, 8, ctx) for ctx in _ctxs(qs) for a in ACTIONS]
    return VerificationReport.merge("module_actions", reps, 1e-9)


def generating_function(qs=Q_DEFAULT) -> VerificationReport:
    reps = [V.verify_generating_function([-0.9, -0.5, 0.0, 0.4, 0.8], [0.3, 0.8, 1.5], 60, ctx)
            for ctx in _ctxs(qs, tol_series=1e-8)]
    return VerificationReport.merge("generating_function", reps, 1e-8)


def matrix_element_recursions(qs=(0.5, 0.7)) -> VerificationReport:
    tol = 1e-7
    reps = []
    for ctx in _ctxs(qs):
        for b in (0.5, 0.8):
            reps.append(V.verify_u_recursion(b, 6, ctx, tol=tol))
            for ell in (1, 2):
                reps.append(V.verify_w_recursions(ell, b, 6, ctx, tol=tol))
                reps.append(V.verify_Y_bessel_recurrence(ell, b, 6, ctx, tol=tol))
    return VerificationReport.merge("matrix_element_recursions", reps, tol)


def expansion_kmax(q: float, base: int = 40) -> int:
    """Truncation order for the Gegenbauer sums: ``base`` up to q = 0.7, then enough for q^{k^2/4} < 1e-24."""
    if q <= 0.7:
        return base
    return max(base, int(math.ceil(2 * math.sqrt(math.log(1e-24) / math.log(q)))))


def gegenbauer_expansion(qs=(0.5, 0.7)) -> VerificationReport:
    tol = 1e-7
    reps = []
    for ctx in _ctxs(qs):
        kmax = expansion_kmax(ctx.q)
        for ell in (1, 2):
            reps.append(V.verify_gegenbauer_expansion(ell, [-0.7, 0.3, 0.9], [0.5, 0.8, 1.5], kmax, ctx, tol=tol))
        reps.append(V.verify_gegenbauer_small_b(ctx, tol=tol))
        reps.append(V.verify_gegenbauer_hermite_reduction(ctx, kmax=kmax, tol=1e-6))
    merged = VerificationReport.merge("gegenbauer_expansion", reps, tol)
    # the matched normalisation must be one and the same candidate everywhere
    names = {r.metadata["matched_prefactor"] for r in reps if r.identity_id == "gegenbauer_expansion"}
    consistent = len(names) == 1 and None not in names
    merged.grid.append({"check": "single_prefactor"})
    merged.residuals.append(0.0 if consistent else tol)
    merged.metadata["matched_prefactors"] = sorted(n for n in names if n)
    return merged


def bessel(qs_recurrence=(0.3, 0.6, 0.9), qs_asymptotic=(0.3, 0.5, 0.7, 0.8)) -> VerificationReport:
    reps = [V.verify_bessel_recurrence(25, [0.1, 0.5, 1.0, 2.0], ctx, tol=1e-12) for ctx in _ctxs(qs_recurrence)]
    reps += [V.verify_bessel_asymptotics(40, [0.5, 1.0], ctx, tol=1e-6) for ctx in _ctxs(qs_asymptotic)]
    return VerificationReport.merge("bessel", reps, 1e-6)


def orthogonality(qs=(0.3, 0.7)) -> VerificationReport:
    reps = []
    for ctx in _ctxs(qs):
        reps.append(V.verify_orthogonality("hermite", (), 10, ctx))
        for m in (1, 2):
            reps.append(V.verify_orthogonality("ultraspherical", (ctx.q ** m,), 8, ctx))
    return VerificationReport.merge("orthogonality", reps, 1e-8)


def classical_limits(q_seq=(0.9, 0.99, 0.999)) -> VerificationReport:
    reps = [V.classical_limit_sweep(t, q_seq) for t in V.LIMIT_TARGETS]
    return VerificationReport.merge("classical_limits", reps, 1e-2)


def special_values(qs=Q_DEFAULT) -> VerificationReport:
    reps = []
    for ctx in _ctxs(qs):
        reps.append(V.verify_special_values(ctx))
        reps.append(V.ultraspherical_zero_report(ctx))
    return VerificationReport.merge("special_values", reps, 1e-12)


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    run: Callable[..., VerificationReport]
    budget: float  # seconds
    q_keys: tuple[str, ...] = ("qs",)


CRITERIA = (
    Criterion(1, "ladder relations", ladders, 1.0),
    Criterion(2, "algebra relations", algebra_relations, 5.0),
    Criterion(3, "module actions", module_actions, 10.0),
    Criterion(4, "generating function", generating_function, 2.0),
    Criterion(5, "matrix-element recursions", matrix_element_recursions, 10.0),
    Criterion(6, "q-Fourier-Gegenbauer expansion", gegenbauer_expansion, 10.0),
    Criterion(7, "q-Bessel recurrence and asymptotics", bessel, 1.0, ("qs_recurrence", "qs_asymptotic")),
    Criterion(8, "orthogonality", orthogonality, 5.0),
    Criterion(9, "classical limits", classical_limits, 5.0, ()),
    Criterion(10, "special values", special_values, 1.0),
)


@dataclass
class CriterionResult:
    criterion: Criterion
    report: VerificationReport
    seconds: float
    budget_applies: bool = True  # budgets are stated for the built-in q grids only

    @property
    def in_budget(self) -> bool:
        return not self.budget_applies or self.seconds < self.criterion.budget

    @property
    def passed(self) -> bool:
        return self.report.passed and self.in_budget

    def line(self) -> str:
        c, r = self.criterion, self.report
        verdict = "PASS" if self.passed else "FAIL"
        budget = f"budget {c.budget:g}s" if self.budget_applies else "no budget off the built-in grid"
        return (f"[{verdict}] criterion {c.number:2d} {c.name}: max residual {r.max_residual:.3g} "
                f"(tol {r.tolerance:.0e}), {self.seconds:.2f}s ({budget})")


def run_criterion(number: int, q: float | None = None) -> CriterionResult:
    """Run one criterion; ``q`` replaces every q grid of the criterion by that single value."""
    crit = next((c for c in CRITERIA if c.number == number), None)
    if crit is None:
        raise ValueError(f"no criterion {number}; expected 1..{len(CRITERIA)}")
    kwargs = {k: (q,) for k in crit.q_keys} if q is not None else {}
    t0 = time.perf_counter()
    report = crit.run(**kwargs)
    return CriterionResult(crit, report, time.perf_counter() - t0, budget_applies=q is None)


def run_all(q: float | None = None) -> list[CriterionResult]:
    return [run_criterion(c.number, q) for c in CRITERIA]
