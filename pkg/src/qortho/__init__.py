"""Continuous q-orthogonal polynomials, q-exponentials and the operators acting on them."""

from .qcore import (ConvergenceError, PoleError, QContext, QSeriesError, E_q, e_q, phi_rs,
                    qpochhammer, qpochhammer_inf)
from .laurent import BasisFunction, Laurent, SymLaurent, expand_in_Q_basis, reconstruct
from .qfuncs import eps_q, eps_q_series, psi_n, qbessel2
from .qpoly import (Family, PolySpec, askey_wilson, aw_weight, hermite_eval, q_basis,
                    ultraspherical_eval)
from .qops import OperatorTag, apply_generator, check_commutator, check_ladder, check_module_action
from .report import VerificationReport

__all__ = [
    "BasisFunction", "ConvergenceError", "E_q", "Family", "Laurent", "OperatorTag", "PoleError",
    "PolySpec", "QContext", "QSeriesError", "SymLaurent", "VerificationReport", "apply_generator",
    "askey_wilson", "aw_weight", "check_commutator", "check_ladder", "check_module_action", "e_q",
    "eps_q", "eps_q_series", "expand_in_Q_basis", "hermite_eval", "phi_rs", "psi_n", "q_basis",
    "qbessel2", "qpochhammer", "qpochhammer_inf", "reconstruct", "ultraspherical_eval",
]
