"""Structured outcome of a single identity check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np


def plain(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays, tuples and complex numbers to JSON-able Python.

    Complex values with a nonzero imaginary part become ``[re, im]``.
    """
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return z.real if z.imag == 0 else [z.real, z.imag]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def finite_only(obj: Any) -> Any:
    """Replace non-finite floats by ``None`` so the result is strict JSON."""
    if isinstance(obj, dict):
        return {k: finite_only(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [finite_only(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


@dataclass
class VerificationReport:
    """Residuals of one identity over a grid of evaluation points.

    ``passed`` is derived: it is true exactly when ``max_residual < tolerance``.
    """

    identity_id: str
    grid: list[dict[str, Any]]
    residuals: list[float]
    tolerance: float
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.grid) != len(self.residuals):
            raise ValueError(
                f"grid has {len(self.grid)} points but {len(self.residuals)} residuals"
            )
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        self.residuals = [float(r) for r in self.residuals]

    @property
    def max_residual(self) -> float:
        if not self.residuals:
            return 0.0
        if any(math.isnan(r) for r in self.residuals):
            return math.inf
        return max(self.residuals)

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance

    @property
    def worst_point(self) -> dict[str, Any] | None:
        if not self.residuals:
            return None
        i = max(range(len(self.residuals)), key=lambda j: self.residuals[j])
        return self.grid[i]

    def to_dict(self) -> dict[str, Any]:
        return {
            "identity_id": self.identity_id,
            "grid": plain(self.grid),
            "residuals": list(self.residuals),
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "metadata": plain(self.metadata),
        }

    def to_json_dict(self) -> dict[str, Any]:
        """:meth:`to_dict` with non-finite numbers replaced by ``None``.

        Points whose residual could not be evaluated are listed under ``error``.
        """
        d = finite_only(self.to_dict())
        bad = [i for i, r in enumerate(self.residuals) if not math.isfinite(r)]
        if bad:
            d["error"] = {"nonfinite_residual_indices": bad}
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "VerificationReport":
        return cls(
            identity_id=d["identity_id"],
            grid=list(d["grid"]),
            residuals=[math.inf if r is None else r for r in d["residuals"]],
            tolerance=d["tolerance"],
            metadata=dict(d.get("metadata", {})),
        )

    @classmethod
    def merge(cls, identity_id: str, reports: list["VerificationReport"],
              tolerance: float | None = None) -> "VerificationReport":
        """Concatenate several reports into one, keeping each sub-report's metadata.

        Residuals are rescaled by ``tolerance / r.tolerance`` so that every
        point keeps its pass/fail status under the merged tolerance.
        """
        if tolerance is None:
            tolerance = reports[0].tolerance if reports else 1.0
        grid: list[dict[str, Any]] = []
        residuals: list[float] = []
        meta: dict[str, Any] = {}
        for r in reports:
            grid.extend({"check": r.identity_id, **p} for p in r.grid)
            residuals.extend(x * tolerance / r.tolerance for x in r.residuals)
            if r.metadata:
                # repeated identities (e.g. one per q) keep every metadata block
                meta.setdefault(r.identity_id, []).append(r.metadata)
        meta = {k: v[0] if len(v) == 1 else v for k, v in meta.items()}
        return cls(identity_id, grid, residuals, tolerance, meta)
