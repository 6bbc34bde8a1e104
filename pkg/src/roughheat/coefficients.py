"""Diffusion coefficient specifications and their admissibility checks.

The solver theory needs linear growth, Lipschitz continuity, bounded
derivatives, and a weighted Lipschitz bound on the u-derivative whose
weight grows at spatial infinity.  All checks are numerical, on a finite
sweep: smoothness itself is not machine-checkable and the sweep cannot
exhaust the line, which is documented rather than papered over.  The
coefficient need not vanish at u = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .exceptions import CoefficientError, ValidationError
from .norms import weight_lambda

__all__ = ["SigmaSpec", "eval_sigma", "validate_hypothesis", "HypothesisReport"]

_FD_STEP = 1e-5

_BOUND_KEYS = (
    "growth",
    "lipschitz",
    "du_bound",
    "dx_at_zero",
    "dxu_bound",
    "du_lipschitz_weighted",
)


# floor for bounds that vanish identically; finite differencing cannot
# certify anything below its own rounding noise (~1e-7 at step 1e-5)
_ZERO_FLOOR = 1e-4


def _auto_declared(kind: str, params: dict) -> dict | None:
    z = _ZERO_FLOOR
    if kind == "constant":
        c = abs(params["value"])
        return dict(growth=max(c, z), lipschitz=z, du_bound=z,
                    dx_at_zero=z, dxu_bound=z, du_lipschitz_weighted=z)
    if kind == "affine":
        a, b = abs(params["slope"]), abs(params.get("offset", 0.0))
        return dict(growth=max(a, b, z), lipschitz=max(a, z), du_bound=max(a, z),
                    dx_at_zero=z, dxu_bound=z, du_lipschitz_weighted=z)
    if kind == "offset_sine":
        a, b = abs(params.get("offset", 1.0)), abs(params["amplitude"])
        # the weighted u-Lipschitz modulus picks up the weight's growth on
        # the sweep; 1.5x headroom covers domains up to |x| ~ 100
        return dict(growth=a + b, lipschitz=b, du_bound=b,
                    dx_at_zero=z, dxu_bound=z,
                    du_lipschitz_weighted=1.5 * b)
    return None


@dataclass(frozen=True)
class SigmaSpec:
    """Declared diffusion coefficient with its claimed bound constants.

    kinds: "constant" (value), "affine" (slope, offset),
    "offset_sine" (offset, amplitude), "expression" (expr over t, x, u).
    Expression specs must declare their own bound constants.
    """

    kind: str
    params: dict = dc_field(default_factory=dict)
    declared: dict | None = None
    p0: float | None = None

    def __post_init__(self):
        if self.kind not in ("constant", "affine", "offset_sine", "expression"):
            raise CoefficientError(f"unknown coefficient kind {self.kind!r}")
        if self.declared is None:
            object.__setattr__(self, "declared", _auto_declared(self.kind, self.params))
        if self.declared is not None:
            missing = [k for k in _BOUND_KEYS if k not in self.declared]
            if missing:
                raise CoefficientError(f"declared constants missing {missing}")
            if any(not np.isfinite(v) or v <= 0 for v in self.declared.values()):
                raise CoefficientError("declared constants must be positive and finite")

    @property
    def is_state_independent(self) -> bool:
        return self.kind == "constant"


def eval_sigma(spec: SigmaSpec, t, x, u):
    """Evaluate the coefficient; broadcasts over array arguments."""
    p = spec.params
    if spec.kind == "constant":
        shape = np.broadcast(np.asarray(t), np.asarray(x), np.asarray(u)).shape
        return np.full(shape, float(p["value"]))
    if spec.kind == "affine":
        return p["slope"] * np.asarray(u, dtype=float) + p.get("offset", 0.0)
    if spec.kind == "offset_sine":
        return p.get("offset", 1.0) + p["amplitude"] * np.sin(np.asarray(u, dtype=float))
    try:
        out = eval(  # noqa: S307 - restricted namespace, documented interface
            p["expr"], {"__builtins__": {}},
            {"np": np, "t": t, "x": x, "u": u},
        )
    except Exception as exc:
        raise CoefficientError(f"coefficient expression failed: {exc}") from exc
    out = np.asarray(out, dtype=float)
    if not np.all(np.isfinite(out)):
        raise CoefficientError("coefficient expression produced non-finite values")
    return out


@dataclass
class ConditionCheck:
    name: str
    observed: float
    declared: float
    passed: bool


@dataclass
class HypothesisReport:
    """Outcome of the numerical admissibility sweep."""

    conditions: list
    p0: float
    p0_floor: float
    sweep_note: str

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions) and self.p0 > self.p0_floor

    @property
    def failures(self) -> list:
        out = [c.name for c in self.conditions if not c.passed]
        if self.p0 <= self.p0_floor:
            out.append("p0_admissible")
        return out

    def summary(self) -> str:
        if self.passed:
            return "coefficient admissible on the sweep"
        return "coefficient rejected: " + ", ".join(
            f"{c.name} condition violated (observed {c.observed:.4g} > declared {c.declared:.4g})"
            for c in self.conditions if not c.passed
        ) + ("" if self.p0 > self.p0_floor else f"; p0 = {self.p0} not > {self.p0_floor:.4g}")


def _fd_du(spec, t, x, u, h=_FD_STEP):
    return (eval_sigma(spec, t, x, u + h) - eval_sigma(spec, t, x, u - h)) / (2 * h)


def validate_hypothesis(
    spec: SigmaSpec,
    H: float,
    *,
    T: float = 1.0,
    L: float = 16.0,
    n_x: int = 17,
    u_lim: float = 10.0,
    n_u: int = 41,
) -> HypothesisReport:
    """Check the admissibility inequalities on a finite (t, x, u) sweep.

    Derivatives are central finite differences; the report carries the
    largest observed ratio per condition against the declared constant.
    """
    if spec.declared is None:
        raise ValidationError("expression coefficients must declare their bound constants")
    p0_floor = 6.0 / (4.0 * H - 1.0)
    p0 = spec.p0 if spec.p0 is not None else 1.2 * p0_floor

    ts = np.array([0.0, T / 2, T])
    xs = np.linspace(-L, L, n_x)
    us = np.linspace(-u_lim, u_lim, n_u)
    Tm, Xm, Um = np.meshgrid(ts, xs, us, indexing="ij")

    sig = eval_sigma(spec, Tm, Xm, Um)
    if not np.all(np.isfinite(sig)):
        raise ValidationError("coefficient produced non-finite values on the sweep")
    h = _FD_STEP

    growth = float(np.max(np.abs(sig) / (1.0 + np.abs(Um))))
    du = _fd_du(spec, Tm, Xm, Um)
    if not np.all(np.isfinite(du)):
        raise ValidationError("derivative estimation failed on the sweep")
    du_sup = float(np.max(np.abs(du)))
    dx0 = float(np.max(np.abs(
        (eval_sigma(spec, Tm[..., 0], Xm[..., 0] + h, 0.0)
         - eval_sigma(spec, Tm[..., 0], Xm[..., 0] - h, 0.0)) / (2 * h))))
    dxu = float(np.max(np.abs(
        (eval_sigma(spec, Tm, Xm + h, Um + h) - eval_sigma(spec, Tm, Xm + h, Um - h)
         - eval_sigma(spec, Tm, Xm - h, Um + h) + eval_sigma(spec, Tm, Xm - h, Um - h))
        / (4 * h * h))))

    # weighted u-Lipschitz modulus of the u-derivative, adjacent-node pairs
    lam_w = weight_lambda(xs, H) ** (-1.0 / p0)
    diff = np.abs(np.diff(du, axis=2)) / np.diff(us)[0]
    wlip = float(np.max(lam_w[None, :, None] * diff))

    decl = spec.declared
    tol = 1.0 + 1e-6
    conditions = [
        ConditionCheck("growth", growth, decl["growth"], growth <= tol * decl["growth"]),
        ConditionCheck("lipschitz", du_sup, decl["lipschitz"], du_sup <= tol * decl["lipschitz"]),
        ConditionCheck("du_bound", du_sup, decl["du_bound"], du_sup <= tol * decl["du_bound"]),
        ConditionCheck("dx_at_zero", dx0, decl["dx_at_zero"], dx0 <= tol * decl["dx_at_zero"]),
        ConditionCheck("dxu_bound", dxu, decl["dxu_bound"], dxu <= tol * decl["dxu_bound"]),
        ConditionCheck("du_lipschitz_weighted", wlip, decl["du_lipschitz_weighted"],
                       wlip <= tol * decl["du_lipschitz_weighted"]),
    ]
    note = (f"checked on t in {{0, T/2, T}}, {n_x} x-points on [-{L}, {L}], "
            f"{n_u} u-points on [-{u_lim}, {u_lim}]; smoothness class not machine-checkable")
    return HypothesisReport(conditions, float(p0), float(p0_floor), note)
