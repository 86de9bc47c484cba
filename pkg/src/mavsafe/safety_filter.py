"""Minimally-deviating reference filter under a linearized barrier constraint.

Given a signed distance field h over the map, the vehicle radius offset
h_eff = h - robot_radius, and the one-step closed loop x+ = A x + B u + w
with ||w|| <= eps, the per-step safety condition h_eff(x+) - h_eff(x) >=
alpha * h_eff(x) is linearized at the current estimate into a single
halfspace constraint on the reference:

    C u >= c1 + c2,  C = grad_h^T B,
    c1 = grad_h^T (I - A) x + alpha * h_eff,  c2 = ||grad_h|| * eps.

alpha = -p1 (shallow decrease allowed toward the boundary) when h_eff >= 0,
and +p2 (strict recovery) when unsafe. The filtered reference is the closest
point to the operator's reference inside that halfspace, which has a closed
form; a generic KKT solver is kept as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from mavsafe.mav_model import ClosedLoopModel
from mavsafe.tesdf import TesdfField, query


@dataclass(frozen=True)
class FilterParams:
    p1: float = 0.45
    p2: float = 1e-3
    eps: float = 0.1
    robot_radius: float = 0.3
    grad_epsilon: float = 1e-6

    def __post_init__(self):
        if not 0.0 < self.p1 <= 1.0:
            raise ValueError("p1 must lie in (0, 1]")
        if self.p2 <= 0.0:
            raise ValueError("p2 must be positive")
        if self.eps < 0.0:
            raise ValueError("robustness bound must be non-negative")
        if self.robot_radius < 0.0:
            raise ValueError("robot radius must be non-negative")
        if self.grad_epsilon <= 0.0:
            raise ValueError("gradient threshold must be positive")


@dataclass(frozen=True)
class CbfConstraint:
    """One linear halfspace C u >= c1 + c2 plus the context that built it."""

    C: np.ndarray
    c1: float
    c2: float
    alpha: float
    h_eff: float
    x_est: np.ndarray
    degraded: bool = False


class FilterStatus(Enum):
    PASS_THROUGH = "pass_through"
    PROJECTED = "projected"
    DEGENERATE_GRADIENT = "degenerate_gradient"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class FilterResult:
    u_filtered: np.ndarray
    correction: np.ndarray
    status: FilterStatus


def build_constraint(
    x_est,
    field: TesdfField,
    model: ClosedLoopModel,
    params: FilterParams,
    grad_step: float | None = None,
) -> CbfConstraint:
    """Assemble the halfspace constraint at the current state estimate."""
    x_est = np.asarray(x_est, dtype=float)
    q = query(field, x_est, step=grad_step)
    h_eff = q.value - params.robot_radius
    alpha = -params.p1 if h_eff >= 0.0 else params.p2
    grad = q.gradient
    c = grad @ model.B
    c1 = float(grad @ ((np.eye(3) - model.A) @ x_est) + alpha * h_eff)
    c2 = float(np.linalg.norm(grad) * params.eps)
    return CbfConstraint(C=c, c1=c1, c2=c2, alpha=alpha, h_eff=float(h_eff),
                         x_est=x_est, degraded=q.degraded)


def filter_reference(u_teleop, constraint: CbfConstraint,
                     params: FilterParams) -> FilterResult:
    """Closest reference to the operator's inside the constraint halfspace.

    Degenerate constraints (gradient below grad_epsilon, e.g. distance-field
    plateaus) pass the reference through when the halfspace is vacuous and
    otherwise hold position; a degraded field query with no usable gradient
    also holds position.
    """
    u_teleop = np.asarray(u_teleop, dtype=float)
    if u_teleop.shape != (3,) or not np.all(np.isfinite(u_teleop)):
        raise ValueError("reference must be a finite 3-vector")

    c = constraint.C
    rhs = constraint.c1 + constraint.c2
    norm_c = np.linalg.norm(c)

    if norm_c < params.grad_epsilon:
        if constraint.degraded:
            u = constraint.x_est.copy()
            return FilterResult(u, u - u_teleop, FilterStatus.DEGENERATE_GRADIENT)
        if rhs <= 0.0:
            return FilterResult(u_teleop.copy(), np.zeros(3), FilterStatus.PASS_THROUGH)
        u = constraint.x_est.copy()
        return FilterResult(u, u - u_teleop, FilterStatus.INFEASIBLE)

    slack = float(c @ u_teleop) - rhs
    if slack >= 0.0:
        return FilterResult(u_teleop.copy(), np.zeros(3), FilterStatus.PASS_THROUGH)

    correction = (-slack / (norm_c * norm_c)) * c
    return FilterResult(u_teleop + correction, correction, FilterStatus.PROJECTED)


def filter_qp_oracle(u_teleop, constraint: CbfConstraint) -> np.ndarray:
    """Reference solver for min ||u - u_teleop||^2 s.t. C u >= c1 + c2.

    Enumerates the two KKT cases (constraint inactive, constraint active
    with a dense linear solve) instead of reusing the projection formula,
    so it can catch errors in the closed form. Test use only.
    """
    u_teleop = np.asarray(u_teleop, dtype=float)
    c = np.asarray(constraint.C, dtype=float)
    rhs = constraint.c1 + constraint.c2
    if np.linalg.norm(c) < 1e-12:
        raise ValueError("oracle requires a well-posed constraint direction")

    if c @ u_teleop >= rhs:
        return u_teleop.copy()

    # Active constraint: stationarity 2(u - u_teleop) = lambda * C^T with
    # C u = rhs, solved as one dense KKT system.
    kkt = np.zeros((4, 4))
    kkt[:3, :3] = 2.0 * np.eye(3)
    kkt[:3, 3] = -c
    kkt[3, :3] = c
    sol = np.linalg.solve(kkt, np.concatenate([2.0 * u_teleop, [rhs]]))
    return sol[:3]
