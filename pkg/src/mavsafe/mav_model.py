"""Closed-loop vehicle model at the filter rate.

The tracking controller and inner-loop dynamics are abstracted into one
discrete-time linear map per filter period: x_{k+1} = A x_k + B u_k + w_k,
where u_k is the position reference handed to the tracker and w_k is
process noise drawn uniformly from the ball of radius eps_true. Uniform-ball
noise keeps the bound ||w_k|| <= eps_true exact, which is the assumption the
robust constraint margin is built on.

Perfect tracking (A = 0, B = I) is the default; a first-order lag preset is
provided for the non-ideal case.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class MavState:
    position: np.ndarray
    k: int = 0

    def __post_init__(self):
        p = np.asarray(self.position, dtype=float)
        if p.shape != (3,) or not np.all(np.isfinite(p)):
            raise ValueError("position must be a finite 3-vector")
        object.__setattr__(self, "position", p)


@dataclass
class ClosedLoopModel:
    """One-step linear closed loop; owns its noise streams."""

    A: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    B: np.ndarray = field(default_factory=lambda: np.eye(3))
    eps_true: float = 0.0
    step_dt: float = 1.0 / 6.0
    # Either an integer or a numpy SeedSequence (for callers that manage
    # stream independence themselves).
    seed: object = 0

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.B = np.asarray(self.B, dtype=float)
        if self.A.shape != (3, 3) or self.B.shape != (3, 3):
            raise ValueError("A and B must be 3x3")
        if not (np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.B))):
            raise ValueError("A and B must be finite")
        if np.max(np.abs(np.linalg.eigvals(self.A))) >= 1.0:
            raise ValueError("A must have spectral radius < 1")
        if self.eps_true < 0:
            raise ValueError("noise bound must be non-negative")
        if self.step_dt <= 0:
            raise ValueError("step period must be positive")
        self.reset_rng()

    def reset_rng(self) -> None:
        """Rewind both noise streams to the start of the seed schedule."""
        seq = self.seed
        if not isinstance(seq, np.random.SeedSequence):
            seq = np.random.SeedSequence(seq)
        process_seq, estimate_seq = seq.spawn(2)
        self._rng_process = np.random.default_rng(process_seq)
        self._rng_estimate = np.random.default_rng(estimate_seq)

    @classmethod
    def perfect_tracking(cls, eps_true: float = 0.0, seed: int = 0) -> "ClosedLoopModel":
        return cls(eps_true=eps_true, seed=seed)

    @classmethod
    def first_order_lag(cls, pole: float = 0.5, eps_true: float = 0.0,
                        seed: int = 0) -> "ClosedLoopModel":
        """x_{k+1} = pole*x_k + (1-pole)*u_k, stable for pole in [0, 1)."""
        if not 0.0 <= pole < 1.0:
            raise ValueError("pole must lie in [0, 1)")
        return cls(A=pole * np.eye(3), B=(1.0 - pole) * np.eye(3),
                   eps_true=eps_true, seed=seed)


def _ball_sample(rng: np.random.Generator, radius: float) -> np.ndarray:
    if radius == 0.0:
        return np.zeros(3)
    direction = rng.standard_normal(3)
    norm = np.linalg.norm(direction)
    while norm == 0.0:
        direction = rng.standard_normal(3)
        norm = np.linalg.norm(direction)
    return direction / norm * radius * rng.random() ** (1.0 / 3.0)


def step(model: ClosedLoopModel, state: MavState, u) -> MavState:
    """Advance one filter period under reference ``u``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (3,) or not np.all(np.isfinite(u)):
        raise ValueError("reference must be a finite 3-vector")
    w = _ball_sample(model._rng_process, model.eps_true)
    x_next = model.A @ state.position + model.B @ u + w
    return MavState(position=x_next, k=state.k + 1)


def estimate(model: ClosedLoopModel, state: MavState, sigma_est: float = 0.0) -> np.ndarray:
    """Noisy position estimate; the error norm is clipped to 3*sigma_est."""
    if sigma_est < 0:
        raise ValueError("estimate noise must be non-negative")
    if sigma_est == 0.0:
        return state.position.copy()
    noise = sigma_est * model._rng_estimate.standard_normal(3)
    norm = np.linalg.norm(noise)
    bound = 3.0 * sigma_est
    if norm > bound:
        noise *= bound / norm
    return state.position + noise
