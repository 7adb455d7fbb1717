"""Explicit time integration of the mode ODE system and trajectory recording."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scheme import SchemeConfig, SpectralState, make_rhs
from .spectral import PeriodicGrid, SpectralField, eval_many

__all__ = ["BlowUpError", "Trajectory", "rk4_step", "simulate", "reconstruct"]

# any coefficient beyond this magnitude is treated as a blow-up, not roundoff
BLOWUP_MAGNITUDE = 1e12


class BlowUpError(RuntimeError):
    """Integration produced non-finite or runaway coefficients.

    Attributes
    ----------
    time : float
        Time at which the failed step started.
    trajectory : Trajectory or None
        Snapshots recorded before the failure (attached by `simulate`).
    """

    def __init__(self, time: float, message: str | None = None):
        super().__init__(message or f"blow-up detected at t = {time:.6g}")
        self.time = time
        self.trajectory = None


def _check_finite(state: SpectralState, t_from: float) -> SpectralState:
    bad = not (
        np.all(np.isfinite(state.u_hat))
        and np.all(np.isfinite(state.v_hat))
    )
    if not bad:
        mag = max(
            np.max(np.abs(state.u_hat.real)) + np.max(np.abs(state.u_hat.imag)),
            np.max(np.abs(state.v_hat.real)) + np.max(np.abs(state.v_hat.imag)),
        )
        bad = mag > BLOWUP_MAGNITUDE
    if bad:
        raise BlowUpError(t_from)
    return state


def rk4_step(state: SpectralState, dt: float, rhs_fn) -> SpectralState:
    """One classical four-stage Runge-Kutta step of (U_hat, V_hat)."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    t, u, v = state.t, state.u_hat, state.v_hat
    du1, dv1 = rhs_fn(state)
    s2 = SpectralState(t + dt / 2, u + (dt / 2) * du1, v + (dt / 2) * dv1)
    du2, dv2 = rhs_fn(s2)
    s3 = SpectralState(t + dt / 2, u + (dt / 2) * du2, v + (dt / 2) * dv2)
    du3, dv3 = rhs_fn(s3)
    s4 = SpectralState(t + dt, u + dt * du3, v + dt * dv3)
    du4, dv4 = rhs_fn(s4)
    new = SpectralState(
        t + dt,
        u + (dt / 6) * (du1 + 2 * du2 + 2 * du3 + du4),
        v + (dt / 6) * (dv1 + 2 * dv2 + 2 * dv3 + dv4),
    )
    return _check_finite(new, t)


@dataclass(frozen=True)
class Trajectory:
    """Recorded snapshots of one integration."""

    times: np.ndarray
    states: tuple
    config: SchemeConfig

    def __post_init__(self) -> None:
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        object.__setattr__(self, "states", tuple(self.states))

    def __len__(self) -> int:
        return len(self.states)

    @property
    def grid(self) -> PeriodicGrid:
        return self.config.grid()

    @property
    def final(self) -> SpectralState:
        return self.states[-1]


def simulate(
    config: SchemeConfig,
    initial: SpectralState,
    snapshot_times,
) -> Trajectory:
    """Fixed-step RK4 march recording the state at each snapshot time.

    The step is shortened just before a snapshot so every snapshot lands
    exactly (no interpolation enters reported errors).  A blow-up raises
    `BlowUpError` with the partial trajectory attached.
    """
    snapshot_times = np.asarray(snapshot_times, dtype=float)
    if snapshot_times.size == 0:
        raise ValueError("need at least one snapshot time")
    if np.any(np.diff(snapshot_times) <= 0):
        raise ValueError("snapshot times must be strictly increasing")
    if snapshot_times[0] < initial.t - 1e-12:
        raise ValueError("first snapshot precedes the initial time")
    if snapshot_times[-1] > config.t_final + 1e-9:
        raise ValueError("snapshot beyond t_final")

    grid = config.grid()
    if initial.n_modes != grid.size:
        raise ValueError("initial state size does not match config grid")
    rhs_fn = make_rhs(grid, config.profile(), convolution=config.convolution)
    dt = config.dt

    state = initial
    recorded: list[SpectralState] = []
    times: list[float] = []
    try:
        for target in snapshot_times:
            span = target - state.t
            if span > 1e-12 * max(1.0, target):
                n_full = int(np.floor(span / dt + 1e-9))
                base_t = state.t
                for i in range(n_full):
                    state = rk4_step(state, dt, rhs_fn)
                    # carry time as an exact linear sequence to avoid drift
                    state = SpectralState(
                        base_t + (i + 1) * dt, state.u_hat, state.v_hat
                    )
                rem = target - state.t
                if rem > 1e-9 * max(1.0, target):
                    state = rk4_step(state, rem, rhs_fn)
                state = SpectralState(target, state.u_hat, state.v_hat)
            recorded.append(state)
            times.append(target)
    except BlowUpError as err:
        err.trajectory = Trajectory(np.asarray(times), tuple(recorded), config)
        raise
    return Trajectory(np.asarray(times), tuple(recorded), config)


def reconstruct(state: SpectralState, sample_points, grid: PeriodicGrid) -> np.ndarray:
    """Physical-space solution U(x, t) at arbitrary sample points."""
    F = SpectralField(grid, state.u_hat)
    return eval_many(F, np.asarray(sample_points, dtype=float))
