"""Long-time asymptotic ingredients.

Sectors of the similarity variable zeta = x/t carry different leading
behavior.  This module evaluates, from the scattering data of the initial
profile:

* the dispersive amplitude A2(zeta) active on 0 < zeta < 1 (the left-moving
  wave component shared by both inner sectors);
* the soliton-induced phase shifts built from the rational factor P(k);
* the unit-circle integral delta(zeta, k) and the combination
  Delta33(zeta, k) entering the soliton's position shift;
* the Sector II (zeta > 1) soliton asymptote
  u_sol(x, t) = A0 sech^2(sqrt(A0/6)(x - c0 t) - ln f(zeta)) with
  A0 = (3/8)(k0 - 1/k0)^2 and c0 = (k0 + 1/k0)/2.

The endpoint k1(zeta) of the circle arc in delta is not fixed here: it must
come from the companion asymptotic analysis and every entry point takes it
as an input.  `unit_circle_saddle` provides the natural candidate (the
stationary point of the plane-wave phase on the upper circle), which also
turns out to be the unique choice rendering f(zeta)^2 real positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .scattering import (
    OMEGA,
    DataConsistencyError,
    PotentialSampler,
    _march,
)
from .waves import sech2

__all__ = [
    "BranchError",
    "SymmetryError",
    "SectorPoint",
    "SolitonAsymptote",
    "ArcReflection",
    "sector_point",
    "rtilde",
    "unit_circle_saddle",
    "nu2_hat",
    "amplitude_A2",
    "amplitude_A2_sweep",
    "phase_shift",
    "delta_integral",
    "delta33_hat",
    "soliton_asymptote",
]

_SQRT3 = np.sqrt(3.0)


class BranchError(RuntimeError):
    """The square-root branch condition could not be satisfied."""


class SymmetryError(RuntimeError):
    """A quantity that must be real (by conjugation symmetry) is not."""


@dataclass(frozen=True)
class SectorPoint:
    """Saddle data at one zeta: the circle point k2, the real point k4, and
    the phase curvature z2_star with its branch fixed by -i w^2 k2 z2_star > 0."""

    zeta: float
    k2: complex
    k4: complex
    z2_star: complex


def sector_point(zeta: float, *, branch_tol: float = 1e-8) -> SectorPoint:
    """Evaluate k2, k4, z2_star at zeta.

    k2 lies on the unit circle for 0 < zeta < 1 (and continues smoothly
    beyond); k4 is real for zeta > 1 and moves onto the circle below it.
    """
    z = float(zeta)
    r = np.sqrt(8.0 + z * z)
    inner2 = 4.0 - z * z + z * r        # positive for all zeta > 0
    k2 = 0.25 * (z - r - 1j * np.sqrt(2.0) * np.sqrt(inner2))
    inner4 = complex(-4.0 + z * z + z * r)
    k4 = 0.25 * (z + r - np.sqrt(2.0) * np.sqrt(inner4))

    w = -(OMEGA**2) * (4.0 - 3.0 * k2 * z - k2**3 * z) / (4.0 * k2**4)
    z2s = np.sqrt(2.0) * np.exp(1j * np.pi / 4.0) * np.sqrt(w)
    sel = -1j * OMEGA**2 * k2 * z2s
    if sel.real < 0.0:
        z2s = -z2s
        sel = -sel
    if abs(sel.imag) > branch_tol * abs(sel) or sel.real <= 0.0:
        raise BranchError(
            f"-i w^2 k2 z2_star = {sel:.6g} is not real positive at zeta = {z}"
        )
    return SectorPoint(zeta=z, k2=complex(k2), k4=complex(k4), z2_star=complex(z2s))


def rtilde(k) -> complex:
    """The rational reflection factor (w^2 - k^2) / (1 - w^2 k^2)."""
    k = complex(k)
    denom = 1.0 - OMEGA**2 * k * k
    if abs(denom) < 1e-12:
        raise ZeroDivisionError(f"rtilde pole at k = {k}")
    return (OMEGA**2 - k * k) / denom


def unit_circle_saddle(zeta: float, *, upper: bool = True) -> complex:
    """Stationary point of the plane-wave phase on the unit circle.

    The phase (l2 - l1)x + (z2 - z1)t is stationary where
    k^4 - zeta k^3 - zeta k + 1 = 0; two of the four roots sit on the unit
    circle for every zeta > 0.  The upper-half one is the candidate arc
    endpoint k1(zeta) for the Sector II position shift.
    """
    z = float(zeta)
    r = np.sqrt(8.0 + z * z)
    im = np.sqrt(2.0) * np.sqrt(4.0 - z * z + z * r)
    k = 0.25 * (z - r + 1j * im)
    return complex(k if upper else np.conj(k))


# ---------------------------------------------------------------------------
# dispersive amplitude
# ---------------------------------------------------------------------------

class _CircleCache:
    """Memoized s_11 and r_1 at unit-circle points (batched marches)."""

    def __init__(self, p: PotentialSampler, step: float = 0.0125):
        self.p = p
        self.step = step
        self._data: dict[complex, tuple] = {}

    def prefetch(self, ks):
        ks = [complex(k) for k in ks if complex(k) not in self._data]
        if not ks:
            return
        res = _march(
            np.array(ks), self.p, columns=(0, 1), backward=True,
            step=self.step, entries=((0, 0), (0, 1)),
        )
        s11 = res.s_entries[(0, 0)]
        s12 = res.s_entries[(0, 1)]
        for i, k in enumerate(ks):
            self._data[k] = (complex(s11[i]), complex(s12[i]))

    def s11(self, k) -> complex:
        self.prefetch([k])
        return self._data[complex(k)][0]

    def r1(self, k) -> complex:
        self.prefetch([k])
        s11, s12 = self._data[complex(k)]
        if abs(s11) < 1e-12:
            raise DataConsistencyError(f"s_11 vanishes at k = {k}; r_1 undefined")
        return s12 / s11


def nu2_hat(
    zeta: float,
    p: PotentialSampler,
    *,
    cache: _CircleCache | None = None,
    clip_tol: float = 1e-10,
) -> float:
    """Dispersive weight -(1/2pi) ln[(1 + rt |r1|^2)|s11|^2(w^2 k2) / |s11|^2(w k2)].

    Nonnegative for admissible data; tiny negatives (within clip_tol) are
    clipped to zero, anything worse raises.
    """
    sp = sector_point(zeta)
    cache = cache or _CircleCache(p)
    ka = OMEGA * sp.k2
    kb = OMEGA**2 * sp.k2
    cache.prefetch([ka, kb])
    rt = rtilde(kb)
    if abs(rt.imag) > 1e-8 * max(1.0, abs(rt)):
        raise SymmetryError(f"rtilde not real on the circle at {kb:.6g}: {rt:.3e}")
    bracket = (
        (1.0 + rt.real * abs(cache.r1(kb)) ** 2)
        * abs(cache.s11(kb)) ** 2
        / abs(cache.s11(ka)) ** 2
    )
    if bracket <= 0.0:
        raise DataConsistencyError(
            f"nonpositive argument {bracket:.3e} in nu2_hat at zeta = {zeta}"
        )
    val = -np.log(bracket) / (2.0 * np.pi)
    if val < -clip_tol:
        raise DataConsistencyError(
            f"nu2_hat = {val:.3e} < 0 at zeta = {zeta}; data inconsistent"
        )
    return max(val, 0.0)


def amplitude_A2(
    zeta: float,
    p: PotentialSampler,
    *,
    cache: _CircleCache | None = None,
) -> float:
    """Left-moving dispersive amplitude A2(zeta) on 0 < zeta < 1."""
    sp = sector_point(zeta)
    nu = nu2_hat(zeta, p, cache=cache)
    denom = (-1j * OMEGA**2 * sp.k2 * sp.z2_star).real
    num = (
        -4.0
        * _SQRT3
        * np.sqrt(nu)
        * np.sqrt(abs(rtilde(1.0 / sp.k2)))
        * sp.k2.imag
    )
    return float(num / denom * np.sin(np.angle(OMEGA**2 * sp.k2)))


def amplitude_A2_sweep(zetas, p: PotentialSampler, *, step: float = 0.0125):
    """A2 on a zeta grid with one batched scattering solve for all points."""
    cache = _CircleCache(p, step=step)
    pts = []
    for z in zetas:
        k2 = sector_point(z).k2
        pts.extend([OMEGA * k2, OMEGA**2 * k2])
    cache.prefetch(pts)
    return np.array([amplitude_A2(z, p, cache=cache) for z in zetas]), cache


# ---------------------------------------------------------------------------
# phase shifts
# ---------------------------------------------------------------------------

def _rational_P(k: complex, k0: float) -> complex:
    num = (k - OMEGA**2 * k0) * (k - OMEGA / k0)
    den = (k - OMEGA * k0) * (k - OMEGA**2 / k0)
    if abs(den) < 1e-10 or abs(num) < 1e-10:
        raise ZeroDivisionError(f"phase-shift factor at a pole/zero: k = {k}")
    return num / den


def phase_shift(k: complex, k0: float | None, moving: str = "right") -> float:
    """Soliton-induced phase shift of the dispersive cosines, in (-pi, pi].

    moving="right" gives arg P(w k)/P(w^2 k) (evaluate at k4); "left" gives
    arg P(w^2 k)/P(w k) (evaluate at k2).  Without a soliton (k0 None) the
    factor is identically one and the shift vanishes.
    """
    if k0 is None:
        return 0.0
    if moving == "right":
        val = _rational_P(OMEGA * k, k0) / _rational_P(OMEGA**2 * k, k0)
    elif moving == "left":
        val = _rational_P(OMEGA**2 * k, k0) / _rational_P(OMEGA * k, k0)
    else:
        raise ValueError(f"moving must be 'right' or 'left', got {moving!r}")
    return float(np.angle(val))


# ---------------------------------------------------------------------------
# arc data and the delta integral
# ---------------------------------------------------------------------------

class ArcReflection:
    """ln(1 + rtilde |r1|^2) on the upper unit-circle arc, splined from
    batched scattering solves.

    The arc approaches the exponent-degenerate point w = e^{2 pi i/3} as
    zeta -> 1+, where rtilde vanishes linearly; the grid is refined toward
    that endpoint and anchored with g(2pi/3) = 0.
    """

    THETA_MIN = np.pi / 2

    def __init__(
        self,
        p: PotentialSampler,
        *,
        theta_max: float = 2.0 * np.pi / 3,
        n_coarse: int = 120,
        step: float = 0.0125,
        near_step: float = 0.004,
    ):
        self.p = p
        lim = 2.0 * np.pi / 3 - 4e-4      # keep clear of the degenerate point
        theta_cap = min(theta_max, lim)
        coarse = np.linspace(self.THETA_MIN, min(theta_cap, lim - 8e-3), n_coarse)
        near = lim - np.geomspace(8e-3, 1e-6, 24) if theta_cap > lim - 8e-3 else []
        thetas = np.unique(np.concatenate([coarse, near, [lim]]))
        g_far = self._g_values(thetas[thetas <= lim - 8e-3 + 1e-12], step)
        near_thetas = thetas[thetas > lim - 8e-3 + 1e-12]
        g_near = self._g_values(near_thetas, near_step) if len(near_thetas) else []
        g = np.concatenate([g_far, g_near])
        if theta_max > lim:
            # rtilde vanishes linearly at w, so g does too; anchor the spline
            thetas = np.append(thetas, 2.0 * np.pi / 3)
            g = np.append(g, 0.0)
        self.thetas = thetas
        self.g = g
        self.spline = CubicSpline(thetas, g)
        self.theta_max = float(thetas[-1])

    def _g_values(self, thetas, step):
        if len(thetas) == 0:
            return np.array([])
        ks = np.exp(1j * np.asarray(thetas))
        res = _march(
            ks, self.p, columns=(0, 1), backward=True, step=step,
            entries=((0, 0), (0, 1)),
        )
        s11 = res.s_entries[(0, 0)]
        s12 = res.s_entries[(0, 1)]
        r1sq = np.abs(s12 / s11) ** 2
        rt = np.array([rtilde(k).real for k in ks])
        arg = 1.0 + rt * r1sq
        if np.any(arg <= 0.0):
            raise DataConsistencyError("nonpositive log argument on the arc")
        return np.log(arg)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        if np.any(theta < self.THETA_MIN - 1e-12) or np.any(
            theta > self.theta_max + 1e-12
        ):
            raise ValueError("theta outside the tabulated arc")
        return self.spline(np.clip(theta, self.THETA_MIN, self.theta_max))


def delta_integral(
    zeta: float,
    k: complex,
    k1: complex,
    p_or_arc,
    *,
    nodes_per_quarter: int = 64,
    tol: float = 1e-9,
    max_doublings: int = 4,
) -> complex:
    """delta(zeta, k) = exp{ -(1/2 pi i) int_i^{k1} ln(1 + rt |r1|^2)/(s - k) ds }
    with the path running counterclockwise along the unit circle.

    k1 is supplied by the caller (its formula lives in the companion
    analysis); `unit_circle_saddle` provides the standard choice.  The
    quadrature is angle-parameterized composite Gauss-Legendre, doubled
    until the exponent is stable to `tol`.
    """
    if abs(abs(k1) - 1.0) > 1e-8:
        raise ValueError(f"k1 = {k1} must lie on the unit circle")
    arc = p_or_arc if isinstance(p_or_arc, ArcReflection) else ArcReflection(
        p_or_arc, theta_max=float(np.angle(k1))
    )
    theta1 = float(np.angle(k1))
    if theta1 < 0:
        theta1 += 2.0 * np.pi
    theta0 = ArcReflection.THETA_MIN
    if abs(theta1 - theta0) < 1e-14:
        return 1.0 + 0.0j
    if theta1 > arc.theta_max + 1e-10 or theta1 < theta0:
        raise ValueError(
            f"arc endpoint angle {theta1:.6f} outside tabulated range "
            f"[{theta0:.6f}, {arc.theta_max:.6f}]"
        )

    span = theta1 - theta0
    n_panels = max(1, int(np.ceil(span / (np.pi / 2))))
    prev = None
    npq = nodes_per_quarter
    for _ in range(max_doublings + 1):
        base, wts = np.polynomial.legendre.leggauss(npq)
        total = 0.0 + 0.0j
        for ip in range(n_panels):
            a = theta0 + span * ip / n_panels
            b = theta0 + span * (ip + 1) / n_panels
            th = 0.5 * (b - a) * base + 0.5 * (a + b)
            s = np.exp(1j * th)
            vals = arc(th) * (1j * s) / (s - k)
            total += 0.5 * (b - a) * np.sum(wts * vals)
        if prev is not None and abs(total - prev) < tol:
            break
        prev = total
        npq *= 2
    return np.exp(-total / (2.0j * np.pi))


def delta33_hat(zeta: float, k: complex, k1: complex, arc: ArcReflection) -> complex:
    """Delta33(zeta,k) = [d(w k)/d(w^2 k)] [d(1/(w^2 k))/d(1/(w k))]."""
    d = lambda kk: delta_integral(zeta, kk, k1, arc)
    return (
        d(OMEGA * k)
        / d(OMEGA**2 * k)
        * d(1.0 / (OMEGA**2 * k))
        / d(1.0 / (OMEGA * k))
    )


# ---------------------------------------------------------------------------
# the Sector II soliton asymptote
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolitonAsymptote:
    """Emergent-soliton parameters and the position-shift function ln f."""

    k0: float
    A0: float
    c0: float
    zeta_grid: np.ndarray
    ln_f_values: np.ndarray
    max_f2_imag: float
    phase_defect: float
    _ln_f: object = field(repr=False)

    def ln_f(self, zeta):
        """Position shift at zeta (clamped to the tabulated range; outside
        it the sech^2 envelope is negligible anyway)."""
        z = np.clip(np.asarray(zeta, dtype=float),
                    self.zeta_grid[0], self.zeta_grid[-1])
        return self._ln_f(z)

    @property
    def x_offset(self) -> float:
        """Asymptotic soliton center offset sqrt(6/A0) ln f(c0)."""
        return float(np.sqrt(6.0 / self.A0) * self.ln_f(self.c0))

    def u_sol(self, x, t):
        """Leading Sector II term A0 sech^2(sqrt(A0/6)(x - c0 t) - ln f(x/t))."""
        x = np.asarray(x, dtype=float)
        shift = self.ln_f(x / t) if t != 0 else self.ln_f(self.c0)
        arg = np.sqrt(self.A0 / 6.0) * (x - self.c0 * t) - shift
        return self.A0 * sech2(arg)

    def u_sol_frozen(self, x, t):
        """Same with the shift frozen at zeta = c0 (the t -> infinity form)."""
        arg = np.sqrt(self.A0 / 6.0) * (x - self.c0 * t) - self.ln_f(self.c0)
        return self.A0 * sech2(arg)


def soliton_asymptote(
    p: PotentialSampler,
    k0: float,
    c_k0: complex,
    k1_provider,
    *,
    zeta_grid=None,
    f2_imag_tol: float = 1e-6,
    arc: ArcReflection | None = None,
) -> SolitonAsymptote:
    """Assemble the Sector II soliton asymptote from the scattering data.

    k1_provider maps zeta to the circle arc endpoint (see module docstring).
    f(zeta)^2 must come out real positive; violations above `f2_imag_tol`
    (relative) raise SymmetryError, signalling an upstream inconsistency.

    The combination i w^2 (k0^2 - w^2) c_{k0} is exactly real nonnegative,
    so the numerically computed c_k0 is first projected onto that ray; the
    discarded phase (reported as `phase_defect` and bounded by 1e-4) is the
    norming constant's numerical phase error plus the admissibility leak of
    the data, and would otherwise masquerade as an f^2 asymmetry.
    """
    A0 = 0.375 * (k0 - 1.0 / k0) ** 2
    c0 = 0.5 * (k0 + 1.0 / k0)
    if zeta_grid is None:
        zeta_grid = np.concatenate(
            [np.linspace(1.001, 1.12, 25), np.linspace(1.14, 2.0, 12)]
        )
    zeta_grid = np.asarray(zeta_grid, dtype=float)
    if arc is None:
        theta_need = max(float(np.angle(k1_provider(z))) for z in zeta_grid)
        arc = ArcReflection(p, theta_max=theta_need)

    positivity = 1j * OMEGA**2 * (k0**2 - OMEGA**2) * c_k0
    phase_defect = abs(np.angle(positivity))
    if phase_defect > 1e-4:
        raise SymmetryError(
            f"i w^2 (k0^2 - w^2) c_k0 = {positivity:.6g} is far from the "
            f"positive real axis (phase {phase_defect:.2e})"
        )
    pref = abs(positivity) / (_SQRT3 * k0 * (k0**2 - 1.0))
    ln_f = np.empty_like(zeta_grid)
    worst_imag = 0.0
    for i, z in enumerate(zeta_grid):
        k1 = k1_provider(z)
        ratio = delta33_hat(z, OMEGA**2 * k0, k1, arc) / delta33_hat(
            z, OMEGA * k0, k1, arc
        )
        f2 = pref * ratio
        rel_imag = abs(f2.imag) / max(abs(f2), 1e-300)
        worst_imag = max(worst_imag, rel_imag)
        if rel_imag > f2_imag_tol:
            raise SymmetryError(
                f"f(zeta)^2 = {f2:.6g} not real at zeta = {z:.4f} "
                f"(relative imaginary part {rel_imag:.2e}); check k1 and the "
                f"scattering inputs"
            )
        if f2.real <= 0.0:
            raise SymmetryError(f"f(zeta)^2 = {f2:.6g} not positive at zeta = {z:.4f}")
        ln_f[i] = 0.5 * np.log(f2.real)
    spline = CubicSpline(zeta_grid, ln_f)
    return SolitonAsymptote(
        k0=float(k0),
        A0=float(A0),
        c0=float(c0),
        zeta_grid=zeta_grid,
        ln_f_values=ln_f,
        max_f2_imag=worst_imag,
        phase_defect=phase_defect,
        _ln_f=spline,
    )
