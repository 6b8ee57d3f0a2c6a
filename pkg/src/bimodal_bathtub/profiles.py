"""Breakpointed analytic time profiles.

Every equilibrium trajectory in this package (accumulation, occupancy,
speeds, arrival rates, queue, boundary wait) is piecewise analytic in time,
built from a small vocabulary of segment shapes. During a congested spell
the natural coordinate is u(t) = 1 + k*(t - t_ref) on the early side or
u(t) = 1 + k*(t_ref - t) on the late side; accumulation, speed and flow are
all simple rational functions of u. Profiles evaluate to 0 outside their
breakpoint span.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConstantSeg:
    value: float

    def __call__(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.value)


@dataclass(frozen=True)
class LinearSeg:
    """value_at_anchor + slope * (t - anchor)."""

    anchor: float
    value_at_anchor: float
    slope: float

    def __call__(self, t):
        return self.value_at_anchor + self.slope * (np.asarray(t, dtype=float) - self.anchor)


class _CongestedSeg:
    """Base for segments expressed in u(t) = 1 + k*sign*(t - t_ref), k > 0."""

    def _u(self, t):
        return 1.0 + self.k * self.sign * (np.asarray(t, dtype=float) - self.t_ref)


@dataclass(frozen=True)
class AccumSeg(_CongestedSeg):
    """Car accumulation during a congested spell: n_max * (1 - 1/u)."""

    n_max: float
    k: float
    t_ref: float
    sign: float

    def __call__(self, t):
        return self.n_max * (1.0 - 1.0 / self._u(t))


@dataclass(frozen=True)
class ReciprocalSeg(_CongestedSeg):
    """Speed during a congested spell: c0 / u."""

    c0: float
    k: float
    t_ref: float
    sign: float

    def __call__(self, t):
        return self.c0 / self._u(t)


@dataclass(frozen=True)
class ExitSeg(_CongestedSeg):
    """Trip-completion rate during a congested spell: c0 * (1/u - 1/u**2)."""

    c0: float
    k: float
    t_ref: float
    sign: float

    def __call__(self, t):
        u = self._u(t)
        return self.c0 * (1.0 / u - 1.0 / u**2)


@dataclass(frozen=True)
class FrtArrivalSeg(_CongestedSeg):
    """Transit passenger arrival rate during a congested spell: a0/u - b0."""

    a0: float
    b0: float
    k: float
    t_ref: float
    sign: float

    def __call__(self, t):
        return self.a0 / self._u(t) - self.b0


@dataclass(frozen=True)
class PiecewiseProfile:
    """Strictly increasing breakpoints with one analytic segment between each pair.

    Evaluation is 0 outside [breakpoints[0], breakpoints[-1]]. At an interior
    breakpoint the right-hand segment wins; the profiles built by the solvers
    are continuous there, so the choice is immaterial for them.
    """

    breakpoints: tuple
    segments: tuple

    def __post_init__(self):
        if len(self.breakpoints) != len(self.segments) + 1:
            raise ValueError("need exactly one more breakpoint than segments")
        bps = np.asarray(self.breakpoints, dtype=float)
        if not np.all(np.diff(bps) > 0.0):
            raise ValueError("breakpoints must be strictly increasing")

    @property
    def span(self):
        return self.breakpoints[0], self.breakpoints[-1]

    def __call__(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        bps = np.asarray(self.breakpoints)
        idx = np.searchsorted(bps, t_arr, side="right") - 1
        # the right endpoint belongs to the last segment
        idx = np.where(t_arr == bps[-1], len(self.segments) - 1, idx)
        out = np.zeros_like(t_arr)
        inside = (idx >= 0) & (idx < len(self.segments))
        for i, seg in enumerate(self.segments):
            mask = inside & (idx == i)
            if np.any(mask):
                out[mask] = seg(t_arr[mask])
        if np.isscalar(t) or np.asarray(t).ndim == 0:
            return float(out[0])
        return out

    def max_jump(self) -> float:
        """Largest discontinuity across interior breakpoints (continuity check)."""
        worst = 0.0
        for i in range(1, len(self.segments)):
            t = self.breakpoints[i]
            left = float(self.segments[i - 1](np.asarray([t]))[0])
            right = float(self.segments[i](np.asarray([t]))[0])
            worst = max(worst, abs(left - right))
        return worst


def zero_profile(t_lo: float, t_hi: float) -> PiecewiseProfile:
    return PiecewiseProfile((t_lo, t_hi), (ConstantSeg(0.0),))


def knot_grid(breakpoints, step: float) -> np.ndarray:
    """Uniform-per-interval grid that lands exactly on every breakpoint.

    Each interval is split into ceil(len/step) equal pieces, so the local
    spacing never exceeds `step` and composite rules keep full order on the
    smooth interiors.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    bps = np.asarray(sorted(set(float(b) for b in breakpoints)))
    if len(bps) < 2:
        return bps
    parts = []
    for lo, hi in zip(bps[:-1], bps[1:]):
        n = max(1, int(np.ceil((hi - lo) / step)))
        parts.append(np.linspace(lo, hi, n + 1)[:-1])
    parts.append(bps[-1:])
    return np.concatenate(parts)
