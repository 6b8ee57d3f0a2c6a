"""Bracketed bisection for the monotone demand equations."""


class BracketError(RuntimeError):
    """The demand function never reached the target within the doubling cap."""


class NoRootError(RuntimeError):
    """The demand already exceeds the target at the lower end of the bracket."""


def bisect_increasing(f, target: float, lo: float, hi: float,
                      max_doublings: int = 60, rtol: float = 1e-12,
                      bounded: bool = False) -> float:
    """Solve f(x) = target for an f increasing on the admissible range.

    The upper end doubles until f(hi) >= target (raising BracketError after
    `max_doublings`); with `bounded` the range [lo, hi] is final and a target
    above f(hi) raises NoRootError instead. NoRootError also signals
    f(lo) > target, i.e. the root sits below the admissible range. Bisection
    then runs to a relative width of `rtol`.
    """
    if not hi > lo:
        raise ValueError("need hi > lo")
    f_lo = f(lo)
    if f_lo > target:
        raise NoRootError(f"f(lo)={f_lo} already exceeds target={target}")
    doublings = 0
    while f(hi) < target:
        if bounded:
            raise NoRootError(f"f(hi)={f(hi)} below target={target} on bounded range")
        doublings += 1
        if doublings > max_doublings:
            raise BracketError(f"root not bracketed after {max_doublings} doublings")
        hi *= 2.0
    while hi - lo > rtol * max(abs(lo), abs(hi), 1.0):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
