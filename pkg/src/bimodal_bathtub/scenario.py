"""Exogenous scenario parameters and the reduced constants derived from them.

All quantities use a fixed unit system: hours, miles, dollars, vehicles,
passengers. Rates combine accordingly ($/h, veh/h, pax/h, mile/h).
"""

import dataclasses
from dataclasses import dataclass


class ScenarioError(ValueError):
    """Raised when a scenario violates a validity constraint or a file is malformed."""


@dataclass(frozen=True)
class ScenarioParams:
    """Exogenous constants of a scenario.

    v_f        free-flow car speed in the district [mile/h]
    eta        passenger-car unit of one transit vehicle [-]
    n_f_total  total transit fleet, district + feeder area [veh]
    n_f_cbd    transit vehicles circulating inside the district [veh]
    n_j        jam accumulation of the district [veh]
    m          transit/car speed ratio, 0 < m < 1 [-]
    alpha      value of in-vehicle/waiting time [$/h]
    beta       marginal cost of early arrival [$/h]
    gamma      marginal cost of late arrival [$/h]
    lam        marginal discomfort per fellow passenger [$/pax]
    f_c        combined fixed cost of a car trip [$]
    f_f        combined fixed cost of a transit trip [$]
    l_c        mean in-district car trip length [mile]
    l_f        mean in-district transit trip length [mile]
    n_total    total number of commuters [pax]
    t_star     common desired arrival time [h]
    """

    v_f: float
    eta: float
    n_f_total: float
    n_f_cbd: float
    n_j: float
    m: float
    alpha: float
    beta: float
    gamma: float
    lam: float
    f_c: float
    f_f: float
    l_c: float
    l_f: float
    n_total: float
    t_star: float

    def __post_init__(self):
        validate(self)


@dataclass(frozen=True)
class DerivedParams:
    """Reduced-network constants implied by a ScenarioParams.

    v_f_eff    car free-flow speed net of the transit fleet's space [mile/h]
    n_j_eff    jam accumulation left to cars [veh]
    t_f_c      free-flow in-district car travel time [h]
    t_f_f      free-flow in-district transit travel time [h]
    df         fixed-cost gap f_c - f_f [$]
    dtf        free-flow travel-time gap t_f_f - t_f_c [h]
    n_crit     car accumulation that maximizes throughput [veh]
    i_p        gated inflow capacity at critical accumulation [veh/h]
    """

    v_f_eff: float
    n_j_eff: float
    t_f_c: float
    t_f_f: float
    df: float
    dtf: float
    n_crit: float
    i_p: float


# File keys, in canonical order. "lambda" is a Python keyword, so the
# corresponding attribute is named "lam".
_FIELD_BY_KEY = {
    "v_f": "v_f",
    "eta": "eta",
    "n_f_total": "n_f_total",
    "n_f_cbd": "n_f_cbd",
    "n_j": "n_j",
    "m": "m",
    "alpha": "alpha",
    "beta": "beta",
    "gamma": "gamma",
    "lambda": "lam",
    "f_c": "f_c",
    "f_f": "f_f",
    "l_c": "l_c",
    "l_f": "l_f",
    "n_total": "n_total",
    "t_star": "t_star",
}
_KEY_BY_FIELD = {v: k for k, v in _FIELD_BY_KEY.items()}

# Fields that must be strictly positive. t_star may sit anywhere on the
# clock; f_c/f_f are costs that the model never needs sign-restricted but
# negative fixed costs have no interpretation here, so they are included.
# n_f_cbd may be zero (no transit presence in the district).
_POSITIVE_FIELDS = (
    "v_f", "eta", "n_f_total", "n_j", "m", "alpha", "beta",
    "gamma", "lam", "f_c", "f_f", "l_c", "l_f", "n_total",
)


def validate(p: ScenarioParams) -> None:
    """Check every validity constraint; raise ScenarioError naming the first violation."""
    for name in _POSITIVE_FIELDS:
        value = getattr(p, name)
        if not value > 0.0:
            raise ScenarioError(f"{_KEY_BY_FIELD[name]} must be strictly positive, got {value}")
    if p.n_f_cbd < 0.0:
        raise ScenarioError(f"n_f_cbd must be nonnegative, got {p.n_f_cbd}")
    if not p.m < 1.0:
        raise ScenarioError(f"m must satisfy 0 < m < 1, got {p.m}")
    if not p.beta < p.alpha:
        raise ScenarioError(f"beta must be less than alpha (got beta={p.beta}, alpha={p.alpha})")
    if not p.l_f > p.l_c:
        raise ScenarioError(f"l_f must exceed l_c (got l_f={p.l_f}, l_c={p.l_c})")
    if not p.eta * p.n_f_cbd < p.n_j:
        raise ScenarioError(
            f"eta*n_f_cbd must be below jam accumulation "
            f"(eta*n_f_cbd={p.eta * p.n_f_cbd}, n_j={p.n_j})"
        )
    if not p.n_f_cbd <= p.n_f_total:
        raise ScenarioError(
            f"n_f_cbd cannot exceed n_f_total (got {p.n_f_cbd} > {p.n_f_total})"
        )


def derive_params(p: ScenarioParams) -> DerivedParams:
    """Compute the reduced constants used by every downstream relation.

    Pure function of p; equal inputs give bit-identical outputs.
    """
    reduction = 1.0 - p.eta * p.n_f_cbd / p.n_j
    v_f_eff = p.v_f * reduction
    n_j_eff = p.n_j * reduction
    t_f_c = p.l_c / v_f_eff
    t_f_f = p.l_f / (p.m * v_f_eff)
    return DerivedParams(
        v_f_eff=v_f_eff,
        n_j_eff=n_j_eff,
        t_f_c=t_f_c,
        t_f_f=t_f_f,
        df=p.f_c - p.f_f,
        dtf=t_f_f - t_f_c,
        n_crit=n_j_eff / 2.0,
        i_p=n_j_eff * v_f_eff / (4.0 * p.l_c),
    )


def replace_param(p: ScenarioParams, key: str, value: float) -> ScenarioParams:
    """Return a copy of p with one field (by file key or attribute name) replaced."""
    field = _FIELD_BY_KEY.get(key, key)
    if field not in _KEY_BY_FIELD:
        raise ScenarioError(f"unknown scenario key: {key}")
    return dataclasses.replace(p, **{field: float(value)})


def parse_scenario(text: str) -> ScenarioParams:
    """Parse the flat key=value scenario format.

    One `key = value` pair per line, `#` starts a comment, blank lines are
    skipped, key order is free. Unknown, duplicate, or missing keys are
    errors.
    """
    seen: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _FIELD_BY_KEY:
            raise ScenarioError(f"line {lineno}: unknown key: {key}")
        if key in seen:
            raise ScenarioError(f"line {lineno}: duplicate key: {key}")
        try:
            seen[key] = float(value.strip())
        except ValueError:
            raise ScenarioError(f"line {lineno}: bad numeric value for {key}: {value.strip()!r}")
    missing = [k for k in _FIELD_BY_KEY if k not in seen]
    if missing:
        raise ScenarioError(f"missing key(s): {', '.join(missing)}")
    return ScenarioParams(**{_FIELD_BY_KEY[k]: v for k, v in seen.items()})


def load_scenario(path) -> ScenarioParams:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_scenario(handle.read())


def format_scenario(p: ScenarioParams) -> str:
    """Serialize back to the key=value format (canonical key order)."""
    lines = [f"{key} = {getattr(p, field)!r}" for key, field in _FIELD_BY_KEY.items()]
    return "\n".join(lines) + "\n"
