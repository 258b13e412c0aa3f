"""Parameter synthesis: derivative-free search for isolation or conversion targets.

Objectives are evaluated from the closed forms at resonance (delta = 0),
where the converted fraction depends only on rate ratios and the leg phases
drop out of it.  The search is a coarse grid pass followed by coordinate-wise
golden-section refinement around the best cell.  It is fully deterministic:
ties are broken toward the lexicographically smallest parameter vector, so no
randomness is involved.  Every reported optimum is re-verified against the
boundary-matching solver before it is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import closed_form as cf
from . import configs, solver
from .core import (
    ConfigError,
    NoFeasiblePointError,
    TransferRates,
    combine_directions,
    rates_from_amplitudes,
)

ISOLATION_CONTRAST = "isolation_contrast"
CONVERSION_MERIT = "conversion_merit"

PARAM_NAMES = (
    "gamma1",
    "gamma2",
    "gamma3",
    "gamma4",
    "phi1_prime",
    "phi2_prime",
    "tau",
)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

#: Maximum allowed closed-form/solver disagreement at the reported optimum.
VERIFY_TOL = 1e-10


@dataclass(frozen=True)
class Fixed:
    value: float


@dataclass(frozen=True)
class Bounds:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ConfigError("bounds must satisfy lo < hi")


@dataclass(frozen=True)
class Linked:
    to: str
    factor: float = 1.0


@dataclass(frozen=True)
class Objective:
    """Search target over (gamma1..gamma4, phi1_prime, phi2_prime, tau).

    ``kind`` selects the figure of merit at resonance: the isolation
    contrast t_m_rev - (t_ng + t_ns), or the conversion merit
    eta**purity_weight * t_ns**rate_weight.  ``min_reverse`` is a hard
    constraint t_m_rev >= floor.
    """

    kind: str
    parameters: dict[str, Fixed | Bounds | Linked]
    purity_weight: float = 1.0
    rate_weight: float = 1.0
    min_reverse: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in (ISOLATION_CONTRAST, CONVERSION_MERIT):
            raise ConfigError(f"unknown objective kind {self.kind!r}")
        if not 0.0 <= self.min_reverse <= 0.5:
            raise ConfigError("min_reverse must lie in [0, 0.5]")
        if self.kind == CONVERSION_MERIT and (
            self.purity_weight <= 0 or self.rate_weight <= 0
        ):
            raise ConfigError("conversion weights must be positive")
        unknown = set(self.parameters) - set(PARAM_NAMES)
        if unknown:
            raise ConfigError(f"unknown parameters: {sorted(unknown)}")
        free = [n for n, s in self.parameters.items() if isinstance(s, Bounds)]
        if not free:
            raise ConfigError("at least one parameter must carry bounds")
        for name, spec in self.parameters.items():
            if isinstance(spec, Linked):
                target = self.parameters.get(spec.to)
                if spec.to == name or isinstance(target, Linked):
                    raise ConfigError(f"bad link for {name!r}")

    def free_names(self) -> tuple[str, ...]:
        return tuple(
            n for n in PARAM_NAMES if isinstance(self.parameters.get(n), Bounds)
        )

    def resolve(self, free_values: dict[str, float]) -> dict[str, float]:
        out: dict[str, float] = {}
        for name in PARAM_NAMES:
            spec = self.parameters.get(name, Fixed(0.0))
            if isinstance(spec, Bounds):
                out[name] = free_values[name]
            elif isinstance(spec, Fixed):
                out[name] = spec.value
        for name in PARAM_NAMES:
            spec = self.parameters.get(name)
            if isinstance(spec, Linked):
                out[name] = spec.factor * out[spec.to]
        return out


def rates_at_resonance(params: dict[str, float]) -> TransferRates:
    """Forward+reverse closed-form rates at delta = 0 for one parameter set."""
    gammas = tuple(params[f"gamma{i}"] for i in (1, 2, 3, 4))
    fwd = cf.giant_forward_fields(
        gammas, 0.0, params["phi1_prime"], params["phi2_prime"]
    )
    rev = cf.giant_reverse_fields(
        gammas[0], gammas[2], 0.0, params["phi1_prime"]
    )
    if bool(np.any(fwd.singular)) or bool(np.any(rev.singular)):
        raise cf.SingularityError(f"singular resonance point at {params!r}")
    t_ng = 2.0 * abs(complex(fwd.t3g)) ** 2
    t_ns = 2.0 * abs(complex(fwd.t3s)) ** 2
    r_m = abs(complex(fwd.r1)) ** 2
    t2 = abs(complex(fwd.t2)) ** 2
    t_m_rev = abs(complex(rev.t1)) ** 2 + abs(complex(rev.t2)) ** 2
    total_n = t_ng + t_ns
    eta = t_ns / total_n if total_n > 0 else 0.0
    residual = max(
        abs(r_m + t2 + t_ng + t_ns - 1.0),
        abs(t_m_rev + abs(complex(rev.t3g)) ** 2 + abs(complex(rev.r4g)) ** 2 - 1.0),
    )
    return TransferRates(
        t_ng=t_ng, t_ns=t_ns, t_m_rev=t_m_rev, r_m=r_m, t2=t2, eta=eta,
        conservation_residual=residual,
        flags=("eta_undefined",) if total_n == 0 else (),
    )


def _objective_value(obj: Objective, rates: TransferRates) -> float:
    if rates.t_m_rev < obj.min_reverse:
        return -math.inf
    if obj.kind == ISOLATION_CONTRAST:
        return rates.t_m_rev - (rates.t_ng + rates.t_ns)
    return rates.eta**obj.purity_weight * rates.t_ns**obj.rate_weight


@dataclass
class SearchReport:
    best_params: dict[str, float]
    objective_value: float
    rates: TransferRates
    evaluations: int
    trace: list[tuple[int, float, tuple[float, ...]]] = field(default_factory=list)
    degenerate_plateau: bool = False
    solver_discrepancy: float = 0.0


class _Tracker:
    def __init__(self, obj: Objective) -> None:
        self.obj = obj
        self.names = obj.free_names()
        self.evaluations = 0
        self.best_value = -math.inf
        self.best_point: tuple[float, ...] | None = None
        self.trace: list[tuple[int, float, tuple[float, ...]]] = []
        self.ties = 0

    def evaluate(self, point: tuple[float, ...]) -> float:
        self.evaluations += 1
        params = self.obj.resolve(dict(zip(self.names, point)))
        try:
            rates = rates_at_resonance(params)
        except cf.SingularityError:
            return -math.inf
        value = _objective_value(self.obj, rates)
        if value == -math.inf:
            return value
        if value > self.best_value + 1e-12:
            self.best_value = value
            self.best_point = point
            self.trace.append((self.evaluations, value, point))
        elif value > self.best_value - 1e-12:
            self.ties += 1
            if self.best_point is not None and point < self.best_point:
                self.best_point = point
        return value


def grid_refine_search(obj: Objective, budget: int = 2000) -> SearchReport:
    """Coarse grid pass, then golden-section refinement along each free axis."""
    if budget < 100:
        raise ConfigError("search budget must be at least 100 evaluations")
    names = obj.free_names()
    bounds = {n: obj.parameters[n] for n in names}
    ndim = len(names)
    tracker = _Tracker(obj)

    per_dim = max(3, int((budget // 2) ** (1.0 / ndim)))
    while per_dim**ndim > budget // 2 and per_dim > 3:
        per_dim -= 1
    grids = [np.linspace(bounds[n].lo, bounds[n].hi, per_dim) for n in names]
    mesh = np.meshgrid(*grids, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    for point in points:
        tracker.evaluate(tuple(float(x) for x in point))

    if tracker.best_point is None:
        raise NoFeasiblePointError(
            "no parameter set satisfies the constraints within the search bounds"
        )

    spacing = {
        n: (bounds[n].hi - bounds[n].lo) / max(per_dim - 1, 1) for n in names
    }
    refine_budget = budget - tracker.evaluations
    per_axis = max(refine_budget // (2 * ndim), 0)
    for axis, name in enumerate(names):
        current = list(tracker.best_point)
        lo = max(bounds[name].lo, current[axis] - spacing[name])
        hi = min(bounds[name].hi, current[axis] + spacing[name])
        a, b = lo, hi
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)

        def at(x: float) -> float:
            probe = list(current)
            probe[axis] = x
            return tracker.evaluate(tuple(probe))

        fc, fd = at(c), at(d)
        for _ in range(max(per_axis - 2, 0)):
            if fc >= fd:
                b, d, fd = d, c, fc
                c = b - _GOLDEN * (b - a)
                fc = at(c)
            else:
                a, c, fc = c, d, fd
                d = a + _GOLDEN * (b - a)
                fd = at(d)

    assert tracker.best_point is not None
    best_params = obj.resolve(dict(zip(names, tracker.best_point)))
    rates = rates_at_resonance(best_params)
    discrepancy = _verify_with_solver(best_params, rates)
    return SearchReport(
        best_params=best_params,
        objective_value=tracker.best_value,
        rates=rates,
        evaluations=tracker.evaluations,
        trace=tracker.trace,
        degenerate_plateau=tracker.ties > 0,
        solver_discrepancy=discrepancy,
    )


def _verify_with_solver(params: dict[str, float], closed: TransferRates) -> float:
    """Re-verification gate: solver rates at the optimum must match the closed ones."""
    gammas = tuple(params[f"gamma{i}"] for i in (1, 2, 3, 4))
    fwd_cfg = configs.giant(gammas, 0.0, params["phi1_prime"], params["phi2_prime"])
    rev_cfg = configs.reverse_giant(
        gammas[0], gammas[2], 0.0, params["phi1_prime"]
    )
    check = combine_directions(
        rates_from_amplitudes(solver.solve(fwd_cfg)),
        rates_from_amplitudes(solver.solve(rev_cfg)),
    )
    discrepancy = max(
        abs(a - b) for a, b in zip(closed.as_row()[:6], check.as_row()[:6])
    )
    if discrepancy > VERIFY_TOL:
        raise RuntimeError(
            f"optimum failed solver re-verification: discrepancy {discrepancy:.3e}"
        )
    return discrepancy
