"""Spectral sweeps over detuning and phase, regime handling, and presets.

A sweep evaluates forward and reverse transfer rates on a (phase x detuning)
grid for one configuration family, with phases resolved per the regime model
(constant in the Markovian regime, shifted by tau*delta otherwise).  Two
engines are available: "closed" evaluates the analytical amplitudes
(vectorized across the detuning axis), "solver" runs the boundary-matching
solver per cell, and "both" runs the two and records their maximum
disagreement.

Grid cells whose denominators fall below the singularity floor are not
errors: they carry the value of the nearest previously valid cell along the
detuning axis plus a "singular" flag, which keeps exported tables
plot-friendly while preserving the information.

Cells are computed independently and merged in a fixed order, so the output
is deterministic regardless of how evaluation is scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

from . import closed_form as cf
from . import configs, solver
from .core import (
    MARKOVIAN,
    NON_MARKOVIAN,
    ConfigError,
    DegenerateConfigError,
    PhaseModel,
    TransferRates,
    combine_directions,
    rates_from_amplitudes,
)

FAMILIES = ("small_overlap", "small_separated", "giant", "semi_infinite")
ENGINES = ("closed", "solver", "both")

#: Phase constants a sweep axis may drive.
LINKABLE_PHASES = ("phi_a", "phi_b", "phi1_prime", "phi2_prime", "phi3")

RATE_FIELDS = ("T_Ng", "T_Ns", "T_M_rev", "R_M", "T2", "eta", "residual")

#: Forward transfer below this total counts as blocked in isolation reports.
BLOCKED_THRESHOLD = 1e-6
#: Reverse throughput defining a usable isolation window.
WINDOW_THRESHOLD = 0.45

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Axis:
    start: float
    stop: float
    count: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ConfigError("axis count must be at least 1")
        if self.count == 1 and self.start != self.stop:
            raise ConfigError("a single-point axis needs start == stop")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class PhaseAxis(Axis):
    """Swept phase scalar, fanned out to phase constants by linkage factors.

    ``linkage`` maps phase-constant names to multipliers of the swept value,
    e.g. ``{"phi1_prime": 1.0, "phi2_prime": -1.0}``.
    """

    linkage: tuple[tuple[str, float], ...] = ()

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.linkage:
            raise ConfigError("a phase axis needs at least one linkage entry")
        for name, _ in self.linkage:
            if name not in LINKABLE_PHASES:
                raise ConfigError(f"cannot link unknown phase {name!r}")


@dataclass(frozen=True)
class SweepSpec:
    family: str
    gammas: tuple[float, float, float, float]
    phases: PhaseModel
    delta_axis: Axis
    phase_axis: PhaseAxis | None = None
    engine: str = "closed"

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        if self.engine not in ENGINES:
            raise ConfigError(f"unknown engine {self.engine!r}")
        if len(self.gammas) != 4 or min(self.gammas) < 0:
            raise ConfigError("gammas must be four non-negative rates")
        if self.delta_axis.count < 2:
            raise ConfigError("the detuning axis needs at least two points")


@dataclass(frozen=True)
class SweepResult:
    """Rate grids indexed [phase, delta], one 2-D array per rate field."""

    spec: SweepSpec
    delta: np.ndarray
    phi: np.ndarray
    rates: dict[str, np.ndarray]
    flags: list[list[tuple[str, ...]]]
    engine_discrepancy: float | None
    metadata: dict

    def cell(self, phase_index: int, delta_index: int) -> TransferRates:
        g = self.rates
        return TransferRates(
            t_ng=float(g["T_Ng"][phase_index, delta_index]),
            t_ns=float(g["T_Ns"][phase_index, delta_index]),
            t_m_rev=float(g["T_M_rev"][phase_index, delta_index]),
            r_m=float(g["R_M"][phase_index, delta_index]),
            t2=float(g["T2"][phase_index, delta_index]),
            eta=float(g["eta"][phase_index, delta_index]),
            conservation_residual=float(g["residual"][phase_index, delta_index]),
            flags=self.flags[phase_index][delta_index],
        )


def _phase_constants(pm: PhaseModel, axis: PhaseAxis | None, value: float) -> PhaseModel:
    if axis is None:
        return pm
    updates = {name: factor * value for name, factor in axis.linkage}
    return replace(pm, **updates)


def _resolved(pm: PhaseModel, name: str, delta: np.ndarray):
    base = getattr(pm, name)
    if pm.regime == NON_MARKOVIAN:
        return base + pm.tau * delta
    return np.full_like(delta, base)


def _closed_row(spec: SweepSpec, pm: PhaseModel, delta: np.ndarray):
    """Forward+reverse closed-form rates for one phase row, vectorized in delta."""
    g1, g2, g3, g4 = spec.gammas
    if spec.family == "small_overlap":
        fwd = cf.overlap_forward_fields(spec.gammas, delta)
        rev = cf.spectator_reverse_fields(g1, g3, delta)
    elif spec.family == "small_separated":
        phi_a = _resolved(pm, "phi_a", delta)
        phi_b = _resolved(pm, "phi_b", delta)
        fwd = cf.separated_forward_fields(spec.gammas, delta, phi_a, phi_b)
        rev = cf.spectator_reverse_fields(g1, g3, delta)
    elif spec.family == "giant":
        phi1 = _resolved(pm, "phi1_prime", delta)
        phi2 = _resolved(pm, "phi2_prime", delta)
        fwd = cf.giant_forward_fields(spec.gammas, delta, phi1, phi2)
        rev = cf.giant_reverse_fields(g1, g3, delta, phi1)
    else:
        phi3 = _resolved(pm, "phi3", delta)
        fwd = cf.mirrored_forward_fields(spec.gammas, delta, phi3)
        rev = cf.mirrored_reverse_fields(g1, g3, delta, phi3)

    t_ng = np.abs(fwd.t3g) ** 2 + np.abs(fwd.t4g) ** 2
    t_ns = np.abs(fwd.t3s) ** 2 + np.abs(fwd.t4s) ** 2
    r_m = np.abs(fwd.r1) ** 2
    t2 = np.abs(fwd.t2) ** 2
    res_f = np.abs(r_m + t2 + t_ng + t_ns - 1.0)

    t_m_rev = np.abs(rev.t1) ** 2 + np.abs(getattr(rev, "t2", 0.0)) ** 2
    res_r = np.abs(t_m_rev + np.abs(rev.t3g) ** 2 + np.abs(rev.r4g) ** 2 - 1.0)

    total_n = t_ng + t_ns
    with np.errstate(invalid="ignore", divide="ignore"):
        eta = np.where(total_n > 0.0, t_ns / np.where(total_n > 0, total_n, 1.0), 0.0)
    singular = np.asarray(fwd.singular) | np.asarray(rev.singular)
    return {
        "T_Ng": t_ng,
        "T_Ns": t_ns,
        "T_M_rev": t_m_rev,
        "R_M": r_m,
        "T2": t2,
        "eta": eta,
        "residual": np.maximum(res_f, res_r),
    }, singular, total_n == 0.0


def _solver_cell(spec: SweepSpec, pm: PhaseModel, delta: float) -> TransferRates:
    g1, g2, g3, g4 = spec.gammas
    if spec.family == "small_overlap":
        fwd_cfg = configs.small_overlap(spec.gammas, delta)
        rev_cfg = configs.reverse_small(g1, g3, delta)
    elif spec.family == "small_separated":
        phi_a, phi_b = (
            float(_resolved(pm, "phi_a", np.asarray(delta))),
            float(_resolved(pm, "phi_b", np.asarray(delta))),
        )
        fwd_cfg = configs.small_separated(spec.gammas, delta, phi_a, phi_b)
        rev_cfg = configs.reverse_small(g1, g3, delta)
    elif spec.family == "giant":
        phi1 = float(_resolved(pm, "phi1_prime", np.asarray(delta)))
        phi2 = float(_resolved(pm, "phi2_prime", np.asarray(delta)))
        fwd_cfg = configs.giant(spec.gammas, delta, phi1, phi2)
        rev_cfg = configs.reverse_giant(g1, g3, delta, phi1)
    else:
        phi3 = float(_resolved(pm, "phi3", np.asarray(delta)))
        fwd_cfg = configs.semi_infinite(spec.gammas, delta, phi3)
        rev_cfg = configs.reverse_semi_infinite(g1, g3, delta, phi3)
    forward = rates_from_amplitudes(solver.solve(fwd_cfg))
    reverse = rates_from_amplitudes(solver.solve(rev_cfg))
    return combine_directions(forward, reverse)


def _fill_singular(grids, flags, singular_mask) -> None:
    """Replace flagged cells with the last valid neighbor along delta."""
    n_phi, n_delta = singular_mask.shape
    for i in range(n_phi):
        for j in range(n_delta):
            if not singular_mask[i, j]:
                continue
            src = None
            for jj in range(j - 1, -1, -1):
                if not singular_mask[i, jj]:
                    src = jj
                    break
            if src is None:
                for jj in range(j + 1, n_delta):
                    if not singular_mask[i, jj]:
                        src = jj
                        break
            for name in grids:
                grids[name][i, j] = grids[name][i, src] if src is not None else 0.0
            flags[i][j] = flags[i][j] + ("singular",)


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate the full grid; singular cells are flagged, never fatal."""
    delta = spec.delta_axis.values()
    if spec.phase_axis is not None:
        phi = spec.phase_axis.values()
    else:
        phi = np.array([0.0])
    n_phi, n_delta = len(phi), len(delta)

    def run_engine(engine: str):
        grids = {name: np.zeros((n_phi, n_delta)) for name in RATE_FIELDS}
        flags: list[list[tuple[str, ...]]] = [
            [() for _ in range(n_delta)] for _ in range(n_phi)
        ]
        singular = np.zeros((n_phi, n_delta), dtype=bool)
        for i, value in enumerate(phi):
            pm = _phase_constants(spec.phases, spec.phase_axis, float(value))
            if engine == "closed":
                row, row_singular, eta_undef = _closed_row(spec, pm, delta)
                for name in RATE_FIELDS:
                    grids[name][i, :] = row[name]
                singular[i, :] = row_singular
                for j in np.nonzero(eta_undef & ~row_singular)[0]:
                    flags[i][j] = flags[i][j] + ("eta_undefined",)
            else:
                for j, d in enumerate(delta):
                    try:
                        cell = _solver_cell(spec, pm, float(d))
                    except DegenerateConfigError:
                        singular[i, j] = True
                        continue
                    for name, val in zip(RATE_FIELDS, cell.as_row()):
                        grids[name][i, j] = val
                    if cell.flags:
                        flags[i][j] = cell.flags
        _fill_singular(grids, flags, singular)
        return grids, flags

    discrepancy = None
    if spec.engine == "both":
        closed_grids, closed_flags = run_engine("closed")
        solver_grids, _ = run_engine("solver")
        ok = ~np.array(
            [["singular" in c for c in row] for row in closed_flags], dtype=bool
        )
        discrepancy = 0.0
        for name in RATE_FIELDS:
            diff = np.abs(closed_grids[name] - solver_grids[name])[ok]
            if diff.size:
                discrepancy = max(discrepancy, float(diff.max()))
        grids, flags = closed_grids, closed_flags
    else:
        grids, flags = run_engine(spec.engine)

    metadata = {
        "family": spec.family,
        "gammas": spec.gammas,
        "regime": spec.phases.regime,
        "tau": spec.phases.tau,
        "engine": spec.engine,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    return SweepResult(
        spec=spec,
        delta=delta,
        phi=phi,
        rates=grids,
        flags=flags,
        engine_discrepancy=discrepancy,
        metadata=metadata,
    )


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

#: Default axes: the detuning grid resolves the narrow features near
#: resonance and the phase grid the ultranarrow windows near phi = pi.
DEFAULT_DELTA = Axis(-10.0, 10.0, 2001)
DEFAULT_PHASE_COUNT = 629


@dataclass(frozen=True)
class FigurePanel:
    panel: str
    sweep: str
    column: str


@dataclass(frozen=True)
class FigurePreset:
    figure: str
    sweeps: dict[str, SweepSpec] = field(default_factory=dict)
    panels: tuple[FigurePanel, ...] = ()


def _phase_sweep(name_factors, count=DEFAULT_PHASE_COUNT) -> PhaseAxis:
    return PhaseAxis(0.0, TWO_PI, count, linkage=tuple(name_factors))


def _delta_spectrum(family, gammas, pm, engine="closed") -> SweepSpec:
    return SweepSpec(family, gammas, pm, DEFAULT_DELTA, None, engine)


def figure_preset(figure_id: str) -> FigurePreset:
    """Named sweep presets: canonical parameter sets for the bundled spectra.

    Each preset fixes the decay rates, regime, axes and linkages for one
    catalogued figure; multi-panel figures carry one sweep per linkage
    variant and one panel entry per exported table.
    """
    mk = PhaseModel(regime=MARKOVIAN)
    fid = figure_id.lower()
    if fid == "fig2a":
        spec = _delta_spectrum("small_overlap", (1.0, 0.25, 1.0, 0.0), mk)
        return FigurePreset(fid, {"main": spec}, (FigurePanel("", "main", "T_M_rev"),))
    if fid == "fig2b":
        spec = _delta_spectrum("small_overlap", (1.0, 1.0, 1.0, 0.0), mk)
        return FigurePreset(fid, {"main": spec}, (FigurePanel("", "main", "T_M_rev"),))
    if fid in ("fig3a", "fig3b"):
        gammas = (1.0, 0.25, 1.0, 0.0) if fid == "fig3a" else (1.0, 1.0, 1.0, 0.0)
        spec = SweepSpec(
            "small_separated",
            gammas,
            mk,
            DEFAULT_DELTA,
            _phase_sweep((("phi_a", 1.0), ("phi_b", 1.0))),
        )
        return FigurePreset(fid, {"main": spec}, (FigurePanel("", "main", "T_Ng"),))
    if fid == "fig4a":
        spec = _delta_spectrum("small_overlap", (0.32, 1.0, 1.0, 1.0), mk)
        return FigurePreset(fid, {"main": spec}, (FigurePanel("", "main", "T_Ns"),))
    if fid == "fig4b":
        spec = _delta_spectrum("small_overlap", (0.25, 1.0, 1.0, 0.25), mk)
        return FigurePreset(fid, {"main": spec}, (FigurePanel("", "main", "T_Ns"),))
    if fid in ("fig6", "fig8"):
        regime = mk if fid == "fig6" else PhaseModel(regime=NON_MARKOVIAN, tau=1.0)
        spec = SweepSpec(
            "giant",
            (1.0, 0.25, 1.0, 0.0),
            regime,
            DEFAULT_DELTA,
            _phase_sweep((("phi1_prime", 1.0),)),
        )
        return FigurePreset(
            fid,
            {"main": spec},
            (FigurePanel("a", "main", "T_Ng"), FigurePanel("b", "main", "T_M_rev")),
        )
    if fid in ("fig7", "fig9"):
        regime = mk if fid == "fig7" else PhaseModel(regime=NON_MARKOVIAN, tau=1.0)
        gammas = (0.32, 1.0, 1.0, 1.0)
        ab = SweepSpec(
            "giant", gammas, regime, DEFAULT_DELTA, _phase_sweep((("phi1_prime", 1.0),))
        )
        cd = SweepSpec(
            "giant",
            gammas,
            regime,
            DEFAULT_DELTA,
            _phase_sweep((("phi1_prime", 1.0), ("phi2_prime", -1.0))),
        )
        return FigurePreset(
            fid,
            {"ab": ab, "cd": cd},
            (
                FigurePanel("a", "ab", "T_Ng"),
                FigurePanel("b", "ab", "T_Ns"),
                FigurePanel("c", "cd", "T_Ng"),
                FigurePanel("d", "cd", "T_Ns"),
            ),
        )
    if fid == "fig10":
        gammas = (0.32, 1.0, 1.0, 1.0)
        spectrum = _delta_spectrum("semi_infinite", gammas, mk)
        grid = SweepSpec(
            "semi_infinite",
            gammas,
            mk,
            DEFAULT_DELTA,
            _phase_sweep((("phi3", 1.0),)),
        )
        return FigurePreset(
            fid,
            {"a": spectrum, "b": grid},
            (FigurePanel("a", "a", "T_Ns"), FigurePanel("b", "b", "T_Ns")),
        )
    raise ConfigError(f"unknown figure id {figure_id!r}")


FIGURE_IDS = (
    "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b",
    "fig6", "fig7", "fig8", "fig9", "fig10",
)


# ---------------------------------------------------------------------------
# Isolation report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IsolationReport:
    """Summary of diode behavior over a sweep grid.

    ``windows`` lists contiguous phase intervals where the reverse
    throughput at resonance stays at or above WINDOW_THRESHOLD.
    """

    blocked_fraction: float
    resonance_blocked_all_phases: bool
    max_forward: float
    max_forward_at: tuple[float, float]
    windows: tuple[tuple[float, float], ...]
    result: SweepResult


def isolation_report(spec: SweepSpec) -> IsolationReport:
    """Run the sweep and summarize forward blocking and reverse throughput.

    Requires a closed converted channel (gamma4 == 0): with conversion open
    the configuration is a converter, not an isolator.
    """
    if spec.gammas[3] != 0.0:
        raise ConfigError("isolation analysis requires gamma4 == 0")
    result = run_sweep(spec)
    forward = result.rates["T_Ng"] + result.rates["T_Ns"]
    blocked = forward <= BLOCKED_THRESHOLD
    i_res = int(np.argmin(np.abs(result.delta)))
    t_rev_res = result.rates["T_M_rev"][:, i_res]
    open_mask = t_rev_res >= WINDOW_THRESHOLD

    windows: list[tuple[float, float]] = []
    start = None
    for i, is_open in enumerate(open_mask):
        if is_open and start is None:
            start = result.phi[i]
        elif not is_open and start is not None:
            windows.append((float(start), float(result.phi[i - 1])))
            start = None
    if start is not None:
        windows.append((float(start), float(result.phi[-1])))

    flat = int(np.argmax(forward))
    i_max, j_max = np.unravel_index(flat, forward.shape)
    return IsolationReport(
        blocked_fraction=float(np.mean(blocked)),
        resonance_blocked_all_phases=bool(np.all(blocked[:, i_res])),
        max_forward=float(forward[i_max, j_max]),
        max_forward_at=(float(result.phi[i_max]), float(result.delta[j_max])),
        windows=tuple(windows),
        result=result,
    )
