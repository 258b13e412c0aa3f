"""Real-space boundary-matching solver.

Independent numerical route to the scattering amplitudes: substitute
piecewise plane waves into the stationary single-excitation equations and
solve the resulting dense complex linear system.  Works for arbitrary leg
layouts on the two guides and for an infinite or mirror-terminated guide M,
so it serves as the oracle against which the closed forms are checked.

Conventions (matching the closed forms):

* right movers carry coefficients of exp(+i kappa x), left movers of
  exp(-i kappa x), with one coefficient pair per region between breakpoints;
* integrating the stationary equations across a coupling point x_c gives the
  jump rows
      -i v_g [c_R(x_c+) - c_R(x_c-)] + sum g u = 0
      +i v_g [c_L(x_c+) - c_L(x_c-)] + sum g u = 0;
* atomic rows use the average field value at a coupling point,
  c(x_c) = (c(x_c+) + c(x_c-)) / 2, the regularization of the delta coupling
  that reproduces the analytic amplitudes;
* the mirror termination reflects the right mover into the left mover in
  phase: c_R(wall) = c_L(wall).  With the wall a distance L from the
  couplings this puts maximal coupling at k L = 0 and decoupling at
  k L = pi/2, matching the terminated-guide spectra.

Each solve is independent and pure; grids of solves may run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    CH_M_K,
    CH_M_Q,
    CH_N_K,
    CH_N_Q,
    GE,
    SE,
    WAVEGUIDE_M,
    DegenerateConfigError,
    ScatterAmplitudes,
    SystemConfig,
    region_label,
)

#: Condition-number estimate above which a solution is flagged.
ILL_CONDITIONED = 1e12


@dataclass(frozen=True)
class LegRef:
    """An active coupling point as seen by one channel."""

    position: float
    coupling: float
    atom: int


@dataclass(frozen=True)
class Channel:
    """One (waveguide, wavevector-class) photon channel."""

    name: str
    waveguide: str
    kind: str  # "k" or "q"
    legs: tuple[LegRef, ...]
    terminated: bool
    n_regions: int


@dataclass(frozen=True)
class ChannelLayout:
    """Region structure shared by all channels of a configuration.

    ``breakpoints`` is the sorted set of distinct active coupling positions,
    plus the wall position when guide M is terminated.  Every channel is
    split into regions at every breakpoint (couplings absent from a channel
    contribute null jumps); a terminated channel has no region beyond the
    wall.
    """

    channels: tuple[Channel, ...]
    breakpoints: tuple[float, ...]
    wall: float | None
    active_atoms: tuple[int, ...]


@dataclass(frozen=True)
class LinearSystem:
    """Dense square system A x = b with one label per unknown."""

    matrix: np.ndarray
    rhs: np.ndarray
    labels: tuple[str, ...]


def build_layout(cfg: SystemConfig) -> ChannelLayout:
    """Derive the channel/region structure of a configuration.

    Zero-strength legs are dropped: a channel that nothing couples to would
    otherwise contribute spurious singular blocks, and its amplitudes are
    exactly zero by inspection.
    """
    active = [l for l in cfg.legs if l.gamma > 0.0]
    positions = sorted({l.position for l in active})
    if cfg.wall is not None:
        positions.append(cfg.wall)
    breakpoints = tuple(positions)

    def legs_for(waveguide: str, transition: str) -> tuple[LegRef, ...]:
        return tuple(
            LegRef(l.position, l.coupling, l.atom)
            for l in active
            if l.waveguide == waveguide and l.transition == transition
        )

    channels = []
    for waveguide in ("M", "N"):
        terminated = cfg.wall is not None and waveguide == WAVEGUIDE_M
        n_regions = len(breakpoints) if terminated else len(breakpoints) + 1
        ge_legs = legs_for(waveguide, GE)
        se_legs = legs_for(waveguide, SE)
        k_name = CH_M_K if waveguide == WAVEGUIDE_M else CH_N_K
        channels.append(Channel(k_name, waveguide, "k", ge_legs, terminated, n_regions))
        if se_legs:
            q_name = CH_M_Q if waveguide == WAVEGUIDE_M else CH_N_Q
            channels.append(
                Channel(q_name, waveguide, "q", se_legs, terminated, n_regions)
            )

    active_atoms = tuple(sorted({l.atom for l in active}))
    return ChannelLayout(tuple(channels), breakpoints, cfg.wall, active_atoms)


class _Index:
    """Column bookkeeping: (channel, region, mover) and atom unknowns."""

    def __init__(self, layout: ChannelLayout) -> None:
        self.offsets: dict[str, int] = {}
        labels: list[str] = []
        col = 0
        for ch in layout.channels:
            self.offsets[ch.name] = col
            for r in range(ch.n_regions):
                labels.append(f"{region_label(ch.name, r)}:R")
                labels.append(f"{region_label(ch.name, r)}:L")
            col += 2 * ch.n_regions
        self.atom_cols: dict[int, int] = {}
        for atom in layout.active_atoms:
            self.atom_cols[atom] = col
            labels.append(f"u_e{atom + 1}")
            col += 1
        self.size = col
        self.labels = tuple(labels)

    def right(self, channel: str, r: int) -> int:
        return self.offsets[channel] + 2 * r

    def left(self, channel: str, r: int) -> int:
        return self.offsets[channel] + 2 * r + 1


def _wavevector(cfg: SystemConfig, energy: float, kind: str) -> float:
    v = cfg.scale.v_g
    if kind == "k":
        return (energy - cfg.omega_0) / v
    return (energy - cfg.omega_0 - cfg.omega_s) / v


def assemble(layout: ChannelLayout, cfg: SystemConfig, energy: float) -> LinearSystem:
    """Build the dense linear system at eigenstate energy E.

    Rows: two jump conditions per channel per breakpoint, one mirror row per
    terminated channel, one row per atomic amplitude, and the boundary rows
    fixing the incoming coefficient of every channel end (the incident
    amplitude on the entry side, zero elsewhere).
    """
    idx = _Index(layout)
    n = idx.size
    matrix = np.zeros((n, n), dtype=complex)
    rhs = np.zeros(n, dtype=complex)
    v = cfg.scale.v_g
    inc = cfg.incident
    row = 0

    for ch in layout.channels:
        kappa = _wavevector(cfg, energy, ch.kind)
        incident_here = ch.kind == "k" and ch.waveguide == inc.waveguide
        last = ch.n_regions - 1

        # Incoming-coefficient boundary rows.
        matrix[row, idx.right(ch.name, 0)] = 1.0
        if incident_here and inc.from_left:
            rhs[row] = inc.amplitude
        row += 1
        if ch.terminated:
            wall = layout.wall
            matrix[row, idx.right(ch.name, last)] = np.exp(1j * kappa * wall)
            matrix[row, idx.left(ch.name, last)] = -np.exp(-1j * kappa * wall)
            row += 1
        else:
            matrix[row, idx.left(ch.name, last)] = 1.0
            if incident_here and not inc.from_left:
                rhs[row] = inc.amplitude
            row += 1

        # Jump rows at each breakpoint interior to the channel.
        n_jumps = ch.n_regions - 1
        for j in range(n_jumps):
            x_c = layout.breakpoints[j]
            phase = np.exp(1j * kappa * x_c)
            couplings = [leg for leg in ch.legs if leg.position == x_c]
            matrix[row, idx.right(ch.name, j + 1)] = -1j * v * phase
            matrix[row, idx.right(ch.name, j)] = 1j * v * phase
            for leg in couplings:
                matrix[row, idx.atom_cols[leg.atom]] += leg.coupling
            row += 1
            matrix[row, idx.left(ch.name, j + 1)] = 1j * v / phase
            matrix[row, idx.left(ch.name, j)] = -1j * v / phase
            for leg in couplings:
                matrix[row, idx.atom_cols[leg.atom]] += leg.coupling
            row += 1

    # Atomic rows: (E - omega_1) u = sum_legs g * average field at the leg.
    for atom in layout.active_atoms:
        matrix[row, idx.atom_cols[atom]] = energy - cfg.atoms[atom].omega_1
        for ch in layout.channels:
            kappa = _wavevector(cfg, energy, ch.kind)
            for leg in ch.legs:
                if leg.atom != atom:
                    continue
                j = layout.breakpoints.index(leg.position)
                phase = np.exp(1j * kappa * leg.position)
                half_g = 0.5 * leg.coupling
                matrix[row, idx.right(ch.name, j)] += -half_g * phase
                matrix[row, idx.right(ch.name, j + 1)] += -half_g * phase
                matrix[row, idx.left(ch.name, j)] += -half_g / phase
                matrix[row, idx.left(ch.name, j + 1)] += -half_g / phase
        row += 1

    assert row == n, "system must be square"
    return LinearSystem(matrix, rhs, idx.labels)


def _extract(
    layout: ChannelLayout, idx: _Index, x: np.ndarray, cfg: SystemConfig, flags: tuple
) -> ScatterAmplitudes:
    def port_amps(name: str) -> tuple[complex, complex]:
        for ch in layout.channels:
            if ch.name == name:
                last = ch.n_regions - 1
                left_out = complex(x[idx.left(name, 0)])
                right_out = (
                    0.0j if ch.terminated else complex(x[idx.right(name, last)])
                )
                return left_out, right_out
        return 0.0j, 0.0j

    m_left, m_right = port_amps(CH_M_K)
    n_left_k, n_right_k = port_amps(CH_N_K)
    n_left_q, n_right_q = port_amps(CH_N_Q)

    interior: dict[str, tuple[complex, complex]] = {}
    for ch in layout.channels:
        stop = ch.n_regions if ch.terminated else ch.n_regions - 1
        for r in range(1, stop):
            interior[region_label(ch.name, r)] = (
                complex(x[idx.right(ch.name, r)]),
                complex(x[idx.left(ch.name, r)]),
            )

    excited = tuple(
        complex(x[idx.atom_cols[a]]) if a in idx.atom_cols else 0.0j
        for a in range(len(cfg.atoms))
    )
    return ScatterAmplitudes(
        incident_port=cfg.incident.port,
        m_left=m_left,
        m_right=m_right,
        n_left_k=n_left_k,
        n_right_k=n_right_k,
        n_left_q=n_left_q,
        n_right_q=n_right_q,
        interior=interior,
        excited=excited,
        flags=flags,
    )


def solve(cfg: SystemConfig) -> ScatterAmplitudes:
    """Solve one configuration and return the full amplitude set.

    Raises DegenerateConfigError when the system is exactly singular; an
    ill-conditioned (but solvable) system is returned with an
    ``"ill_conditioned"`` flag attached.
    """
    layout = build_layout(cfg)
    system = assemble(layout, cfg, cfg.energy)
    try:
        x = np.linalg.solve(system.matrix, system.rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateConfigError(f"singular scattering system: {exc}") from exc
    flags: tuple[str, ...] = ()
    if np.linalg.cond(system.matrix) > ILL_CONDITIONED:
        flags = ("ill_conditioned",)
    idx = _Index(layout)
    return _extract(layout, idx, x, cfg, flags)
