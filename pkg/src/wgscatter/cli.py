"""Command-line interface: spectrum, figure, validate, search, dump-config.

Configuration files are JSON documents with explicit unit tags; unknown keys
are rejected.  All tabular output is CSV with '#'-prefixed key=value metadata
lines, every number serialized with 17 significant digits so repeated runs
are byte-identical.  Exit codes: 0 success, 1 check or optimization failure,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import search as search_mod
from . import sweep as sweep_mod
from . import validate as validate_mod
from .core import ConfigError, PhaseModel

GAMMA_UNITS = "Gamma_ref"
PHASE_UNITS = "radians"

_PHASE_KEYS = ("phi_a", "phi_b", "phi1_prime", "phi2_prime", "phi3")


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _reject_unknown(block, allowed: set[str], where: str) -> None:
    if not isinstance(block, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def _require(block: dict, key: str, where: str):
    if key not in block:
        raise ConfigError(f"missing key {key!r} in {where}")
    return block[key]


def parse_config(doc: dict) -> tuple[sweep_mod.SweepSpec, search_mod.Objective | None]:
    """Validate a configuration document and build the internal objects."""
    if not isinstance(doc, dict):
        raise ConfigError("the configuration root must be an object")
    _reject_unknown(doc, {"system", "sweep", "objective"}, "config")
    system = _require(doc, "system", "config")
    _reject_unknown(
        system,
        {"family", "gamma_units", "gamma", "phase_units", "phases", "regime", "tau"},
        "system",
    )
    if _require(system, "gamma_units", "system") != GAMMA_UNITS:
        raise ConfigError(f'gamma_units must be "{GAMMA_UNITS}"')
    if _require(system, "phase_units", "system") != PHASE_UNITS:
        raise ConfigError(f'phase_units must be "{PHASE_UNITS}"')
    gamma = _require(system, "gamma", "system")
    if not (isinstance(gamma, list) and len(gamma) == 4):
        raise ConfigError("system.gamma must be a list of four rates")
    phases_doc = system.get("phases", {})
    _reject_unknown(phases_doc, set(_PHASE_KEYS), "system.phases")
    regime = system.get("regime", "markovian")
    pm = PhaseModel(
        regime=regime,
        tau=float(system.get("tau", 0.0)),
        **{k: float(phases_doc.get(k, 0.0)) for k in _PHASE_KEYS},
    )

    sweep_doc = _require(doc, "sweep", "config")
    _reject_unknown(sweep_doc, {"delta", "phase", "engine"}, "sweep")
    delta_doc = _require(sweep_doc, "delta", "sweep")
    _reject_unknown(delta_doc, {"min", "max", "count"}, "sweep.delta")
    delta_axis = sweep_mod.Axis(
        float(_require(delta_doc, "min", "sweep.delta")),
        float(_require(delta_doc, "max", "sweep.delta")),
        int(_require(delta_doc, "count", "sweep.delta")),
    )
    phase_axis = None
    phase_doc = sweep_doc.get("phase")
    if phase_doc is not None:
        _reject_unknown(phase_doc, {"min", "max", "count", "linkage"}, "sweep.phase")
        linkage_doc = _require(phase_doc, "linkage", "sweep.phase")
        linkage = tuple(sorted((str(k), float(v)) for k, v in linkage_doc.items()))
        phase_axis = sweep_mod.PhaseAxis(
            float(_require(phase_doc, "min", "sweep.phase")),
            float(_require(phase_doc, "max", "sweep.phase")),
            int(_require(phase_doc, "count", "sweep.phase")),
            linkage=linkage,
        )
    spec = sweep_mod.SweepSpec(
        family=_require(system, "family", "system"),
        gammas=tuple(float(x) for x in gamma),
        phases=pm,
        delta_axis=delta_axis,
        phase_axis=phase_axis,
        engine=sweep_doc.get("engine", "closed"),
    )

    objective = None
    if "objective" in doc:
        objective = _parse_objective(doc["objective"])
    return spec, objective


def _parse_objective(block: dict) -> search_mod.Objective:
    _reject_unknown(
        block,
        {"kind", "parameters", "purity_weight", "rate_weight", "min_reverse"},
        "objective",
    )
    params_doc = _require(block, "parameters", "objective")
    params: dict[str, object] = {}
    for name, spec in params_doc.items():
        _reject_unknown(spec, {"fixed", "bounds", "linked", "factor"}, f"objective.{name}")
        if "fixed" in spec:
            params[name] = search_mod.Fixed(float(spec["fixed"]))
        elif "bounds" in spec:
            lo, hi = spec["bounds"]
            params[name] = search_mod.Bounds(float(lo), float(hi))
        elif "linked" in spec:
            params[name] = search_mod.Linked(
                str(spec["linked"]), float(spec.get("factor", 1.0))
            )
        else:
            raise ConfigError(f"objective.{name} needs fixed, bounds, or linked")
    return search_mod.Objective(
        kind=_require(block, "kind", "objective"),
        parameters=params,  # type: ignore[arg-type]
        purity_weight=float(block.get("purity_weight", 1.0)),
        rate_weight=float(block.get("rate_weight", 1.0)),
        min_reverse=float(block.get("min_reverse", 0.0)),
    )


def dump_config(spec: sweep_mod.SweepSpec, objective=None) -> dict:
    """Canonical document for a sweep spec; parse_config round-trips it."""
    pm = spec.phases
    doc: dict = {
        "system": {
            "family": spec.family,
            "gamma_units": GAMMA_UNITS,
            "gamma": list(spec.gammas),
            "phase_units": PHASE_UNITS,
            "phases": {k: getattr(pm, k) for k in _PHASE_KEYS},
            "regime": pm.regime,
            "tau": pm.tau,
        },
        "sweep": {
            "delta": {
                "min": spec.delta_axis.start,
                "max": spec.delta_axis.stop,
                "count": spec.delta_axis.count,
            },
            "phase": None
            if spec.phase_axis is None
            else {
                "min": spec.phase_axis.start,
                "max": spec.phase_axis.stop,
                "count": spec.phase_axis.count,
                "linkage": {k: v for k, v in spec.phase_axis.linkage},
            },
            "engine": spec.engine,
        },
    }
    if objective is not None:
        params = {}
        for name, p in objective.parameters.items():
            if isinstance(p, search_mod.Fixed):
                params[name] = {"fixed": p.value}
            elif isinstance(p, search_mod.Bounds):
                params[name] = {"bounds": [p.lo, p.hi]}
            else:
                params[name] = {"linked": p.to, "factor": p.factor}
        doc["objective"] = {
            "kind": objective.kind,
            "parameters": params,
            "purity_weight": objective.purity_weight,
            "rate_weight": objective.rate_weight,
            "min_reverse": objective.min_reverse,
        }
    return doc


def _metadata_lines(result: sweep_mod.SweepResult, extra: dict | None = None) -> list[str]:
    spec = result.spec
    pm = spec.phases
    lines = [
        f"# family={spec.family}",
        f"# gamma={','.join(_fmt(g) for g in spec.gammas)}",
        f"# gamma_units={GAMMA_UNITS}",
        f"# regime={pm.regime}",
        f"# tau={_fmt(pm.tau)}",
        f"# phases={','.join(f'{k}={_fmt(getattr(pm, k))}' for k in _PHASE_KEYS)}",
        f"# delta_axis={_fmt(spec.delta_axis.start)},{_fmt(spec.delta_axis.stop)},"
        f"{spec.delta_axis.count}",
    ]
    if spec.phase_axis is None:
        lines.append("# phase_axis=none")
    else:
        ax = spec.phase_axis
        linkage = ";".join(f"{k}:{_fmt(v)}" for k, v in ax.linkage)
        lines.append(
            f"# phase_axis={_fmt(ax.start)},{_fmt(ax.stop)},{ax.count} linkage {linkage}"
        )
    lines.append(f"# engine={spec.engine}")
    if result.engine_discrepancy is not None:
        lines.append(f"# max_engine_discrepancy={_fmt(result.engine_discrepancy)}")
    for key, value in (extra or {}).items():
        lines.append(f"# {key}={value}")
    return lines


CSV_HEADER = "delta,phi,T_Ng,T_Ns,T_M_rev,R_M,T2,eta,residual,flags"


def write_csv(result: sweep_mod.SweepResult, stream, extra: dict | None = None) -> None:
    """Emit the grid in detuning-major row order with metadata up front."""
    for line in _metadata_lines(result, extra):
        stream.write(line + "\n")
    stream.write(CSV_HEADER + "\n")
    for j, d in enumerate(result.delta):
        for i, p in enumerate(result.phi):
            cell = result.cell(i, j)
            flags = ";".join(cell.flags)
            row = [_fmt(d), _fmt(p)] + [_fmt(v) for v in cell.as_row()] + [flags]
            stream.write(",".join(row) + "\n")


def result_as_json(result: sweep_mod.SweepResult, extra: dict | None = None) -> dict:
    payload = {
        "metadata": {k: v for k, v in result.metadata.items() if k != "timestamp"},
        "delta": [float(x) for x in result.delta],
        "phi": [float(x) for x in result.phi],
        "rates": {k: result.rates[k].tolist() for k in sweep_mod.RATE_FIELDS},
        "flags": [[";".join(c) for c in row] for row in result.flags],
    }
    if result.engine_discrepancy is not None:
        payload["max_engine_discrepancy"] = result.engine_discrepancy
    payload.update(extra or {})
    return payload


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config parse failure at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _cmd_spectrum(args) -> int:
    spec, _ = parse_config(_load_config(args.config))
    if args.engine:
        engine = {"closed": "closed", "solver": "solver", "both": "both"}[args.engine]
        spec = replace(spec, engine=engine)
    result = sweep_mod.run_sweep(spec)
    stream, close = _open_out(args.out)
    try:
        if args.json:
            json.dump(result_as_json(result), stream, indent=2)
            stream.write("\n")
        else:
            write_csv(result, stream)
    finally:
        if close:
            stream.close()
    return 0


def _cmd_figure(args) -> int:
    preset = sweep_mod.figure_preset(args.id)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = {}
    for key, spec in preset.sweeps.items():
        if args.delta_count:
            spec = replace(spec, delta_axis=replace(spec.delta_axis, count=args.delta_count))
        if args.phase_count and spec.phase_axis is not None:
            spec = replace(spec, phase_axis=replace(spec.phase_axis, count=args.phase_count))
        results[key] = sweep_mod.run_sweep(spec)
    for panel in preset.panels:
        path = out_dir / f"{preset.figure}{panel.panel}.csv"
        with open(path, "w") as stream:
            write_csv(
                results[panel.sweep],
                stream,
                extra={"figure": preset.figure, "panel": panel.panel, "column": panel.column},
            )
        print(path)
    return 0


def _cmd_validate(args) -> int:
    report = validate_mod.run_validation(draws=args.draws, seed=args.seed)
    for line in report.lines():
        print(line)
    return 0 if report.passed else 1


def _cmd_search(args) -> int:
    spec, objective = parse_config(_load_config(args.config))
    if objective is None:
        raise ConfigError("the configuration has no objective block")
    try:
        report = search_mod.grid_refine_search(objective, budget=args.budget)
    except search_mod.NoFeasiblePointError as exc:
        print(f"search failed: {exc}", file=sys.stderr)
        return 1
    stream, close = _open_out(args.out)
    try:
        if args.json:
            payload = {
                "best_params": report.best_params,
                "objective_value": report.objective_value,
                "rates": dict(zip(sweep_mod.RATE_FIELDS, report.rates.as_row())),
                "evaluations": report.evaluations,
                "degenerate_plateau": report.degenerate_plateau,
                "solver_discrepancy": report.solver_discrepancy,
                "trace": [
                    {"evaluation": e, "value": v, "point": list(pt)}
                    for e, v, pt in report.trace
                ],
            }
            json.dump(payload, stream, indent=2)
            stream.write("\n")
        else:
            stream.write("# search report\n")
            for name in sorted(report.best_params):
                stream.write(f"param {name}={_fmt(report.best_params[name])}\n")
            stream.write(f"objective={_fmt(report.objective_value)}\n")
            for name, value in zip(sweep_mod.RATE_FIELDS, report.rates.as_row()):
                stream.write(f"rate {name}={_fmt(value)}\n")
            stream.write(f"evaluations={report.evaluations}\n")
            stream.write(f"degenerate_plateau={report.degenerate_plateau}\n")
            stream.write(f"solver_discrepancy={_fmt(report.solver_discrepancy)}\n")
            for e, v, pt in report.trace:
                point = ",".join(_fmt(x) for x in pt)
                stream.write(f"trace {e} {_fmt(v)} {point}\n")
    finally:
        if close:
            stream.close()
    return 0


def _cmd_dump_config(args) -> int:
    if args.figure:
        preset = sweep_mod.figure_preset(args.figure)
        key = sorted(preset.sweeps)[0]
        doc = dump_config(preset.sweeps[key])
    else:
        if not args.config:
            raise ConfigError("dump-config needs a config path or --figure")
        spec, objective = parse_config(_load_config(args.config))
        doc = dump_config(spec, objective)
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wgscatter",
        description="Single-photon scattering spectra for atom-bridged waveguide pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="run a sweep from a config file, emit CSV")
    p.add_argument("config")
    p.add_argument("--engine", choices=("closed", "solver", "both"))
    p.add_argument("--out", default="-")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("figure", help="emit the CSV set for a named preset")
    p.add_argument("id", choices=sweep_mod.FIGURE_IDS)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--delta-count", type=int, default=0)
    p.add_argument("--phase-count", type=int, default=0)
    p.set_defaults(func=_cmd_figure)

    p = sub.add_parser("validate", help="random-draw conservation and oracle checks")
    p.add_argument("--draws", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("search", help="optimize parameters for a config's objective")
    p.add_argument("config")
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--out", default="-")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("dump-config", help="print the canonical form of a config")
    p.add_argument("config", nargs="?")
    p.add_argument("--figure", choices=sweep_mod.FIGURE_IDS)
    p.set_defaults(func=_cmd_dump_config)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
