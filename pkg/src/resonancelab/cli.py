"""
Batch front end.

    resonance-lab <command> --scenario FILE [--scenario FILE ...] --out DIR
                  [--jobs N] [--t-max T] [--resolution R]

Commands: geometry, evolve, rates, oscillatory_tables, all. Data files are CSV
with floats printed to 17 significant digits; run metadata goes to
manifest.json and a plain-text summary to report.txt. The exit status is 0
exactly when no report row failed.
"""

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from agno.utils.log import log_error, log_info

from .config import LabSettings
from .duhamel import Scenario, evolve_series
from .errors import (
    AliasingError,
    HypothesisError,
    LabConfigurationError,
    ResolutionError,
    ResonanceLabError,
    ScenarioFileError,
    WrapAroundError,
)
from .oscillatory import (
    LEADING_CASES,
    compare_leading_term,
    fresnel_g1,
    fresnel_g2,
    g1_asymptotic,
    g2_asymptotic,
    reference_spec,
)
from .rate_lab import fit_decay, lower_bound_probe, rate_verdicts, strichartz_integrated
from .scenario_file import ScenarioFile, parse_scenario

Command = Literal["geometry", "evolve", "rates", "oscillatory_tables", "all"]
Verdict = Literal["pass", "fail", "reported"]

COMMANDS: Tuple[str, ...] = ("geometry", "evolve", "rates", "oscillatory_tables", "all")
NORM_FIELDS = ["label", "t", "norm_kind", "q", "s", "value"]
GEOMETRY_FIELDS = ["label", "set", "segment", "index", "xi", "eta"]
POINT_FIELDS = ["label", "xi", "eta", "phi_xi", "phi_etaeta", "transversal", "refined"]
VERDICT_FIELDS = [
    "experiment",
    "label",
    "quantity",
    "predicted_exponent",
    "predicted_log_power",
    "measured_exponent",
    "r_squared",
    "tolerance",
    "verdict",
]
SPECIAL_FIELDS = ["function", "x", "re", "im"]
LEADING_FIELDS = [
    "case",
    "t",
    "oracle_re",
    "oracle_im",
    "leading_re",
    "leading_im",
    "remainder",
    "error_order",
    "branch",
]
OUTPUT_FILES: Dict[str, Tuple[str, ...]] = {
    "geometry": ("geometry.csv", "points.csv"),
    "evolve": ("norms.csv",),
    "rates": ("norms.csv", "verdicts.csv"),
    "oscillatory_tables": ("special_functions.csv", "leading_terms.csv", "verdicts.csv"),
}
SPECIAL_GRID = np.linspace(-10.0, 10.0, 201)
EXPANSION_GRID = np.geomspace(10.0, 100.0, 12)
LEADING_TIMES = np.geomspace(1e2, 1e4, 9)
# (function, claimed remainder order, acceptance threshold on the fitted slope)
EXPANSION_CHECKS = (
    ("g1", -2.0, -1.8),
    ("g2_positive", -5.0 / 6.0, -0.7),
    ("g2_negative", -5.0 / 7.0, -0.6),
)
LEADING_TOLERANCE = 0.1
LOWER_BOUND_TOLERANCE = 0.05
STRICHARTZ_RATIO = 1.05
REMEDIES = {
    WrapAroundError: "enlarge [grid] length or lower t_max",
    AliasingError: "refine the grid spacing or shrink the symbol support",
    ResolutionError: "refine the grid or widen the data",
    HypothesisError: "choose data and symbol satisfying the stated hypothesis",
    LabConfigurationError: "check the scenario values against their documented ranges",
}


def fmt(value: Any) -> str:
    """CSV rendering: floats to 17 significant digits, booleans lowercase."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


@dataclass(frozen=True)
class ReportRow:
    experiment: str
    label: str
    quantity: str
    predicted_exponent: float
    predicted_log_power: int
    measured_exponent: float
    r_squared: float
    tolerance: float
    verdict: Verdict

    def as_record(self) -> Dict[str, str]:
        return {name: fmt(getattr(self, name)) for name in VERDICT_FIELDS}


@dataclass
class JobOutput:
    norms: List[Dict[str, Any]] = field(default_factory=list)
    geometry: List[Dict[str, Any]] = field(default_factory=list)
    points: List[Dict[str, Any]] = field(default_factory=list)
    special: List[Dict[str, Any]] = field(default_factory=list)
    leading: List[Dict[str, Any]] = field(default_factory=list)
    verdicts: List[ReportRow] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)


def _pass(ok: bool) -> Verdict:
    return "pass" if ok else "fail"


def _remedy(error: ResonanceLabError) -> str:
    for kind, remedy in REMEDIES.items():
        if isinstance(error, kind):
            return remedy
    return "inspect the scenario"


def _geometry_rows(sc: Scenario, out: JobOutput) -> None:
    geom = sc.geometry
    for name, polylines in (("gamma", geom.gamma), ("delta", geom.delta)):
        for segment, line in enumerate(polylines):
            for index, (xi, eta) in enumerate(line):
                out.geometry.append(
                    {
                        "label": sc.label,
                        "set": name,
                        "segment": segment,
                        "index": index,
                        "xi": xi,
                        "eta": eta,
                    }
                )
    for point in geom.points:
        out.points.append(
            {
                "label": sc.label,
                "xi": point.xi0,
                "eta": point.eta0,
                "phi_xi": point.phi_xi,
                "phi_etaeta": point.phi_etaeta,
                "transversal": point.transversal,
                "refined": point.refined,
            }
        )


def _rate_rows(
    sf: ScenarioFile,
    sc: Scenario,
    times: np.ndarray,
    settings: LabSettings,
    out: JobOutput,
    with_verdicts: bool,
) -> None:
    experiments = sf.experiments
    result = evolve_series(sc, times, sf.norm_specs(), experiments.method)
    for spec, values in result.norm_table.items():
        for t, value in zip(result.times, values):
            out.norms.append(
                {
                    "label": sc.label,
                    "t": t,
                    "norm_kind": spec.kind,
                    "q": spec.q,
                    "s": spec.s,
                    "value": value,
                }
            )
    if not with_verdicts:
        return
    for verdict in rate_verdicts(sc, result, experiments.regime, sf.data.s, settings):
        label = verdict.norm.label
        out.verdicts.append(
            ReportRow(
                "rates",
                sc.label,
                f"{label} exponent",
                verdict.predicted.exponent,
                verdict.predicted.log_power,
                verdict.measured.fitted_exponent,
                verdict.measured.r_squared,
                settings.rate_tolerance,
                _pass(bool(verdict.upper_bound_respected)),
            )
        )
        out.verdicts.append(
            ReportRow(
                "rates",
                sc.label,
                f"{label} sharpness gap",
                verdict.predicted.exponent,
                verdict.predicted.log_power,
                verdict.sharpness_gap,
                verdict.measured.r_squared,
                settings.rate_tolerance,
                "reported",
            )
        )


def _lower_bound_rows(
    sf: ScenarioFile, sc: Scenario, times: np.ndarray, settings: LabSettings, out: JobOutput
) -> None:
    for q in sf.experiments.q:
        verdict = lower_bound_probe(sc, q, times, settings)
        measured = verdict.measured
        out.verdicts.append(
            ReportRow(
                "lower_bound",
                sc.label,
                f"{verdict.norm.label} lower law",
                verdict.predicted.exponent,
                verdict.predicted.log_power,
                measured.fitted_exponent if measured.model == "power" else measured.coefficient,
                measured.r_squared,
                LOWER_BOUND_TOLERANCE,
                _pass(bool(verdict.lower_bound_respected)),
            )
        )


def _strichartz_rows(sf: ScenarioFile, sc: Scenario, out: JobOutput) -> None:
    assert sf.experiments.strichartz is not None
    p, q, horizon = sf.experiments.strichartz
    full = strichartz_integrated(sc, p, q, horizon)
    half = strichartz_integrated(sc, p, q, horizon / 2.0)
    growth = math.log(full / half) / math.log(2.0) if half > 0 and full > 0 else 0.0
    tolerance = math.log(STRICHARTZ_RATIO) / math.log(2.0)
    out.verdicts.append(
        ReportRow(
            "strichartz",
            sc.label,
            f"L{p:g}tL{q:g} growth T={horizon:g}",
            0.0,
            0,
            growth,
            1.0,
            tolerance,
            _pass(growth <= tolerance),
        )
    )


def scenario_job(
    sf: ScenarioFile,
    command: Command,
    t_max: Optional[float],
    resolution: Optional[int],
    settings: LabSettings,
) -> JobOutput:
    """Build one scenario and run the experiments `command` asks for."""
    out = JobOutput()
    label = sf.label
    try:
        sc = sf.build(t_max, resolution, settings)
        times = sf.time_grid(t_max)
        if command in ("geometry", "all"):
            _geometry_rows(sc, out)
        if command in ("evolve", "rates", "all"):
            _rate_rows(sf, sc, times, settings, out, command != "evolve")
        if command in ("rates", "all"):
            if sf.experiments.lower_bound:
                _lower_bound_rows(sf, sc, times, settings, out)
            if sf.experiments.strichartz is not None:
                _strichartz_rows(sf, sc, out)
    except ResonanceLabError as e:
        message = f"{label}: {e} (remedy: {_remedy(e)})"
        log_error(message)
        out.errors.append(message)
        out.verdicts.append(
            ReportRow("error", label, type(e).__name__, 0.0, 0, 0.0, 0.0, 0.0, "fail")
        )
    return out


def _complex_columns(prefix: str, value: complex) -> Dict[str, float]:
    return {f"{prefix}_re": value.real, f"{prefix}_im": value.imag}


def oscillatory_job(settings: LabSettings) -> JobOutput:
    """G1/G2 tables, expansion remainders and oracle vs leading-term comparisons."""
    out = JobOutput()
    for name, values in (
        ("G1", fresnel_g1(SPECIAL_GRID)),
        ("G2", fresnel_g2(SPECIAL_GRID)),
    ):
        for x, value in zip(SPECIAL_GRID, values):
            out.special.append(
                {"function": name, "x": x, "re": value.real, "im": value.imag}
            )

    remainders = {
        "g1": np.abs(fresnel_g1(EXPANSION_GRID) - g1_asymptotic(EXPANSION_GRID)),
        "g2_positive": np.abs(
            fresnel_g2(EXPANSION_GRID) - g2_asymptotic(EXPANSION_GRID)
        ),
        "g2_negative": np.abs(
            fresnel_g2(-EXPANSION_GRID) - g2_asymptotic(-EXPANSION_GRID)
        ),
    }
    for name, claimed, threshold in EXPANSION_CHECKS:
        fit = fit_decay(EXPANSION_GRID, remainders[name], "power")
        out.verdicts.append(
            ReportRow(
                "expansion",
                name,
                "remainder slope in x",
                claimed,
                0,
                fit.fitted_exponent,
                fit.r_squared,
                threshold - claimed,
                _pass(fit.fitted_exponent <= threshold),
            )
        )

    for case in LEADING_CASES:
        try:
            comparisons = [
                compare_leading_term(reference_spec(case, float(t)), case, settings)  # type: ignore[arg-type]
                for t in LEADING_TIMES
            ]
        except ResonanceLabError as e:
            message = f"{case}: {e} (remedy: {_remedy(e)})"
            log_error(message)
            out.errors.append(message)
            out.verdicts.append(
                ReportRow("error", case, type(e).__name__, 0.0, 0, 0.0, 0.0, 0.0, "fail")
            )
            continue
        for item in comparisons:
            out.leading.append(
                {
                    "case": case,
                    "t": item.t,
                    **_complex_columns("oracle", item.oracle),
                    **_complex_columns("leading", item.leading),
                    "remainder": item.remainder,
                    "error_order": item.error_order,
                    "branch": item.branch,
                }
            )
        claimed = max(item.error_order for item in comparisons)
        fit = fit_decay(
            LEADING_TIMES, [max(item.remainder, 1e-300) for item in comparisons], "power"
        )
        out.verdicts.append(
            ReportRow(
                "leading_term",
                case,
                "remainder slope in t",
                claimed,
                0,
                fit.fitted_exponent,
                fit.r_squared,
                LEADING_TOLERANCE,
                _pass(fit.fitted_exponent <= claimed + LEADING_TOLERANCE),
            )
        )
    return out


def _write_csv(path: Path, fieldnames: Sequence[str], rows: Sequence[Dict[str, Any]]) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({name: fmt(row[name]) for name in fieldnames})


def _sorted(rows: List[Dict[str, Any]], *keys: str) -> List[Dict[str, Any]]:
    return sorted(rows, key=lambda row: tuple(row[k] for k in keys))


def _merge(outputs: Sequence[JobOutput]) -> JobOutput:
    merged = JobOutput()
    for out in outputs:
        merged.norms.extend(out.norms)
        merged.geometry.extend(out.geometry)
        merged.points.extend(out.points)
        merged.special.extend(out.special)
        merged.leading.extend(out.leading)
        merged.verdicts.extend(out.verdicts)
        merged.errors.extend(out.errors)
    return merged


def _write_outputs(
    merged: JobOutput, command: Command, out_dir: Path, sources: Sequence[str]
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    wanted = set(
        name
        for key, names in OUTPUT_FILES.items()
        if command in (key, "all")
        for name in names
    )
    verdicts = sorted(
        merged.verdicts, key=lambda r: (r.experiment, r.label, r.quantity)
    )
    tables = {
        "geometry.csv": (GEOMETRY_FIELDS, merged.geometry, ("label", "set", "segment", "index")),
        "points.csv": (POINT_FIELDS, merged.points, ("label", "xi", "eta")),
        "norms.csv": (NORM_FIELDS, merged.norms, ("label", "t", "norm_kind", "q", "s")),
        "special_functions.csv": (SPECIAL_FIELDS, merged.special, ("function", "x")),
        "leading_terms.csv": (LEADING_FIELDS, merged.leading, ("case", "t")),
    }
    for name, (fields, rows, keys) in tables.items():
        if name in wanted:
            _write_csv(out_dir / name, fields, _sorted(rows, *keys))
    if "verdicts.csv" in wanted:
        _write_csv(out_dir / "verdicts.csv", VERDICT_FIELDS, [r.as_record() for r in verdicts])

    failures = [r for r in verdicts if r.verdict == "fail"]
    lines = [f"command: {command}", f"scenarios: {len(sources)}"]
    lines += [f"{r.verdict.upper():8} {r.experiment} {r.label} {r.quantity}" for r in verdicts]
    lines += [f"ERROR    {message}" for message in merged.errors]
    lines.append(f"{len(failures)} failing row(s) of {len(verdicts)}")
    (out_dir / "report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    manifest = {
        "command": command,
        "created": datetime.now(timezone.utc).isoformat(),
        "scenarios": list(sources),
        "files": sorted(wanted | {"report.txt"}),
        "failures": len(failures),
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def run(
    files: Sequence[ScenarioFile],
    command: Command,
    out_dir: Path,
    jobs: int = 1,
    t_max: Optional[float] = None,
    resolution: Optional[int] = None,
    settings: Optional[LabSettings] = None,
) -> int:
    """Run `command` over parsed scenario files and write every artifact.

    Returns:
        0 when no report row failed, 1 otherwise
    """
    if command not in COMMANDS:
        raise LabConfigurationError(f"unknown command {command!r}")
    settings = settings or LabSettings.from_env()
    jobs = max(1, int(jobs))
    log_info(f"{command}: {len(files)} scenario(s) on {jobs} worker(s)")

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = []
        if command != "oscillatory_tables":
            futures = [
                pool.submit(scenario_job, sf, command, t_max, resolution, settings)
                for sf in files
            ]
        # an empty scenario list under `all` is a vacuous run
        if command == "oscillatory_tables" or (command == "all" and files):
            futures.append(pool.submit(oscillatory_job, settings))
        outputs = [future.result() for future in futures]

    merged = _merge(outputs)
    _write_outputs(merged, command, out_dir, [sf.source for sf in files])
    failed = sum(1 for row in merged.verdicts if row.verdict == "fail")
    log_info(f"{command}: {failed} failing row(s), artifacts in {out_dir}")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resonance-lab",
        description="Space-time resonance laboratory for quadratic dispersive systems.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument(
        "--scenario",
        action="append",
        type=Path,
        default=[],
        help="Scenario file. Repeatable.",
    )
    parser.add_argument(
        "--out",
        type=Path,
        default=None,
        help="Output directory (default: $RESONANCE_LAB_OUT or ./resonance-out).",
    )
    parser.add_argument("--jobs", type=int, default=1, help="Concurrent scenario jobs.")
    parser.add_argument("--t-max", type=float, default=None, help="Override t_max.")
    parser.add_argument(
        "--resolution", type=int, default=None, help="Override the trace resolution."
    )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = LabSettings.from_env()
    out_dir = args.out or settings.output_dir

    diagnostics: List[str] = []
    files: List[ScenarioFile] = []
    for path in args.scenario:
        try:
            files.append(parse_scenario(path))
        except ScenarioFileError as e:
            diagnostics.extend(e.diagnostics)
    if diagnostics:
        for line in diagnostics:
            print(line, file=sys.stderr)
        return 2

    if args.t_max is not None and args.t_max <= 0:
        print("--t-max must be positive", file=sys.stderr)
        return 2
    try:
        return run(
            files, args.command, out_dir, args.jobs, args.t_max, args.resolution, settings
        )
    except ResonanceLabError as e:
        print(f"[error] {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
