"""
Command-line frontend.

    tunneltime sweep   --potential barrier --m 1 --V 2 --a 1 --E-min 0.1 --E-max 1.9 --steps 10 --out t.csv
    tunneltime compare --potential barrier --V 2 --a 1 --E-min 0.05 --E-max 1.9 --steps 20 --out cmp.csv
    tunneltime verify  [--tol 1e-8] [--out report.json]
    tunneltime report  --m 1 --V 2 --a 2.83 --E 1 --c 2.8284

Data goes to ``--out``; stdout only carries a summary.  Exit codes: 0 ok,
1 verification failure, 2 invalid input, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import phase_clock, weak_time
from .errors import TunnelTimeError, ThresholdError, WidthOverflowError
from .kinematics import ParticleContext, classify_regime, is_threshold
from .oracle import GridSpec, phase_time_numeric, verify_identities
from .scattering import PiecewisePotential, solve_piecewise, transmission_thick_approx

EXIT_OK, EXIT_VERIFY, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3

SWEEP_COLUMNS = ["E", "k", "pq", "T_phase", "T_steinberg", "T_dwell", "P_t", "P_r",
                 "v_eff", "regime", "superluminal", "note"]
COMPARE_COLUMNS = ["E", "T_phase", "T_steinberg", "T_dwell", "dwell_error", "ratio",
                   "ratio_formula", "dwell_minus_steinberg", "residual_phase",
                   "residual_steinberg", "P_t", "P_r", "note"]
POTENTIALS = ("step", "barrier", "well", "piecewise", "delta")


class SpecError(ValueError):
    """Invalid sweep specification (exit code 2)."""


@dataclass
class SweepSpec:
    potential: str = "barrier"
    m: float = 1.0
    V: Optional[float] = None
    C: Optional[float] = None
    a: Optional[float] = None
    b: float = 0.0
    E_min: Optional[float] = None
    E_max: Optional[float] = None
    steps: int = 10
    spacing: str = "lin"
    c: Optional[float] = None
    format: str = "csv"
    out: Optional[str] = None
    segments: Optional[list] = None
    delta_law: str = "Va2"

    def validate(self):
        if self.potential not in POTENTIALS:
            raise SpecError(f"unknown potential {self.potential!r}")
        if not self.m > 0:
            raise SpecError("m must be positive")
        if self.steps < 2:
            raise SpecError("steps must be at least 2")
        if self.spacing not in ("lin", "log"):
            raise SpecError("spacing must be lin or log")
        if self.format not in ("csv", "json"):
            raise SpecError("format must be csv or json")
        if self.E_min is None or self.E_max is None:
            raise SpecError("E-min and E-max are required")
        if not 0 < self.E_min < self.E_max:
            raise SpecError("need 0 < E-min < E-max")
        if self.c is not None and not self.c > 0:
            raise SpecError("c must be positive")
        if self.potential in ("barrier", "well", "delta") and not (self.a and self.a > 0):
            raise SpecError(f"{self.potential} needs a positive --a")
        if self.potential in ("barrier", "well", "step") and self.V is None:
            raise SpecError(f"{self.potential} needs --V")
        if self.potential == "step" and not self.V > 0:
            raise SpecError("step needs V > 0")
        if self.potential == "well" and not self.V < 0:
            raise SpecError("well needs V < 0")
        if self.potential == "delta":
            if self.C is None or not self.C > 0:
                raise SpecError("delta family needs a positive --C")
            if self.delta_law not in ("Va2", "Va"):
                raise SpecError("delta law must be Va2 or Va")
        if self.potential == "piecewise":
            if not self.segments:
                raise SpecError("piecewise needs segments")
            try:
                PiecewisePotential.from_list(self.segments)
            except (TunnelTimeError, TypeError, ValueError) as exc:
                raise SpecError(f"bad segments: {exc}") from None
        if self.b < 0:
            raise SpecError("b must be non-negative")

    def energies(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.E_min, self.E_max, self.steps)
        return np.linspace(self.E_min, self.E_max, self.steps)

    def barrier_height(self) -> float:
        if self.potential == "delta":
            return phase_clock.delta_family_height(self.C, self.a, self.delta_law)
        return self.V

    def build_potential(self) -> PiecewisePotential:
        if self.potential == "step":
            return PiecewisePotential.step(self.V)
        if self.potential == "piecewise":
            return PiecewisePotential.from_list(self.segments)
        return PiecewisePotential.barrier(self.barrier_height(), self.a)


def fmt(value) -> str:
    """12 significant digits; scientific notation outside [1e-6, 1e6)."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    v = float(value)
    if v == 0:
        return "0"
    if not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    if 1e-6 <= abs(v) < 1e6:
        return np.format_float_positional(v, precision=12, unique=False, fractional=False,
                                          trim="-")
    return np.format_float_scientific(v, precision=11, unique=False, trim="-")


def format_rows(rows: list, columns: list) -> list:
    return [{c: fmt(r.get(c)) for c in columns} for r in rows]


def write_rows(rows: list, columns: list, path: str, fmt_name: str, meta: dict):
    if fmt_name == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
            w.writeheader()
            w.writerows(format_rows(rows, columns))
    else:
        def clean(v):
            if isinstance(v, (float, np.floating)):
                return float(v) if math.isfinite(v) else None
            if isinstance(v, np.bool_):
                return bool(v)
            return v
        payload = {"spec": meta, "rows": [{c: clean(r.get(c)) for c in columns} for r in rows]}
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)


def _json_scalar(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def _notes(*parts) -> str:
    return "; ".join(p for p in parts if p)


def sweep_row(spec: SweepSpec, E: float) -> dict:
    """One output record; raises only on failures of the primary phase time."""
    ctx = ParticleContext(spec.m, float(E), spec.c)
    row = {"E": float(E), "k": ctx.k}
    pot = spec.build_potential()
    notes = []

    if any(is_threshold(ctx.E, s.V) for s in pot.segments):
        row["note"] = "threshold"
        return row

    if spec.potential == "step":
        V = spec.V
        row["pq"] = math.sqrt(2 * spec.m * abs(V - ctx.E))
        T = phase_clock.step_round_trip_time(ctx, V, spec.b)
        sol = solve_piecewise(ctx, pot)
        row.update(T_phase=T.value, P_t=sol.P_t, P_r=sol.P_r, regime=T.regime.label())
        notes.append("step: round-trip time; no steinberg/dwell/v_eff")
        row["note"] = _notes(*notes)
        return row

    if spec.potential == "piecewise":
        sol = solve_piecewise(ctx, pot)
        T = phase_time_numeric(pot, ctx)
        width = pot.x_right - pot.x_left if not pot.semi_infinite else None
        row.update(T_phase=T.value, P_t=sol.P_t, P_r=sol.P_r, regime=T.regime.label())
        notes.append("piecewise: numeric phase time; pq undefined")
        if width:
            try:
                row["T_dwell"] = weak_time.dwell_time(sol).value
            except TunnelTimeError as exc:
                notes.append(f"dwell: {exc}")
            row["v_eff"] = phase_clock.effective_velocity(T, width)
            if spec.c is not None:
                row["superluminal"] = row["v_eff"] > spec.c
        row["note"] = _notes(*notes)
        return row

    V, a = spec.barrier_height(), spec.a
    T = phase_clock.barrier_phase_time(ctx, V, a)
    row["pq"] = math.sqrt(2 * spec.m * abs(V - ctx.E))
    row["T_phase"] = T.value
    row["regime"] = T.regime.label()
    if T.method is phase_clock.Method.ASYMPTOTIC:
        notes.append("thick-barrier asymptotics")
    row["T_steinberg"] = weak_time.steinberg_time(ctx, V, a).value
    try:
        sol = solve_piecewise(ctx, pot)
        row["P_t"], row["P_r"] = sol.P_t, sol.P_r
        try:
            row["T_dwell"] = weak_time.dwell_time(sol).value
        except TunnelTimeError as exc:
            notes.append(f"dwell: {exc}")
    except WidthOverflowError:
        pt = transmission_thick_approx(ctx, V, a)
        row["P_t"], row["P_r"] = pt, 1.0 - pt
        notes.append("overflow: opaque-barrier transmission; dwell omitted")
    row["v_eff"] = phase_clock.effective_velocity(T, a)
    if spec.c is not None:
        row["superluminal"] = row["v_eff"] > spec.c
    if not T.regime.trustworthy:
        notes.append("untrustworthy regime")
    row["note"] = _notes(*notes)
    return row


def compare_row(spec: SweepSpec, E: float) -> dict:
    ctx = ParticleContext(spec.m, float(E), spec.c)
    V, a = spec.barrier_height(), spec.a
    if is_threshold(ctx.E, V):
        return {"E": float(E), "note": "threshold"}
    cmp = weak_time.partition_check(ctx, V, a)
    notes = []
    regime = classify_regime(ctx, V, a)
    if not regime.trustworthy:
        notes.append("untrustworthy regime")
    return {"E": float(E), "T_phase": cmp.T_phase, "T_steinberg": cmp.T_steinberg,
            "T_dwell": cmp.T_dwell, "dwell_error": cmp.dwell_error, "ratio": cmp.ratio,
            "ratio_formula": cmp.ratio_formula,
            "dwell_minus_steinberg": cmp.T_dwell - cmp.T_steinberg,
            "residual_phase": cmp.partition_residual,
            "residual_steinberg": cmp.partition_residual_steinberg,
            "P_t": cmp.P_t, "P_r": cmp.P_r, "note": _notes(*notes)}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _run_grid(spec: SweepSpec, row_fn, columns):
    rows, failed = [], []
    for E in spec.energies():
        try:
            rows.append(row_fn(spec, E))
        except ThresholdError:
            rows.append({"E": float(E), "note": "threshold"})
        except (TunnelTimeError, ArithmeticError) as exc:
            failed.append(float(E))
            rows.append({"E": float(E), "note": f"error: {exc}"})
    if spec.out:
        write_rows(rows, columns, spec.out, spec.format, dataclasses.asdict(spec))
    return rows, failed


def cmd_sweep(spec: SweepSpec, stream=None) -> int:
    stream = stream or sys.stdout
    rows, failed = _run_grid(spec, sweep_row, SWEEP_COLUMNS)
    ok = [r for r in rows if r.get("T_phase") is not None]
    print(f"sweep {spec.potential}: {len(rows)} rows ({len(ok)} with phase time) "
          f"-> {spec.out or '(not written)'}", file=stream)
    skipped = [fmt(r["E"]) for r in rows if r.get("note") == "threshold"]
    if skipped:
        print(f"threshold rows skipped: {', '.join(skipped)}", file=stream)
    if failed:
        print(f"numeric failure at E = {', '.join(fmt(e) for e in failed)}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_compare(spec: SweepSpec, stream=None) -> int:
    stream = stream or sys.stdout
    if spec.potential not in ("barrier", "delta"):
        raise SpecError("compare needs a barrier or delta-family potential")
    rows, failed = _run_grid(spec, compare_row, COMPARE_COLUMNS)
    good = [r for r in rows if r.get("T_dwell") is not None]
    if good:
        dev = max(abs(r["dwell_minus_steinberg"]) / r["T_steinberg"] for r in good)
        qerr = max(r["dwell_error"] for r in good)
        res_ph = min(abs(r["residual_phase"]) for r in good)
        res_st = max(abs(r["residual_steinberg"]) for r in good)
        print(f"compare: {len(rows)} rows -> {spec.out or '(not written)'}", file=stream)
        print(f"dwell vs steinberg: max relative deviation {dev:.3e} "
              f"(quadrature error <= {qerr:.1e})", file=stream)
        print(f"partition residual with phase times: min |res| {res_ph:.3e} (nonzero)",
              file=stream)
        print(f"partition residual with steinberg times: max |res| {res_st:.3e}", file=stream)
    if failed:
        print(f"numeric failure at E = {', '.join(fmt(e) for e in failed)}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_verify(tol: Optional[float] = None, out: Optional[str] = None,
               stream=None) -> int:
    stream = stream or sys.stdout
    report = verify_identities(GridSpec(tol=tol))
    for line in report.summary_lines():
        print(line, file=stream)
    for r in report.results.values():
        for f in r.failures[:3]:
            print(f"  {r.name}: {f['error']} at {f['point']}", file=stream)
    print("verify: " + ("PASS" if report.passed else "FAIL"), file=stream)
    if out:
        with open(out, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2, default=_json_scalar)
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_report(m: float, V: float, a: float, E: float, c: Optional[float] = None,
               stream=None) -> int:
    stream = stream or sys.stdout
    ctx = ParticleContext(m, E, c)
    say = lambda s="": print(s, file=stream)  # noqa: E731
    regime = classify_regime(ctx, V, a)
    say(f"m={fmt(m)} E={fmt(E)} V={fmt(V)} a={fmt(a)}" + (f" c={fmt(c)}" if c else ""))
    say(f"regime: {regime.label()}")
    if regime.regime.value == "threshold":
        say("WARNING: E = V, phase times diverge; rerun at E = V(1 +/- 1e-6)")
        return EXIT_OK
    if not regime.trustworthy:
        which = "E = V" if regime.near_threshold else "E = 0"
        say(f"WARNING: untrustworthy regime near {which}: clock expansion in the coupling "
            "energy breaks down")
    T = phase_clock.barrier_phase_time(ctx, V, a)
    try:
        sol = solve_piecewise(ctx, PiecewisePotential.barrier(V, a))
        say(f"P_t = {fmt(sol.P_t)}   P_r = {fmt(sol.P_r)}")
        TD = weak_time.dwell_time(sol)
        dwell = f"{fmt(TD.value)} (quadrature error {TD.error:.1e})"
    except WidthOverflowError:
        dwell = "n/a (barrier too thick for direct solution)"
    say(f"T_phase     = {fmt(T.value)}")
    say(f"T_steinberg = {fmt(weak_time.steinberg_time(ctx, V, a).value)}")
    say(f"T_dwell     = {dwell}")
    v_eff = phase_clock.effective_velocity(T, a)
    say(f"v_eff = a/T = {fmt(v_eff)}   (v = {fmt(ctx.k / m)})")
    if E < V:
        p = math.sqrt(2 * m * (V - E))
        say(f"p*a = {fmt(p * a)}   thick-barrier limit T = {fmt(phase_clock.hartman_limit(ctx, V).value)}")
        if p * a >= 3:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                say(f"opaque-barrier P_t ~ {fmt(transmission_thick_approx(ctx, V, a))}")
        if c is not None:
            a_star = phase_clock.superluminal_threshold(ctx, V)
            say(f"superluminal onset: a* = {fmt(a_star)}  (p*a* = 2mc/k = "
                f"{fmt(phase_clock.superluminal_pa(ctx))})")
            if a >= a_star * (1 - 1e-12):
                say("superluminal: thick-barrier velocity a*sqrt(E(V-E)) reaches c at this width")
            else:
                say("superluminal: below onset")
            say(f"v_eff > c: {'yes' if v_eff > c else 'no'}")
    else:
        say("over the barrier: no superluminal onset")
        if c is not None:
            say(f"v_eff > c: {'yes' if v_eff > c else 'no'}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

_FLAG_FIELDS = {"potential": "potential", "m": "m", "V": "V", "C": "C", "a": "a", "b": "b",
                "E_min": "E_min", "E_max": "E_max", "steps": "steps", "spacing": "spacing",
                "c": "c", "format": "format", "out": "out", "segments": "segments",
                "delta_law": "delta_law"}


def _parse_segments(text: str) -> list:
    """``"0:1:2,1:2:0"`` -> ``[[0, 1, 2], [1, 2, 0]]``; JSON lists are accepted too."""
    text = text.strip()
    if text.startswith("["):
        return json.loads(text)
    out = []
    for chunk in text.split(","):
        parts = chunk.split(":")
        if len(parts) != 3:
            raise SpecError(f"segment {chunk!r} is not x0:x1:V")
        out.append([float(p) for p in parts])
    return out


def _add_grid_flags(p: argparse.ArgumentParser):
    p.add_argument("--potential", choices=POTENTIALS)
    p.add_argument("--m", type=float)
    p.add_argument("--V", type=float)
    p.add_argument("--C", type=float, help="delta-family strength (V a^2 or V a)")
    p.add_argument("--delta-law", dest="delta_law", choices=("Va2", "Va"))
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--segments", help="piecewise segments x0:x1:V,... or a JSON list")
    p.add_argument("--E-min", dest="E_min", type=float)
    p.add_argument("--E-max", dest="E_max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--spacing", choices=("lin", "log"))
    p.add_argument("--c", type=float)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--config", help="JSON file with SweepSpec fields; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tunneltime",
                                     description="Phase, weak-measurement and dwell times "
                                                 "for 1D piecewise-constant potentials.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_grid_flags(sub.add_parser("sweep", help="energy sweep to CSV/JSON"))
    _add_grid_flags(sub.add_parser("compare", help="compare time definitions"))
    v = sub.add_parser("verify", help="check closed forms against the numerical oracle")
    v.add_argument("--tol", type=float, help="override every identity tolerance")
    v.add_argument("--out", help="write the JSON report here")
    r = sub.add_parser("report", help="describe a single barrier point")
    r.add_argument("--m", type=float, default=1.0)
    r.add_argument("--V", type=float, required=True)
    r.add_argument("--a", type=float, required=True)
    r.add_argument("--E", type=float, required=True)
    r.add_argument("--c", type=float)
    return parser


def spec_from_args(args) -> SweepSpec:
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"cannot read config: {exc}") from None
        names = {f.name for f in dataclasses.fields(SweepSpec)}
        unknown = set(values) - names
        if unknown:
            raise SpecError(f"unknown config keys: {sorted(unknown)}")
    for flag, name in _FLAG_FIELDS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[name] = _parse_segments(v) if name == "segments" else v
    try:
        spec = SweepSpec(**values)
    except TypeError as exc:
        raise SpecError(str(exc)) from None
    spec.validate()
    return spec


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.tol, args.out)
        if args.command == "report":
            return cmd_report(args.m, args.V, args.a, args.E, args.c)
        spec = spec_from_args(args)
        if args.command == "sweep":
            return cmd_sweep(spec)
        return cmd_compare(spec)
    except (SpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (TunnelTimeError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
