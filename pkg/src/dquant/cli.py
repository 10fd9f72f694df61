"""Command-line front-end for reproducible runs.

Commands: invert, verify, compare, phasematch, spdc, convert. Exit codes:
0 success, 1 a verification expectation failed, 2 bad input. All emitted
JSON/CSV is byte-deterministic for a given configuration; DQUANT_THREADS
caps how many independent checks run concurrently.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from math import pi, sqrt
from pathlib import Path

import numpy as np

from .dynamics import (
    EvolutionConfig,
    compare_schemes,
    conversion_series,
    frequency_conversion,
    spdc_squeezing,
    squeezing_series,
)
from .hamiltonian import (
    build_interaction,
    make_three_wave_modes,
    phase_matching_curve,
    prefactor_ratio,
)
from .maxwell import verify_ampere, verify_faraday
from .modes import make_uniform_medium_modes
from .serialize import csv_text, dumps, write_text
from .susceptibility import (
    MediumSpec,
    NonInvertibleLinearResponseError,
    gamma_from_eta,
    invert_series,
    load_medium,
)

EXIT_OK = 0
EXIT_EXPECTATION_FAILED = 1
EXIT_INPUT_ERROR = 2


def _max_workers() -> int:
    try:
        return max(1, int(os.environ.get("DQUANT_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Order-preserving map over independent work items, thread-capped."""
    workers = _max_workers()
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _emit(args, name: str, text: str):
    if args.out:
        path = write_text(Path(args.out) / name, text)
        print(f"wrote {path}")
    else:
        sys.stdout.write(text)


def _load_medium_arg(args) -> MediumSpec:
    if not args.medium:
        raise ValueError("this command needs --medium FILE")
    return load_medium(args.medium)


def cmd_invert(args) -> int:
    medium = _load_medium_arg(args)
    order = args.order or max(2, medium.highest_order)
    etas = invert_series(medium, order)
    gammas = [gamma_from_eta(t, medium.units) for t in etas]
    doc = {
        "dim": medium.dim,
        "max_order": order,
        "eta": {str(t.order): t.entries.ravel().tolist() for t in etas},
        "gamma": {str(t.order): t.entries.ravel().tolist() for t in gammas},
    }
    _emit(args, "inverse_tables.json", dumps(doc))
    return EXIT_OK


def cmd_verify(args) -> int:
    medium = _load_medium_arg(args)
    n_index = sqrt(1.0 + medium.chi(1).item())
    m_max = args.modes
    m_range = [m for m in range(-m_max, m_max + 1) if m != 0]
    ms = make_uniform_medium_modes(n_index, args.l_box, m_range, medium.units)

    jobs = [(scheme, law) for scheme in ("D-based", "E-linear-wrong")
            for law in ("faraday", "ampere")]

    def run(job):
        scheme, law = job
        fn = verify_faraday if law == "faraday" else verify_ampere
        return fn(ms, medium, scheme, units=medium.units)

    reports = parallel_map(run, jobs)
    print(f"{'scheme':<16} {'law':<8} {'m':>4} {'residual':<13} {'degrees':<8} pass")
    for rep in reports:
        degrees = f"{rep.degree_lhs} vs {rep.degree_rhs}"
        for m, residual in sorted(rep.residuals.items()):
            ok = residual < rep.tolerance and rep.degrees_match
            print(f"{rep.scheme:<16} {rep.law:<8} {m:>4} {residual:<13.3e} "
                  f"{degrees:<8} {ok}")
        if rep.leakage_norm:
            print(f"{rep.scheme:<16} {rep.law:<8} leakage norm {rep.leakage_norm:.3e} "
                  f"on {len(rep.leakage)} out-of-basis components")
        _emit(args, f"verify_{rep.law}_{rep.scheme}.json", dumps(rep.to_dict()))

    by_key = {(r.scheme, r.law): r for r in reports}
    d_ok = by_key[("D-based", "faraday")].passed and by_key[("D-based", "ampere")].passed
    wrong_faraday = by_key[("E-linear-wrong", "faraday")]
    if medium.highest_order == 1:
        expectation = d_ok and wrong_faraday.passed
    else:
        expectation = d_ok and (not wrong_faraday.passed) and not wrong_faraday.degrees_match
    return EXIT_OK if expectation else EXIT_EXPECTATION_FAILED


def cmd_compare(args) -> int:
    report = compare_schemes(args.observable, args.order)
    _emit(args, "comparison.json", dumps(report.to_dict()))
    print(f"{args.observable} order {args.order}: ratio {report.ratio:.6g} "
          f"(expected {report.expected_ratio:.6g}) -> {'pass' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_EXPECTATION_FAILED


def cmd_phasematch(args) -> int:
    grid = np.linspace(args.dk_min, args.dk_max, args.points)
    curve = phase_matching_curve(args.length, grid)
    text = csv_text(["delta_k", "phi2"], curve)
    _emit(args, "phase_matching.csv", text)
    return EXIT_OK


def _interaction_from_args(args):
    """Matched three-wave setup from the medium (or the built-in default)."""
    medium = load_medium(args.medium) if args.medium else MediumSpec.from_scalars([0.0, 0.4])
    units = medium.units
    n_index = sqrt(1.0 + medium.chi(1).item())
    ms, triple = make_three_wave_modes(1, 2, n_index, 2 * pi, units, length=args.length)
    etas = invert_series(medium, 2)
    profiles = tuple(m.profile for m in triple.modes())
    params, _ = build_interaction(triple, profiles, etas[1], units)
    return params, units


def _interaction_doc(params) -> dict:
    return {
        "theta": {"re": params.theta.real, "im": params.theta.imag},
        "delta_k": params.delta_k,
        "phi": params.phi,
        "ratio": float(prefactor_ratio(2)),
    }


def _sweep_output(args, rows, series_name: str, doc_extra: dict) -> None:
    long_rows = []
    for t, correct, wrong in rows:
        long_rows.append((t, correct, "correct"))
        long_rows.append((t, wrong, "wrong"))
    if args.format == "csv":
        _emit(args, f"{series_name}.csv", csv_text(["t", "observable", "scheme"], long_rows))
    else:
        doc = {"rows": [{"t": t, "observable": v, "scheme": s} for t, v, s in long_rows]}
        doc.update(doc_extra)
        _emit(args, f"{series_name}.json", dumps(doc))


def cmd_spdc(args) -> int:
    params, units = _interaction_from_args(args)
    cfg = EvolutionConfig(n_max=args.n_max, t_final=args.time, steps=args.steps,
                          pump=args.pump)
    pair = spdc_squeezing(params, cfg, hbar=units.hbar)
    rows = squeezing_series(params, cfg, hbar=units.hbar)
    _emit(args, "interaction.json", dumps(_interaction_doc(params)))
    _sweep_output(args, rows, "spdc_sweep", {})
    _emit(args, "spdc_result.json", dumps({
        "r_correct": pair.correct,
        "r_wrong": pair.wrong,
        "ratio": abs(pair.ratio),
        "truncation_safe": pair.truncation_safe,
    }))
    print(f"squeezing r: correct {pair.correct:.6g}, wrong {pair.wrong:.6g}, "
          f"|ratio| {abs(pair.ratio):.6g}")
    if not pair.truncation_safe:
        print("warning: truncation-unsafe evolution (population near cutoff)",
              file=sys.stderr)
    return EXIT_OK


def cmd_convert(args) -> int:
    params, units = _interaction_from_args(args)
    cfg = EvolutionConfig(n_max=args.n_max, t_final=args.time, steps=args.steps,
                          pump=args.pump)
    pair = frequency_conversion(params, cfg, hbar=units.hbar)
    rows = conversion_series(params, cfg, hbar=units.hbar)
    _emit(args, "interaction.json", dumps(_interaction_doc(params)))
    _sweep_output(args, rows, "conversion_sweep", {})
    _emit(args, "conversion_result.json", dumps({
        "p_correct": pair.correct,
        "p_wrong": pair.wrong,
        "ratio": pair.ratio if pair.correct else float("nan"),
        "truncation_safe": pair.truncation_safe,
    }))
    print(f"conversion P: correct {pair.correct:.6g}, wrong {pair.wrong:.6g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dquant",
        description="Displacement-field quantization checks for nonlinear dielectrics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, medium=False):
        p.add_argument("--out", default=None, help="output directory (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="csv",
                       help="sweep output format")
        if medium:
            p.add_argument("--medium", default=None, help="medium JSON file")

    p = sub.add_parser("invert", help="eta and gamma tables from a chi medium")
    common(p, medium=True)
    p.add_argument("--order", type=int, default=None, help="highest inverse order")
    p.set_defaults(fn=cmd_invert)

    p = sub.add_parser("verify", help="Faraday/Ampere operator checks for both schemes")
    common(p, medium=True)
    p.add_argument("--modes", type=int, default=2, help="max |m| of the basis")
    p.add_argument("--l-box", type=float, default=2 * pi, help="quantization box length")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("compare", help="correct-vs-wrong observable ratios")
    common(p)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--observable", choices=("coefficient", "squeezing", "conversion"),
                   default="coefficient")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("phasematch", help="sinc^2 phase-matching curve")
    common(p)
    p.add_argument("--length", type=float, default=1.0)
    p.add_argument("--dk-min", type=float, default=-4 * pi)
    p.add_argument("--dk-max", type=float, default=4 * pi)
    p.add_argument("--points", type=int, default=201)
    p.set_defaults(fn=cmd_phasematch)

    for name, fn, t_default in (("spdc", cmd_spdc, 4.0), ("convert", cmd_convert, 0.5)):
        p = sub.add_parser(name, help=f"{name} scheme comparison sweep")
        common(p, medium=True)
        p.add_argument("--n-max", type=int, default=16, help="Fock cutoff per mode")
        p.add_argument("--time", type=float, default=t_default, help="total evolution time")
        p.add_argument("--steps", type=int, default=20)
        p.add_argument("--pump", type=float, default=1.0, help="classical pump amplitude")
        p.add_argument("--length", type=float, default=None, help="interaction length")
        p.set_defaults(fn=fn)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (FileNotFoundError, json.JSONDecodeError, NonInvertibleLinearResponseError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
