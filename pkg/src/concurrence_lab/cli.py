"""Command-line interface: ``concurrence-lab {simulate,plan,verify,sweep,random-state}``.

Exit codes: 0 success, 2 bad arguments or malformed input file, 3 state
invariant violation, 4 verification failure.
"""

import argparse
import math
import re
import sys

import numpy as np

from .exceptions import ConcurrenceLabError, MalformedStateFile
from .measurement import EXACT
from .optics import emit_netlist
from .oracle import HaarSeed, exact_concurrence, random_haar_state, random_mixed_state
from .protocol import SCHEMES, concurrence, plan, run_plan, statistics
from .report import format_number, report_to_csv, report_to_json, simulate
from .state import MixedBipartiteState, PureBipartiteState, dump_state, load_state, reduced_density

EXIT_USAGE = 2
EXIT_INVARIANT = 3
EXIT_VERIFY = 4
VERIFY_TOL = 1e-9

_ANGLE_RE = re.compile(r"^([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\*?pi(?:/((?:\d+(?:\.\d*)?|\.\d+)))?$")


class UsageError(Exception):
    pass


def parse_dims(text):
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if not m or int(m.group(1)) < 1 or int(m.group(2)) < 1:
        raise argparse.ArgumentTypeError(f"expected dimensions like 2x3, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def parse_dims_list(text):
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise argparse.ArgumentTypeError("empty dimension list")
    return [parse_dims(t) for t in items]


def parse_shots(text):
    if text == EXACT:
        return EXACT
    try:
        n = int(float(text)) if re.fullmatch(r"\d+(\.0*)?([eE]\+?\d+)?", text) else None
    except ValueError:
        n = None
    if n is None or n < 1:
        raise argparse.ArgumentTypeError(f"shots must be a positive integer or 'exact', got {text!r}")
    return n


def parse_angle(text):
    """Parse ``0.3``, ``pi/8`` or ``3*pi/4``."""
    text = text.strip().lower()
    m = _ANGLE_RE.fullmatch(text)
    if m:
        coeff = m.group(1)
        if coeff in ("", "+"):
            coeff_v = 1.0
        elif coeff == "-":
            coeff_v = -1.0
        else:
            coeff_v = float(coeff)
        denom = float(m.group(2)) if m.group(2) else 1.0
        if denom == 0:
            raise argparse.ArgumentTypeError(f"division by zero in angle {text!r}")
        return coeff_v * math.pi / denom
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"angle must be finite, got {text!r}")
    return value


def _parse_list(text, item_parser):
    return [item_parser(t) for t in text.split(",") if t.strip()]


def theta_state(theta):
    """``cos(theta)|01> + sin(theta)|10>``."""
    return PureBipartiteState(2, 2, [0.0, math.cos(theta), math.sin(theta), 0.0])


def bell_state():
    s = 1.0 / math.sqrt(2.0)
    return PureBipartiteState(2, 2, [s, 0.0, 0.0, s])


def _load_source(args):
    if args.state is not None:
        return load_state(args.state)
    return random_haar_state(HaarSeed(args.seed, args.random))


def _source_config(args):
    return {
        "state_path": args.state,
        "random": None if args.random is None else f"{args.random[0]}x{args.random[1]}",
    }


def _write(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# --- commands ---------------------------------------------------------------


def cmd_simulate(args):
    source = _load_source(args)
    config = {
        **_source_config(args),
        "subsystem": args.subsystem,
        "scheme": args.scheme,
        "shots": args.shots,
        "seed": args.seed,
        "format": args.format,
    }
    report = simulate(
        source, scheme=args.scheme, shots=args.shots, seed=args.seed,
        subsystem=args.subsystem, config=config,
    )
    text = report_to_json(report) if args.format == "json" else report_to_csv(report)
    _write(text, args.output)
    return 0


def cmd_plan(args):
    if args.dim < 2:
        raise UsageError(f"dim must be >= 2, got {args.dim}")
    _write(emit_netlist(plan(args.dim, args.scheme)), args.output)
    return 0


def verify_dims(dims, trials, seed):
    """Max deviation of both exact-mode schemes from the oracle over ``trials`` states."""
    worst = {scheme: 0.0 for scheme in SCHEMES}
    plans = {}
    for t in range(trials):
        state = random_haar_state(HaarSeed(seed + t, dims))
        rho = reduced_density(state, "A")
        truth = exact_concurrence(state)
        for scheme in SCHEMES:
            p = plans.setdefault(scheme, plan(dims[0], scheme))
            est = concurrence(statistics(run_plan(rho, p), p))
            worst[scheme] = max(worst[scheme], abs(est - truth))
    return worst


def cmd_verify(args):
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    for dims in args.dims:
        if dims[0] < 2:
            raise UsageError(f"measured subsystem A must have dimension >= 2, got {dims[0]}")
    lines = ["dims   trials  max_dev_sequential      max_dev_parallel        status"]
    failed = False
    for dims in args.dims:
        worst = verify_dims(dims, args.trials, args.seed)
        ok = max(worst.values()) <= VERIFY_TOL
        failed |= not ok
        lines.append(
            f"{dims[0]}x{dims[1]:<4} {args.trials:<7} {worst['sequential']:<23.3e} "
            f"{worst['parallel']:<23.3e} {'ok' if ok else 'FAIL'}"
        )
    _write("\n".join(lines) + "\n", args.output)
    return EXIT_VERIFY if failed else 0


def _seed_stream(seed, n):
    return [int(s.generate_state(1, np.uint64)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


def sweep_theta(thetas, scheme, shots, seed):
    rows = []
    for theta in thetas:
        state = theta_state(theta)
        report = simulate(state, scheme=scheme, shots=shots, seed=seed, subsystem="A")
        truth = exact_concurrence(state)
        rows.append((theta, report["concurrence"], truth, abs(report["concurrence"] - truth)))
    return rows


def sweep_shots(state, shots_list, n_seeds, scheme, seed, subsystem="auto"):
    """One row per shot count: mean estimate and RMS error over ``n_seeds`` seeds."""
    from .report import measured_state

    rho, _, _ = measured_state(state, subsystem)
    truth = exact_concurrence(state) if isinstance(state, PureBipartiteState) else None
    p = plan(rho.dim, scheme)
    rows = []
    for shots in shots_list:
        estimates = np.array([
            concurrence(statistics(run_plan(rho, p, shots=shots, seed=s), p, shots=shots, seed=s))
            for s in _seed_stream([seed, shots], n_seeds)
        ])
        rms = float(np.sqrt(np.mean((estimates - truth) ** 2)))
        rows.append((shots, float(estimates.mean()), truth, rms))
    return rows


def _rows_to_csv(rows):
    out = ["parameter,concurrence_estimate,concurrence_exact,abs_error"]
    out.extend(",".join(format_number(v) for v in row) for row in rows)
    return "\n".join(out) + "\n"


def cmd_sweep(args):
    if (args.theta is None) == (args.shots_grid is None):
        raise UsageError("give exactly one of --theta or --shots-grid")
    if args.theta is not None:
        if not args.theta:
            raise UsageError("--theta grid is empty")
        rows = sweep_theta(args.theta, args.scheme, args.shots, args.seed)
    else:
        if not args.shots_grid:
            raise UsageError("--shots-grid is empty")
        if args.seeds < 1:
            raise UsageError("--seeds must be >= 1")
        if args.state is not None or args.random is not None:
            state = _load_source(args)
            if not isinstance(state, PureBipartiteState):
                raise UsageError("shot sweeps need a pure composite state")
        else:
            state = bell_state()
        rows = sweep_shots(state, args.shots_grid, args.seeds, args.scheme, args.seed, args.subsystem)
    _write(_rows_to_csv(rows), args.output)
    return 0


def cmd_random_state(args):
    dims = args.random
    if args.rank is None:
        state = random_haar_state(HaarSeed(args.seed, dims))
    else:
        rho = random_mixed_state(dims[0] * dims[1], args.rank, args.seed)
        state = MixedBipartiteState(dims[0], dims[1], rho)
    text = dump_state(state)
    _write(text, args.output)
    return 0


# --- parser -----------------------------------------------------------------


def _add_common(p, state_source=True):
    if state_source:
        src = p.add_mutually_exclusive_group(required=False)
        src.add_argument("--state", metavar="FILE", help="JSON state file")
        src.add_argument("--random", metavar="DAxDB", type=parse_dims, help="Haar-random state of these dims")
        p.add_argument("--subsystem", choices=("A", "B", "auto"), default="auto")
    p.add_argument("--scheme", choices=SCHEMES, default="sequential")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", metavar="FILE", default=None, help="output file (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="concurrence-lab",
        description="Simulate local I-concurrence measurement of bipartite pure states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the measurement protocol and write a report")
    _add_common(p)
    p.add_argument("--shots", type=parse_shots, default=EXACT, help="shots per setup, or 'exact'")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_simulate, needs_source=True)

    p = sub.add_parser("plan", help="print the optical netlist of a measurement plan")
    p.add_argument("dim", type=int)
    _add_common(p, state_source=False)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("verify", help="compare the pipeline against the oracle on random states")
    p.add_argument("--dims", type=parse_dims_list, default=parse_dims_list("2x2,3x3,2x4"),
                   help="comma separated list such as 2x2,4x6")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", metavar="FILE", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser(
        "sweep",
        help="CSV of concurrence over a theta grid or a shots grid",
        description="Theta grids use cos(t)|01>+sin(t)|10>; abs_error is |estimate - exact|. "
        "Shot grids report the mean estimate and the RMS error over --seeds seeds "
        "in the abs_error column.",
    )
    _add_common(p)
    p.add_argument("--theta", type=lambda s: _parse_list(s, parse_angle), help="e.g. 0,pi/8,pi/4")
    p.add_argument("--shots-grid", type=lambda s: _parse_list(s, parse_shots), help="e.g. 1000,10000")
    p.add_argument("--shots", type=parse_shots, default=EXACT, help="shots for theta sweeps")
    p.add_argument("--seeds", type=int, default=100, help="seeds per shot count")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("random-state", help="write a random state file")
    p.add_argument("--random", metavar="DAxDB", type=parse_dims, required=True)
    p.add_argument("--rank", type=int, default=None, help="emit a mixed composite of this rank")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", metavar="FILE", default=None)
    p.set_defaults(func=cmd_random_state)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "needs_source", False) and args.state is None and args.random is None:
        parser.error("one of --state or --random is required")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"concurrence-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MalformedStateFile, OSError) as exc:
        print(f"concurrence-lab: malformed input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConcurrenceLabError as exc:
        print(f"concurrence-lab: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"concurrence-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
