"""End-to-end protocol runs and their JSON reports."""

import datetime as _dt
import json
from importlib import resources

import numpy as np

from . import __version__
from .measurement import EXACT, PRNG_NAME, SAMPLER_NAME, SAMPLER_VERSION
from .protocol import (
    concurrence,
    concurrence_stderr,
    plan as make_plan,
    run_plan,
    scheme_purity,
    statistics,
)
from .state import (
    DensityMatrix,
    MixedBipartiteState,
    PureBipartiteState,
    normalize,
    partial_trace,
    reduced_density,
)

AUTO = "auto"
TIMESTAMP_KEY = "timestamp"


def select_subsystem(dims, subsystem=AUTO):
    """Resolve ``"auto"`` to the smaller subsystem of dimension >= 2 (``A`` on ties)."""
    if subsystem == AUTO:
        if min(dims) < 2:
            return "A" if dims[0] >= 2 else "B"
        return "A" if dims[0] <= dims[1] else "B"
    if subsystem not in ("A", "B"):
        raise ValueError(f"subsystem must be 'A', 'B' or 'auto', got {subsystem!r}")
    return subsystem


def _unit_trace(rho):
    return DensityMatrix(rho.entries / np.trace(rho.entries).real, validate=False)


def measured_state(source, subsystem=AUTO, tol=None):
    """Return ``(rho, chosen_subsystem, upper_bound_only)`` for a state source.

    Inputs accepted within tolerance are rescaled to exact unit norm/trace
    before measurement.
    """
    if isinstance(source, PureBipartiteState):
        chosen = select_subsystem(source.dims, subsystem)
        return reduced_density(normalize(source), chosen, tol=tol), chosen, False
    if isinstance(source, MixedBipartiteState):
        chosen = select_subsystem(source.dims, subsystem)
        rho = partial_trace(_unit_trace(source.rho), source.dims, chosen, tol=tol)
        return rho, chosen, True
    if not isinstance(source, DensityMatrix):
        source = DensityMatrix(source, tol=tol)
    return _unit_trace(source), None, True


def generator_info():
    return {
        "package": "concurrence_lab",
        "version": __version__,
        "prng": PRNG_NAME,
        "sampler": SAMPLER_NAME,
        "sampler_version": SAMPLER_VERSION,
        "numpy": np.__version__,
    }


def simulate(source, scheme="sequential", shots=EXACT, seed=0, subsystem=AUTO, config=None, tol=None):
    """Run the full measurement protocol on ``source`` and build a report dict.

    ``source`` may be a pure composite state, a mixed composite state or a
    bare subsystem density matrix.  For the latter two the concurrence is
    only an upper bound and ``upper_bound_only`` is set.
    """
    rho, chosen, upper_bound_only = measured_state(source, subsystem, tol=tol)
    the_plan = make_plan(rho.dim, scheme)
    results = run_plan(rho, the_plan, shots=shots, seed=seed)
    stats = statistics(results, the_plan, shots=shots, seed=seed)
    conc, rad = concurrence(stats, return_radicand=True)
    purity = scheme_purity(stats)
    dims = list(source.dims) if hasattr(source, "dims") else None
    report = {
        "dim": rho.dim,
        "dims": dims,
        "subsystem": chosen,
        "scheme": scheme,
        "shots": shots,
        "seed": seed,
        "n_setups": len(the_plan.setups),
        "T": stats.T,
        "T_prime": stats.T_prime,
        "T_double_prime": stats.T_double_prime,
        "purity_raw": purity.raw,
        "purity": purity.clamped,
        "radicand_raw": rad,
        "concurrence": conc,
        "concurrence_stderr": concurrence_stderr(results, the_plan, stats),
        "upper_bound_only": upper_bound_only,
        "probabilities": {sid: [float(x) for x in p.probs] for sid, p in results},
        "config": dict(config) if config is not None else {
            "scheme": scheme, "shots": shots, "seed": seed, "subsystem": subsystem,
        },
        "generator": generator_info(),
        TIMESTAMP_KEY: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    return report


def report_to_json(report):
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def strip_timestamp(report):
    return {k: v for k, v in report.items() if k != TIMESTAMP_KEY}


def report_schema():
    text = resources.files("concurrence_lab").joinpath("schemas/report.schema.json").read_text("utf-8")
    return json.loads(text)


CSV_FIELDS = (
    "dim", "scheme", "subsystem", "shots", "seed", "T", "T_prime", "T_double_prime",
    "purity_raw", "purity", "radicand_raw", "concurrence", "concurrence_stderr",
    "upper_bound_only",
)


def format_number(x):
    """17 significant digits, locale independent."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    if x is None:
        return ""
    return str(x)


def report_to_csv(report):
    header = ",".join(CSV_FIELDS)
    row = ",".join(format_number(report[f]) for f in CSV_FIELDS)
    return header + "\n" + row + "\n"
