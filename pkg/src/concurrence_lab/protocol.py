"""Measurement plans, the T / T' / T'' statistics, purity and I-concurrence.

A plan has one unrotated (identity) setup plus setups applying ``U`` and
``V`` rotations that together cover every path pair ``k < l`` once per kind.
The *sequential* scheme rotates one pair per setup (``d**2 - d + 1``
setups); the *parallel* scheme rotates a maximal set of disjoint pairs per
setup, scheduled as round-robin rounds (``2d - 1`` setups for even ``d``,
``2d + 1`` for odd ``d``).

In every scheme the statistics sum the squares of *all* ``d`` outcome
probabilities of each setup, including unrotated (idle) paths.  For odd
``d`` in the parallel scheme each path is idle in exactly one ``U`` round
and one ``V`` round; the idle-path terms are what give the odd-``d``
concurrence its ``2 (d - 1) T`` coefficient.  That reading is an
interpretation checked numerically against the exact purity, not something
stated outright by the measurement recipe.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .exceptions import (
    DimensionTooSmall,
    DuplicateSetup,
    InvalidSetup,
    MissingSetup,
    WrongScheme,
)
from .measurement import (
    EXACT,
    ProbabilityDistribution,
    derive_seed,
    estimate_probabilities,
    projection_probabilities,
    sample_counts,
)
from .rotations import PairRotation, apply_rotation, compose_disjoint
from .state import DensityMatrix, as_density
from ._validation import check_same_dim

SEQUENTIAL = "sequential"
PARALLEL = "parallel"
SCHEMES = (SEQUENTIAL, PARALLEL)
SETUP_KINDS = ("identity", "U", "V")
_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class Setup:
    id: str
    kind: str
    pairs: tuple = ()

    def __post_init__(self):
        if self.kind not in SETUP_KINDS:
            raise InvalidSetup(f"unknown setup kind {self.kind!r}")
        pairs = tuple(tuple(int(i) for i in p) for p in self.pairs)
        if self.kind == "identity" and pairs:
            raise InvalidSetup("identity setup cannot rotate any pair")
        if self.kind != "identity" and not pairs:
            raise InvalidSetup(f"{self.kind} setup {self.id!r} has no pairs")
        used = [i for p in pairs for i in p]
        if any(len(p) != 2 or p[0] >= p[1] for p in pairs):
            raise InvalidSetup(f"pairs must be ordered (k, l) with k < l: {pairs}")
        if len(set(used)) != len(used):
            raise InvalidSetup(f"pairs within setup {self.id!r} overlap: {pairs}")
        object.__setattr__(self, "pairs", pairs)

    def rotations(self, dim):
        return [PairRotation(self.kind, k, l, dim) for k, l in self.pairs]

    def unitary(self, dim):
        """The setup's algebraic transformation (identity for ``kind='identity'``)."""
        return compose_disjoint(self.rotations(dim), dim)


@dataclass(frozen=True)
class MeasurementPlan:
    dim: int
    scheme: str
    setups: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "setups", tuple(self.setups))
        check_plan(self)

    def __len__(self):
        return len(self.setups)

    def __iter__(self):
        return iter(self.setups)

    def setup(self, setup_id):
        for s in self.setups:
            if s.id == setup_id:
                return s
        raise KeyError(setup_id)

    def by_kind(self, kind):
        return [s for s in self.setups if s.kind == kind]


def expected_setup_count(dim, scheme):
    if scheme == SEQUENTIAL:
        return dim * dim - dim + 1
    if scheme == PARALLEL:
        return 2 * dim - 1 if dim % 2 == 0 else 2 * dim + 1
    raise ValueError(f"unknown scheme {scheme!r}")


def check_plan(plan):
    """Raise :class:`InvalidSetup` if ``plan`` breaks a plan invariant."""
    d = plan.dim
    if plan.scheme not in SCHEMES:
        raise InvalidSetup(f"unknown scheme {plan.scheme!r}")
    if d < 2:
        raise DimensionTooSmall(f"dim must be >= 2, got {d}")
    ids = [s.id for s in plan.setups]
    if len(set(ids)) != len(ids):
        raise InvalidSetup("setup ids must be unique")
    if len(plan.by_kind("identity")) != 1:
        raise InvalidSetup("plan needs exactly one identity setup")
    all_pairs = sorted(combinations(range(d), 2))
    for kind in ("U", "V"):
        setups = plan.by_kind(kind)
        pairs = [p for s in setups for p in s.pairs]
        if sorted(pairs) != all_pairs:
            raise InvalidSetup(f"{kind} setups do not cover every pair exactly once")
        if any(i >= d for p in pairs for i in p):
            raise InvalidSetup(f"{kind} setup references a path outside 0..{d - 1}")
        if plan.scheme == SEQUENTIAL and any(len(s.pairs) != 1 for s in setups):
            raise InvalidSetup("sequential setups rotate exactly one pair")
        if plan.scheme == PARALLEL:
            if any(len(s.pairs) != d // 2 for s in setups):
                raise InvalidSetup("parallel setups rotate floor(d/2) disjoint pairs")
            if d % 2 == 1:
                idle = [next(iter(set(range(d)) - {i for p in s.pairs for i in p})) for s in setups]
                if sorted(idle) != list(range(d)):
                    raise InvalidSetup(f"{kind} rounds must leave each path idle exactly once")
    if len(plan.setups) != expected_setup_count(d, plan.scheme):
        raise InvalidSetup(
            f"{plan.scheme} plan for d={d} needs {expected_setup_count(d, plan.scheme)} setups"
        )


def round_robin(n):
    """Circle-method round robin for ``n`` players.

    For even ``n`` player ``n - 1`` stays fixed while ``0 .. n-2`` rotate,
    giving ``n - 1`` rounds of ``n / 2`` disjoint pairs.  For odd ``n`` the
    even schedule for ``n + 1`` is built and pairs with the phantom player
    ``n`` are dropped, leaving one idle player per round.
    """
    if n < 2:
        raise DimensionTooSmall(f"need at least 2 players, got {n}")
    m = n if n % 2 == 0 else n + 1
    fixed = m - 1
    ring = m - 1
    rounds = []
    for r in range(m - 1):
        centre = (m - 2 - r) % ring
        pairs = [(centre, fixed)]
        for i in range(1, m // 2):
            pairs.append(((centre + i) % ring, (centre - i) % ring))
        pairs = [tuple(sorted(p)) for p in pairs if fixed < n or fixed not in p]
        rounds.append(sorted(pairs))
    return rounds


def plan(dim, scheme=SEQUENTIAL):
    """Build the measurement plan for a ``dim``-dimensional subsystem.

    Examples
    --------
    >>> [s.pairs for s in plan(4, "parallel").by_kind("U")]
    [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]
    """
    if isinstance(dim, bool) or not isinstance(dim, (int, np.integer)):
        raise TypeError("dim must be an integer")
    dim = int(dim)
    if dim < 2:
        raise DimensionTooSmall(f"dim must be >= 2, got {dim}")
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    if scheme == SEQUENTIAL:
        groups = [[p] for p in combinations(range(dim), 2)]
    else:
        groups = round_robin(dim)
    setups = [Setup("I", "identity")]
    for kind in ("U", "V"):
        setups.extend(Setup(f"{kind}{j}", kind, tuple(g)) for j, g in enumerate(groups))
    return MeasurementPlan(dim, scheme, tuple(setups))


def _setup_probabilities(rho, setup, dim):
    if setup.kind == "identity":
        return projection_probabilities(rho)
    return projection_probabilities(apply_rotation(rho, setup.unitary(dim)))


def run_plan(rho, plan, shots=EXACT, seed=0):
    """Measure ``rho`` in every setup of ``plan``.

    With ``shots == "exact"`` the ideal probabilities are returned; otherwise
    each setup is sampled with ``shots`` repetitions using the per-setup seed
    ``derive_seed(seed, setup.id)``, so results do not depend on execution
    order.  Output follows plan order.
    """
    rho = as_density(rho)
    check_same_dim(rho.dim, plan.dim)
    results = []
    for setup in plan.setups:
        probs = _setup_probabilities(rho, setup, plan.dim)
        if shots != EXACT:
            record = sample_counts(probs, shots, derive_seed(seed, setup.id), setup.id)
            probs = estimate_probabilities(record)
        results.append((setup.id, probs))
    return results


@dataclass(frozen=True)
class ProtocolStatistics:
    T: float
    T_prime: float
    T_double_prime: float
    dim: int
    scheme: str
    shots_per_setup: object = EXACT
    seed: object = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if min(self.T_prime, self.T_double_prime) < 0:
            raise ValueError("T' and T'' must be nonnegative")


def _results_by_setup(results, plan):
    by_id = {}
    for setup_id, probs in results:
        if setup_id in by_id:
            raise DuplicateSetup(f"setup {setup_id!r} reported twice")
        by_id[setup_id] = probs
    known = {s.id for s in plan.setups}
    missing = known - set(by_id)
    if missing:
        raise MissingSetup(f"no results for setups {sorted(missing)}")
    extra = set(by_id) - known
    if extra:
        raise InvalidSetup(f"results for unknown setups {sorted(extra)}")
    return by_id


def _square_sum(probs):
    p = np.asarray(probs.probs if isinstance(probs, ProbabilityDistribution) else probs)
    if p.size == 0:
        raise InvalidSetup("empty probability vector")
    return float(np.dot(p, p))


def statistics(results, plan, shots=EXACT, seed=None):
    """Accumulate ``T``, ``T'`` and ``T''``.

    ``T`` is the sum of squared identity-setup probabilities; ``T'`` and
    ``T''`` sum the squared probabilities of every ``U`` and ``V`` setup
    respectively, over all ``d`` outcomes.
    """
    by_id = _results_by_setup(results, plan)
    sums = {"identity": 0.0, "U": 0.0, "V": 0.0}
    for setup in plan.setups:
        probs = by_id[setup.id]
        if len(np.asarray(probs)) != plan.dim:
            raise InvalidSetup(f"setup {setup.id!r} has {len(probs)} outcomes, expected {plan.dim}")
        sums[setup.kind] += _square_sum(probs)
    return ProtocolStatistics(
        T=sums["identity"],
        T_prime=sums["U"],
        T_double_prime=sums["V"],
        dim=plan.dim,
        scheme=plan.scheme,
        shots_per_setup=shots,
        seed=seed,
    )


def t_coefficient(dim, scheme):
    """Coefficient of ``T`` in ``purity = T' + T'' - coeff * T - 1``."""
    if scheme == SEQUENTIAL:
        return dim * dim - 2 * dim - 1
    if scheme == PARALLEL:
        return dim - 3 if dim % 2 == 0 else dim - 1
    raise ValueError(f"unknown scheme {scheme!r}")


class PurityEstimate(NamedTuple):
    raw: float
    clamped: float


def _clamp_purity(value, dim):
    return float(min(max(value, 1.0 / dim), 1.0))


def purity_from_stats(stats):
    """``Tr(rho**2) = T' + T'' - (d**2 - 2d - 1) T - 1`` for sequential statistics.

    Returns the raw estimate and a copy clamped to ``[1/d, 1]``.
    """
    if stats.scheme != SEQUENTIAL:
        raise WrongScheme("purity_from_stats needs sequential statistics")
    raw = stats.T_prime + stats.T_double_prime - t_coefficient(stats.dim, SEQUENTIAL) * stats.T - 1.0
    return PurityEstimate(float(raw), _clamp_purity(raw, stats.dim))


def scheme_purity(stats):
    """Purity estimate for either scheme, ``1 - radicand / 2``."""
    raw = 1.0 - radicand(stats) / 2.0
    return PurityEstimate(float(raw), _clamp_purity(raw, stats.dim))


def radicand(stats):
    """``4 + 2 c T - 2 (T' + T'')`` with the scheme's ``T`` coefficient ``c``."""
    c = t_coefficient(stats.dim, stats.scheme)
    return float(4.0 + 2.0 * c * stats.T - 2.0 * (stats.T_prime + stats.T_double_prime))


def radicand_floor(stats):
    """Rounding floor of :func:`radicand`: ``8 eps`` times the sum of its term magnitudes.

    Product states leave a residue of at most ``2 eps`` times that scale.
    """
    c = t_coefficient(stats.dim, stats.scheme)
    scale = 4.0 + 2.0 * abs(c) * stats.T + 2.0 * (stats.T_prime + stats.T_double_prime)
    return 8.0 * _EPS * scale


def concurrence(stats, return_radicand=False):
    """I-concurrence from protocol statistics.

    A radicand at or below :func:`radicand_floor` (negative values are
    possible under shot noise) yields 0; pass ``return_radicand=True`` to
    also get the raw radicand.
    """
    r = radicand(stats)
    c = float(np.sqrt(r)) if r > radicand_floor(stats) else 0.0
    return (c, r) if return_radicand else c


def concurrence_stderr(results, plan, stats):
    """Delta-method standard error of the concurrence for finite shots.

    Each setup contributes ``Var(sum p_i**2) ~ 4 (sum p**3 - (sum p**2)**2) / n``.
    Returns ``None`` in exact mode or when the estimate is 0, where the
    linearisation is undefined.  The interval is not certified: it vanishes
    wherever the first-order sensitivity does (for example at uniform
    distributions).
    """
    shots = stats.shots_per_setup
    if shots == EXACT:
        return None
    c, r = concurrence(stats, return_radicand=True)
    if c <= 0.0:
        return None
    by_id = _results_by_setup(results, plan)
    coeff = t_coefficient(plan.dim, plan.scheme)
    var_r = 0.0
    for setup in plan.setups:
        p = np.asarray(by_id[setup.id].probs)
        var_sq = max(4.0 * (np.sum(p**3) - np.sum(p**2) ** 2) / shots, 0.0)
        weight = 2.0 * coeff if setup.kind == "identity" else -2.0
        var_r += weight * weight * var_sq
    return float(np.sqrt(var_r) / (2.0 * c))


def reconstruct_offdiagonals(results, plan):
    """Rebuild the full subsystem density matrix from sequential results.

    Diagonal from the identity setup; for each pair ``(k, l)``,
    ``Im(rho_kl) = (P'_k - P'_l) / 2`` and ``Re(rho_kl) = (P''_k - P''_l) / 2``.
    Sampled results need not give a positive semidefinite matrix, so the
    return value is not validated.
    """
    if plan.scheme != SEQUENTIAL:
        raise WrongScheme("reconstruction needs a sequential plan")
    by_id = _results_by_setup(results, plan)
    d = plan.dim
    rho = np.zeros((d, d), dtype=np.complex128)
    rho[np.diag_indices(d)] = np.asarray(by_id[plan.by_kind("identity")[0].id].probs)
    imag = {}
    real = {}
    for setup in plan.setups:
        if setup.kind == "identity":
            continue
        (k, l), = setup.pairs
        p = np.asarray(by_id[setup.id].probs)
        target = imag if setup.kind == "U" else real
        target[(k, l)] = 0.5 * (p[k] - p[l])
    for (k, l), re in real.items():
        rho[k, l] = complex(re, imag[(k, l)])
        rho[l, k] = rho[k, l].conjugate()
    return DensityMatrix(rho, validate=False)
