"""Projection measurements in the path basis and finite-shot sampling."""

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidDensityMatrix
from .state import as_density

EXACT = "exact"
PRNG_NAME = "numpy.random.PCG64"
SAMPLER_NAME = "sequential-binomial"
SAMPLER_VERSION = 1

_CLAMP_TOL = 1e-12
_SUM_TOL = 1e-9
_DIAG_IMAG_TOL = 1e-9
_SEED_MASK = (1 << 64) - 1


class ProbabilityDistribution:
    """Outcome probabilities of a projection measurement.

    Entries within ``1e-12`` of ``[0, 1]`` are clamped into range; the
    result must sum to one within ``1e-9``.
    """

    __slots__ = ("_probs",)

    def __init__(self, probs):
        p = np.asarray(probs, dtype=np.float64).copy()
        if p.ndim != 1 or p.size == 0:
            raise ValueError(f"probabilities must be a non-empty vector, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("probabilities contain non-finite entries")
        if np.any(p < -_CLAMP_TOL) or np.any(p > 1 + _CLAMP_TOL):
            raise ValueError(f"probabilities outside [0, 1]: {p}")
        p = np.clip(p, 0.0, 1.0)
        if abs(p.sum() - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {p.sum():.12g}, expected 1")
        p.setflags(write=False)
        object.__setattr__(self, "_probs", p)

    def __setattr__(self, name, value):
        raise AttributeError("ProbabilityDistribution is immutable")

    @property
    def probs(self):
        return self._probs

    def __len__(self):
        return self._probs.size

    def __array__(self, dtype=None, copy=None):
        return self._probs.copy() if dtype is None else self._probs.astype(dtype)

    def __repr__(self):
        return f"ProbabilityDistribution({self._probs.tolist()})"


@dataclass(frozen=True)
class ShotRecord:
    counts: tuple
    total_shots: int
    seed: int
    setup_id: str = ""

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValueError("counts must be nonnegative")
        if self.total_shots < 1:
            raise ValueError("total_shots must be >= 1")
        if sum(counts) != self.total_shots:
            raise ValueError(f"counts sum to {sum(counts)}, expected {self.total_shots}")
        object.__setattr__(self, "counts", counts)

    def to_dict(self):
        return {
            "setup_id": self.setup_id,
            "seed": self.seed,
            "total_shots": self.total_shots,
            "counts": list(self.counts),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, payload):
        return cls(
            counts=tuple(payload["counts"]),
            total_shots=int(payload["total_shots"]),
            seed=int(payload["seed"]),
            setup_id=str(payload["setup_id"]),
        )


def projection_probabilities(rho):
    """``P_i = rho_ii`` for a projection onto the path basis."""
    rho = as_density(rho)
    diag = np.diag(rho.entries)
    if np.max(np.abs(diag.imag)) >= _DIAG_IMAG_TOL:
        raise InvalidDensityMatrix("diagonal has a non-negligible imaginary part")
    try:
        return ProbabilityDistribution(diag.real)
    except ValueError as exc:
        raise InvalidDensityMatrix(str(exc)) from None


def derive_seed(seed, setup_id):
    """Per-setup seed ``seed XOR H(setup_id)``, with ``H`` the first 8 bytes of SHA-256."""
    digest = hashlib.sha256(setup_id.encode("utf-8")).digest()
    return (int(seed) & _SEED_MASK) ^ int.from_bytes(digest[:8], "little")


def sample_counts(probs, shots, seed, setup_id=""):
    """Draw multinomial counts by a chain of conditional binomials.

    Outcome ``i`` receives ``Binomial(remaining, p_i / remaining_mass)``.
    The generator is PCG64 seeded with ``seed`` (reduced mod 2**64).
    """
    if not isinstance(probs, ProbabilityDistribution):
        probs = ProbabilityDistribution(probs)
    if isinstance(shots, bool) or not isinstance(shots, (int, np.integer)) or shots < 1:
        raise ValueError(f"shots must be a positive integer, got {shots!r}")
    rng = np.random.Generator(np.random.PCG64(int(seed) & _SEED_MASK))
    p = probs.probs
    tails = np.cumsum(p[::-1])[::-1]
    counts = np.zeros(p.size, dtype=np.int64)
    remaining = int(shots)
    for i in range(p.size - 1):
        if remaining == 0:
            break
        if tails[i + 1] <= 0.0:
            q = 1.0
        else:
            q = min(p[i] / tails[i], 1.0) if tails[i] > 0.0 else 0.0
        c = int(rng.binomial(remaining, q))
        counts[i] = c
        remaining -= c
    counts[-1] += remaining
    return ShotRecord(tuple(counts.tolist()), int(shots), int(seed), setup_id)


def estimate_probabilities(record):
    """Relative frequencies ``counts / total_shots``."""
    counts = np.asarray(record.counts, dtype=np.float64)
    return ProbabilityDistribution(counts / record.total_shots)
