"""Independent reference computations and random test instances.

Nothing here goes through the rotation/measurement pipeline: purities are
``Tr(rho**2)`` computed directly and concurrences come from the reduced
state or, for mixed two-qubit states, from the spin-flip formula.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_int
from .exceptions import InvalidDensityMatrix, InvalidRank
from .state import (
    DensityMatrix,
    PureBipartiteState,
    as_density,
    reduced_density,
    validate_state,
)

EIG_TOL = 1e-10
_SIGMA_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


@dataclass(frozen=True)
class HaarSeed:
    seed: int
    dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 2 or min(dims) < 1:
            raise ValueError(f"dims must be two positive integers, got {self.dims}")
        object.__setattr__(self, "dims", dims)


def exact_purity(rho):
    """``Tr(rho**2) = sum_ij |rho_ij|**2``."""
    rho = as_density(rho)
    return float(np.sum(np.abs(rho.entries) ** 2))


def exact_concurrence(state, subsystem="A"):
    """I-concurrence ``sqrt(2 (1 - Tr rho_A**2))`` of a pure composite state."""
    validate_state(state)
    purity = exact_purity(reduced_density(state, subsystem))
    return float(np.sqrt(max(2.0 * (1.0 - purity), 0.0)))


def subsystem_bound(rho_sub):
    """``sqrt(2 (1 - Tr rho**2))`` for a subsystem state; an upper bound if the composite is mixed."""
    return float(np.sqrt(max(2.0 * (1.0 - exact_purity(rho_sub)), 0.0)))


def wootters_concurrence(rho_composite):
    """Two-qubit concurrence ``max(0, l1 - l2 - l3 - l4)``.

    ``l_i`` are the decreasing square roots of the eigenvalues of
    ``rho (sy x sy) rho* (sy x sy)``.  With ``rho = X X^dagger`` these are
    the singular values of ``X^T (sy x sy) X``, which avoids square roots of
    near-zero eigenvalues.  Eigencomponents below ``EIG_TOL`` are dropped.
    """
    rho = as_density(rho_composite)
    if rho.dim != 4:
        raise InvalidDensityMatrix(f"Wootters concurrence needs a 4x4 matrix, got {rho.dim}")
    w, v = np.linalg.eigh(rho.entries)
    keep = w > EIG_TOL
    x = v[:, keep] * np.sqrt(w[keep])
    lam = np.zeros(4)
    sv = np.linalg.svd(x.T @ _SIGMA_YY @ x, compute_uv=False)
    lam[: sv.size] = sv
    lam = np.sort(lam)[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def _rng(seed):
    return np.random.default_rng(np.random.PCG64(int(seed) & ((1 << 64) - 1)))


def random_haar_state(seed):
    """Haar-random pure state from normalised complex Gaussian amplitudes."""
    if not isinstance(seed, HaarSeed):
        raise TypeError("seed must be a HaarSeed")
    dim_a, dim_b = seed.dims
    rng = _rng(seed.seed)
    n = dim_a * dim_b
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureBipartiteState(dim_a, dim_b, z / np.linalg.norm(z))


def random_mixed_state(dim, rank, seed):
    """``G G^dagger / Tr(G G^dagger)`` for a Gaussian ``dim x rank`` matrix ``G``."""
    dim = check_positive_int(dim, "dim")
    if isinstance(rank, bool) or not isinstance(rank, (int, np.integer)) or not 1 <= rank <= dim:
        raise InvalidRank(f"rank must be in 1..{dim}, got {rank!r}")
    rng = _rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m / np.trace(m).real)


def random_density_matrix(dim, seed):
    """Full-rank random density matrix (rank ``dim`` Gram construction)."""
    return random_mixed_state(dim, dim, seed)
