"""Two-level qudit rotations ``U(k, l)`` and ``V(k, l)``.

``U`` is a 90 degree rotation about x in the ``|k>, |l>`` Bloch sphere and
maps ``Im(rho_kl)`` onto the populations of ``k`` and ``l``; ``V`` rotates
about y and maps ``Re(rho_kl)`` instead.  Matrix entries follow the fixed
sign convention

    U = [[1, i], [i, 1]] / sqrt(2),    V = [[1, 1], [-1, 1]] / sqrt(2)

embedded in rows/columns ``(k, l)`` of the ``d x d`` identity.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import as_square_matrix, check_positive_int
from .exceptions import (
    ConcurrenceLabError,
    DimensionMismatch,
    EqualIndices,
    IndexOutOfRange,
    MixedKinds,
    OverlappingPairs,
)
from .state import DensityMatrix, as_density

KINDS = ("U", "V")
UNITARITY_TOL = 1e-12

_SQRT_HALF = 1.0 / np.sqrt(2.0)
_BLOCKS = {
    "U": np.array([[1.0, 1.0j], [1.0j, 1.0]]) * _SQRT_HALF,
    "V": np.array([[1.0, 1.0], [-1.0, 1.0]]) * _SQRT_HALF,
}


class UnitaryMatrix:
    """Immutable ``dim x dim`` unitary, checked at construction."""

    __slots__ = ("dim", "_entries")

    def __init__(self, entries, tol=UNITARITY_TOL):
        arr = as_square_matrix(entries, "unitary", error=ConcurrenceLabError)
        err = np.max(np.abs(arr.conj().T @ arr - np.eye(arr.shape[0])))
        if err > tol:
            raise ConcurrenceLabError(f"matrix is not unitary (max deviation {err:.3g})")
        arr.setflags(write=False)
        object.__setattr__(self, "dim", arr.shape[0])
        object.__setattr__(self, "_entries", arr)

    def __setattr__(self, name, value):
        raise AttributeError("UnitaryMatrix is immutable")

    @property
    def entries(self):
        return self._entries

    def __array__(self, dtype=None, copy=None):
        return self._entries.copy() if dtype is None else self._entries.astype(dtype)

    def __matmul__(self, other):
        other_entries = other.entries if isinstance(other, UnitaryMatrix) else np.asarray(other)
        return UnitaryMatrix(self._entries @ other_entries)

    def __repr__(self):
        return f"UnitaryMatrix(dim={self.dim}, entries={self._entries!r})"


def check_pair(dim, k, l):
    """Validate ``0 <= k < l < dim``."""
    dim = check_positive_int(dim, "dim")
    for name, idx in (("k", k), ("l", l)):
        if isinstance(idx, bool) or not isinstance(idx, (int, np.integer)):
            raise TypeError(f"{name} must be an integer")
        if not 0 <= idx < dim:
            raise IndexOutOfRange(f"{name}={idx} outside 0..{dim - 1}")
    if k == l:
        raise EqualIndices(f"k and l must differ, both are {k}")
    if k > l:
        raise IndexOutOfRange(f"pair must be ordered k < l, got ({k}, {l})")
    return dim, int(k), int(l)


@dataclass(frozen=True)
class PairRotation:
    kind: str
    k: int
    l: int
    dim: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be 'U' or 'V', got {self.kind!r}")
        check_pair(self.dim, self.k, self.l)

    def matrix(self):
        return _build(self.kind, self.dim, self.k, self.l)


def _build(kind, dim, k, l):
    dim, k, l = check_pair(dim, k, l)
    w = np.eye(dim, dtype=np.complex128)
    idx = np.ix_((k, l), (k, l))
    w[idx] = _BLOCKS[kind]
    return UnitaryMatrix(w)


def build_U(dim, k, l):
    """``U(k, l)``: ``U_kk = U_ll = 1/sqrt2``, ``U_kl = U_lk = i/sqrt2``."""
    return _build("U", dim, k, l)


def build_V(dim, k, l):
    """``V(k, l)``: ``V_kk = V_ll = V_kl = 1/sqrt2``, ``V_lk = -1/sqrt2``."""
    return _build("V", dim, k, l)


def compose_disjoint(rotations, dim):
    """Product of pairwise-disjoint rotations of a single kind.

    The product is formed by explicit matrix multiplication in list order
    (``W = R_N ... R_1``); disjointness makes the order irrelevant, and the
    result is checked to be block diagonal on the rotated pairs.
    """
    dim = check_positive_int(dim, "dim")
    rotations = list(rotations)
    kinds = {r.kind for r in rotations}
    if len(kinds) > 1:
        raise MixedKinds(f"rotations mix kinds {sorted(kinds)}")
    seen = set()
    for r in rotations:
        if r.dim != dim:
            raise DimensionMismatch(f"rotation of dim {r.dim} in a dim-{dim} composition")
        for idx in (r.k, r.l):
            if idx in seen:
                raise OverlappingPairs(f"path index {idx} appears in more than one pair")
            seen.add(idx)

    w = np.eye(dim, dtype=np.complex128)
    for r in rotations:
        w = r.matrix().entries @ w

    mask = np.eye(dim, dtype=bool)
    for r in rotations:
        mask[np.ix_((r.k, r.l), (r.k, r.l))] = True
    if np.any(w[~mask] != 0):
        raise ConcurrenceLabError("composed rotation is not block diagonal")
    return UnitaryMatrix(w)


def apply_rotation(rho, w):
    """Return ``W rho W^dagger``."""
    rho = as_density(rho)
    w_entries = w.entries if isinstance(w, UnitaryMatrix) else UnitaryMatrix(w).entries
    if w_entries.shape[0] != rho.dim:
        raise DimensionMismatch(f"unitary dim {w_entries.shape[0]} != density dim {rho.dim}")
    out = w_entries @ rho.entries @ w_entries.conj().T
    return DensityMatrix(out, validate=False)
