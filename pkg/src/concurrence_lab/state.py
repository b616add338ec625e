"""Bipartite pure states, subsystem density matrices and partial traces.

Composite amplitudes use the row-major layout ``i = iA * dim_b + iB`` with
0-based subsystem indices.
"""

import json
import math

import numpy as np

from ._validation import (
    as_complex_vector,
    as_square_matrix,
    check_density_entries,
    check_positive_int,
    resolve_tolerance,
)
from .exceptions import InvalidDensityMatrix, InvalidState, MalformedStateFile, ZeroNorm

ZERO_NORM_THRESHOLD = 1e-30
SUBSYSTEMS = ("A", "B")


class PureBipartiteState:
    """Pure state of a composite system ``A x B``.

    Parameters
    ----------
    dim_a, dim_b : int
        Subsystem dimensions.
    amplitudes : array-like of complex, length ``dim_a * dim_b``
        Row-major composite amplitudes.
    tol : float, optional
        Tolerance for the unit-norm check. Defaults to the package tolerance.
    normalized : bool, default=True
        Whether to enforce the unit-norm invariant. ``normalize`` builds
        unnormalized instances internally.
    """

    __slots__ = ("dim_a", "dim_b", "_amplitudes")

    def __init__(self, dim_a, dim_b, amplitudes, tol=None, normalized=True):
        try:
            dim_a = check_positive_int(dim_a, "dim_a")
            dim_b = check_positive_int(dim_b, "dim_b")
        except (TypeError, ValueError) as exc:
            raise InvalidState(str(exc)) from None
        amps = as_complex_vector(amplitudes)
        if amps.size != dim_a * dim_b:
            raise InvalidState(
                f"expected {dim_a * dim_b} amplitudes for dims ({dim_a}, {dim_b}), got {amps.size}"
            )
        if normalized:
            norm2 = float(np.vdot(amps, amps).real)
            if abs(norm2 - 1.0) > resolve_tolerance(tol):
                raise InvalidState(f"state is not normalized (squared norm {norm2:.12g})")
        amps.setflags(write=False)
        object.__setattr__(self, "dim_a", dim_a)
        object.__setattr__(self, "dim_b", dim_b)
        object.__setattr__(self, "_amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def amplitudes(self):
        return self._amplitudes

    @property
    def dims(self):
        return (self.dim_a, self.dim_b)

    def matrix(self):
        """Amplitudes reshaped to ``(dim_a, dim_b)``."""
        return self._amplitudes.reshape(self.dim_a, self.dim_b)

    def __repr__(self):
        return f"PureBipartiteState(dims={self.dims}, amplitudes={self._amplitudes!r})"


class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite ``d x d`` matrix."""

    __slots__ = ("dim", "_entries")

    def __init__(self, entries, tol=None, validate=True):
        arr = as_square_matrix(entries, "density matrix")
        if validate:
            check_density_entries(arr, resolve_tolerance(tol))
        arr.setflags(write=False)
        object.__setattr__(self, "dim", arr.shape[0])
        object.__setattr__(self, "_entries", arr)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def entries(self):
        return self._entries

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._entries.copy()
        return self._entries.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, entries={self._entries!r})"


class MixedBipartiteState:
    """Possibly mixed composite state with known subsystem dimensions."""

    __slots__ = ("dim_a", "dim_b", "rho")

    def __init__(self, dim_a, dim_b, rho, tol=None):
        rho = as_density(rho, tol=tol)
        if rho.dim != dim_a * dim_b:
            raise InvalidDensityMatrix(
                f"composite matrix has dim {rho.dim}, expected {dim_a}*{dim_b}"
            )
        object.__setattr__(self, "dim_a", int(dim_a))
        object.__setattr__(self, "dim_b", int(dim_b))
        object.__setattr__(self, "rho", rho)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def dims(self):
        return (self.dim_a, self.dim_b)


def as_density(rho, tol=None):
    """Coerce an array or :class:`DensityMatrix` to a validated ``DensityMatrix``."""
    if isinstance(rho, DensityMatrix):
        return rho
    return DensityMatrix(rho, tol=tol)


def normalize(state):
    """Rescale ``state`` to unit norm.

    Accepts a :class:`PureBipartiteState` or a ``(dims, amplitudes)`` pair.
    Raises :class:`ZeroNorm` for a vanishing vector.
    """
    if isinstance(state, PureBipartiteState):
        dims, amps = state.dims, np.asarray(state.amplitudes)
    else:
        dims, amps = state
        amps = as_complex_vector(amps)
    norm2 = float(np.vdot(amps, amps).real)
    if norm2 < ZERO_NORM_THRESHOLD:
        raise ZeroNorm("cannot normalize a zero vector")
    return PureBipartiteState(dims[0], dims[1], amps / math.sqrt(norm2))


def make_state(dim_a, dim_b, amplitudes):
    """Build a normalized state from arbitrary nonzero amplitudes."""
    return normalize(((dim_a, dim_b), amplitudes))


def validate_state(state, tol=None):
    if not isinstance(state, PureBipartiteState):
        raise InvalidState(f"expected PureBipartiteState, got {type(state).__name__}")
    amps = state.amplitudes
    norm2 = float(np.vdot(amps, amps).real)
    if abs(norm2 - 1.0) > resolve_tolerance(tol):
        raise InvalidState(f"state is not normalized (squared norm {norm2:.12g})")
    return state


def _check_subsystem(subsystem):
    if subsystem not in SUBSYSTEMS:
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")


def reduced_density(state, subsystem="A", tol=None):
    """Partial trace of a pure composite state.

    ``rho_A[i, j] = sum_m psi[i, m] * conj(psi[j, m])`` and symmetrically
    for ``B``.
    """
    validate_state(state, tol)
    _check_subsystem(subsystem)
    psi = state.matrix()
    if subsystem == "A":
        rho = psi @ psi.conj().T
    else:
        rho = psi.T @ psi.conj()
    return DensityMatrix(rho, tol=tol)


def partial_trace(rho, dims, keep="A", tol=None):
    """Reduce a composite density matrix of dimensions ``dims`` to one factor."""
    _check_subsystem(keep)
    rho = as_density(rho, tol=tol)
    dim_a, dim_b = dims
    if rho.dim != dim_a * dim_b:
        raise InvalidDensityMatrix(f"composite matrix has dim {rho.dim}, expected {dim_a}*{dim_b}")
    t = rho.entries.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        reduced = np.einsum("imjm->ij", t)
    else:
        reduced = np.einsum("mimj->ij", t)
    return DensityMatrix(reduced, tol=tol)


def pure_density(state):
    """Composite projector ``|psi><psi|``."""
    amps = np.asarray(state.amplitudes)
    return DensityMatrix(np.outer(amps, amps.conj()))


# --- JSON state files -------------------------------------------------------


def _encode_complex(z):
    return [float(z.real), float(z.imag)]


def _decode_complex(pair, where):
    if (
        not isinstance(pair, (list, tuple))
        or len(pair) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
    ):
        raise MalformedStateFile(f"{where}: expected [re, im], got {pair!r}")
    re, im = float(pair[0]), float(pair[1])
    if not (math.isfinite(re) and math.isfinite(im)):
        raise MalformedStateFile(f"{where}: non-finite number")
    return complex(re, im)


def _decode_matrix(rows, where):
    if not isinstance(rows, list) or not rows:
        raise MalformedStateFile(f"{where}: expected a non-empty list of rows")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != len(rows):
            raise MalformedStateFile(f"{where}: row {i} has wrong length")
        out.append([_decode_complex(z, f"{where}[{i}][{j}]") for j, z in enumerate(row)])
    return np.array(out, dtype=np.complex128)


def state_to_dict(state):
    return {
        "dims": [state.dim_a, state.dim_b],
        "amplitudes": [_encode_complex(z) for z in state.amplitudes],
    }


def density_to_dict(rho, dims=None):
    rho = as_density(rho)
    payload = {"density_matrix": [[_encode_complex(z) for z in row] for row in rho.entries]}
    if dims is None:
        payload["dim"] = rho.dim
    else:
        payload["dims"] = [int(dims[0]), int(dims[1])]
    return payload


def _check_dims(dims):
    if (
        not isinstance(dims, list)
        or len(dims) != 2
        or not all(isinstance(x, int) and not isinstance(x, bool) and x >= 1 for x in dims)
    ):
        raise MalformedStateFile(f"'dims' must be two positive integers, got {dims!r}")
    return dims


def state_from_dict(payload, tol=None):
    """Parse a state-file payload.

    Returns a :class:`PureBipartiteState` for ``{"dims", "amplitudes"}``, a
    :class:`MixedBipartiteState` for ``{"dims", "density_matrix"}`` and a bare
    :class:`DensityMatrix` for ``{"dim", "density_matrix"}``.
    """
    if not isinstance(payload, dict):
        raise MalformedStateFile("state file must contain a JSON object")
    if "amplitudes" in payload:
        dim_a, dim_b = _check_dims(payload.get("dims"))
        amps = payload["amplitudes"]
        if not isinstance(amps, list):
            raise MalformedStateFile("'amplitudes' must be a list")
        if len(amps) != dim_a * dim_b:
            raise MalformedStateFile(f"expected {dim_a * dim_b} amplitudes, got {len(amps)}")
        values = [_decode_complex(z, f"amplitudes[{i}]") for i, z in enumerate(amps)]
        return PureBipartiteState(dim_a, dim_b, values, tol=tol)
    if "density_matrix" in payload:
        matrix = _decode_matrix(payload["density_matrix"], "density_matrix")
        if "dims" in payload:
            dim_a, dim_b = _check_dims(payload["dims"])
            if matrix.shape[0] != dim_a * dim_b:
                raise MalformedStateFile(
                    f"density matrix is {matrix.shape[0]}-dimensional, dims say {dim_a}*{dim_b}"
                )
            return MixedBipartiteState(dim_a, dim_b, matrix, tol=tol)
        rho = DensityMatrix(matrix, tol=tol)
        if "dim" in payload and payload["dim"] != rho.dim:
            raise MalformedStateFile(f"'dim' is {payload['dim']!r} but matrix is {rho.dim}x{rho.dim}")
        return rho
    raise MalformedStateFile("state file needs 'amplitudes' or 'density_matrix'")


def load_state(path, tol=None):
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise MalformedStateFile(f"{path}: malformed JSON ({exc})") from None
    return state_from_dict(payload, tol=tol)


def _reject_constant(name):
    raise MalformedStateFile(f"non-finite number {name} in state file")


def dump_state(state, path=None):
    """Serialize a state (pure, mixed composite or bare density) to JSON text."""
    if isinstance(state, PureBipartiteState):
        payload = state_to_dict(state)
    elif isinstance(state, MixedBipartiteState):
        payload = density_to_dict(state.rho, dims=state.dims)
    else:
        payload = density_to_dict(state)
    text = json.dumps(payload, indent=2) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
