"""Input validation helpers shared by every module."""

import os

import numpy as np

from .exceptions import DimensionMismatch, InvalidDensityMatrix, InvalidState

DEFAULT_TOLERANCE = 1e-9
TOLERANCE_ENV_VAR = "CONCURRENCE_LAB_TOLERANCE"


def default_tolerance():
    """Validation tolerance, honouring ``CONCURRENCE_LAB_TOLERANCE``."""
    raw = os.environ.get(TOLERANCE_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_TOLERANCE
    try:
        tol = float(raw)
    except ValueError:
        raise ValueError(f"{TOLERANCE_ENV_VAR} must be a float, got {raw!r}") from None
    if not np.isfinite(tol) or tol <= 0:
        raise ValueError(f"{TOLERANCE_ENV_VAR} must be positive and finite, got {raw!r}")
    return tol


def resolve_tolerance(tol):
    return default_tolerance() if tol is None else float(tol)


def check_positive_int(value, name, minimum=1):
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, np.integer)):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def as_complex_vector(values, name="amplitudes"):
    arr = np.asarray(values)
    if arr.dtype == object:
        raise InvalidState(f"{name} must be numeric")
    arr = arr.astype(np.complex128, copy=True)
    if arr.ndim != 1:
        raise InvalidState(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidState(f"{name} contains non-finite entries")
    return arr


def as_square_matrix(values, name="matrix", error=InvalidDensityMatrix):
    arr = np.asarray(values)
    if arr.dtype == object:
        raise error(f"{name} must be numeric")
    arr = arr.astype(np.complex128, copy=True)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise error(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise error(f"{name} contains non-finite entries")
    return arr


def check_density_entries(entries, tol):
    """Raise :class:`InvalidDensityMatrix` unless ``entries`` is a valid state.

    Checks Hermiticity, unit trace and positive semidefiniteness, all at
    absolute tolerance ``tol``.
    """
    herm_err = np.max(np.abs(entries - entries.conj().T))
    if herm_err > tol:
        raise InvalidDensityMatrix(f"matrix is not Hermitian (max deviation {herm_err:.3g})")
    trace = np.trace(entries)
    if abs(trace - 1.0) > tol:
        raise InvalidDensityMatrix(f"trace is {trace.real:.12g}, expected 1")
    hermitian = 0.5 * (entries + entries.conj().T)
    min_eig = np.linalg.eigvalsh(hermitian).min()
    if min_eig < -tol:
        raise InvalidDensityMatrix(f"matrix is not positive semidefinite (min eigenvalue {min_eig:.3g})")


def check_same_dim(a, b, what="dimension"):
    if a != b:
        raise DimensionMismatch(f"{what} mismatch: {a} != {b}")


def check_state_batch(X, n_features=None):
    """Validate a batch of composite amplitude vectors, shape ``(n_samples, n_features)``.

    Returns a complex128 copy.  sklearn's ``check_array`` rejects complex
    input, hence this helper.
    """
    arr = np.asarray(X)
    if arr.dtype == object:
        raise ValueError("X must be numeric")
    if arr.ndim == 1:
        raise ValueError("expected a 2-D array of amplitude vectors; reshape a single state with X[None, :]")
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError(f"X must be a non-empty 2-D array, got shape {arr.shape}")
    arr = arr.astype(np.complex128, copy=True)
    if not np.all(np.isfinite(arr)):
        raise ValueError("X contains NaN or infinite amplitudes")
    if n_features is not None and arr.shape[1] != n_features:
        raise ValueError(f"X has {arr.shape[1]} features, but the estimator was fitted with {n_features}")
    return arr
