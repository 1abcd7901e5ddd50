"""Small numeric helpers shared across modules."""

import numpy as np

_SERIES_CUTOFF = 1e-4


def sinc(x):
    """sin(x)/x with the removable singularity handled by a short series."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    x2 = x * x
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    return out if out.ndim else float(out)


def require_positive(**values):
    """Raise NonPositiveInput naming the first argument that is not > 0."""
    from .errors import NonPositiveInput

    for name, value in values.items():
        if not np.all(np.asarray(value) > 0):
            raise NonPositiveInput(f"{name} must be > 0, got {value!r}")


def require_nonnegative(**values):
    from .errors import NonPositiveInput

    for name, value in values.items():
        if not np.all(np.asarray(value) >= 0):
            raise NonPositiveInput(f"{name} must be >= 0, got {value!r}")
