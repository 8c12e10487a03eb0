"""Backend selection for the hot kernels.

The compiled extension ``_kernels`` is used when it was built; otherwise the
pure-numpy ``_kernels_py`` takes over. Set ``GATE_WITNESS_PURE=1`` to force the
fallback. Inputs are normalised to C-contiguous complex128 before dispatch.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_compiled = None
if os.environ.get("GATE_WITNESS_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

_impl = _compiled if _compiled is not None else _kernels_py
BACKEND = "compiled" if _compiled is not None else "python"


def _c(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.complex128)


def outcome_probabilities(kraus, inputs, bases) -> np.ndarray:
    """Outcome probabilities for pure inputs sent through a Kraus channel.

    ``kraus`` is (r, d, d), ``inputs`` (n, d) and ``bases`` (n, m, d): row n of
    the result holds the m outcome probabilities for input n measured in
    ``bases[n]``.
    """
    return np.asarray(_impl.outcome_probabilities(_c(kraus), _c(inputs), _c(bases)))


def apply_kraus(kraus, rho) -> np.ndarray:
    return np.asarray(_impl.apply_kraus(_c(kraus), _c(rho)))


def unitary_overlap(kraus, u) -> float:
    return float(_impl.unitary_overlap(_c(kraus), _c(u)))
