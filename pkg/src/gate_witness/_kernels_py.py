"""Pure-numpy reference versions of the compiled kernels."""

import numpy as np


def outcome_probabilities(kraus, inputs, bases):
    """p[n, j] = sum_i |<bases[n, j]| K_i |inputs[n]>|^2."""
    amps = np.einsum("njd,rde,ne->njr", np.conj(bases), kraus, inputs, optimize=False)
    return np.sum(amps.real**2 + amps.imag**2, axis=2)


def apply_kraus(kraus, rho):
    """sum_i K_i rho K_i^dagger."""
    return np.einsum("rab,bc,rdc->ad", kraus, rho, np.conj(kraus), optimize=True)


def unitary_overlap(kraus, u):
    """sum_i |tr(U^dagger K_i)|^2."""
    traces = np.einsum("ba,rba->r", np.conj(u), kraus)
    return float(np.sum(np.abs(traces) ** 2))
