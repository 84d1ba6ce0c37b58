import numpy as np

from indicial.pencil import PencilSpec


def hermitian(rng, n, scale=1.0):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (A + A.conj().T)


def random_symmetric(rng, n, mu, m):
    """Generic symmetric pencil: Hermitian coefficients in tau = sigma + i m/2."""
    coeffs = [hermitian(rng, n) for _ in range(mu)]
    coeffs.append(hermitian(rng, n) + 2 * n * np.eye(n))
    return PencilSpec.from_tau(coeffs, m)
