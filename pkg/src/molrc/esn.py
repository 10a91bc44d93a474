"""Reference echo-state network: the discrete-time analogue of the reactor.

Node update x' = f(W_res x + W_in u) with fixed random weights; only the
readout is ever trained (see readout.py). Scaling the recurrent matrix to a
spectral radius slightly below 1 gives the network fading memory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_NONLINEARITIES = {
    "tanh": np.tanh,
    "identity": lambda x: x,
}


def scale_spectral_radius(W: np.ndarray, target: float) -> np.ndarray:
    """Rescale a square matrix so its spectral radius equals target."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ValueError(f"W must be square, got shape {W.shape}")
    rho = float(np.max(np.abs(np.linalg.eigvals(W))))
    if rho == 0.0:
        raise ValueError("cannot rescale a matrix with zero spectral radius")
    return W * (target / rho)


@dataclass(frozen=True)
class EsnParams:
    """Fixed weights and shape of an echo-state reservoir."""

    N: int
    I: int
    O: int
    W_in: np.ndarray
    W_res: np.ndarray
    f: str = "tanh"
    mu: float = 0.0
    sigma: float = 1.0
    spectral_target: float = 0.95

    def __post_init__(self):
        if self.W_in.shape != (self.N, self.I):
            raise ValueError(f"W_in must be ({self.N}, {self.I}), got {self.W_in.shape}")
        if self.W_res.shape != (self.N, self.N):
            raise ValueError(f"W_res must be ({self.N}, {self.N}), got {self.W_res.shape}")
        if self.f not in _NONLINEARITIES:
            raise ValueError(f"unknown nonlinearity {self.f!r}")


def make_esn(seed, N: int, I: int, O: int = 1, mu: float = 0.0, sigma: float = 1.0,
             spectral_target: float = 0.95, f: str = "tanh") -> EsnParams:
    """Draw normally distributed weights and rescale W_res to spectral_target."""
    rng = np.random.default_rng(seed)
    W_in = rng.normal(mu, sigma, (N, I))
    W_res = scale_spectral_radius(rng.normal(mu, sigma, (N, N)), spectral_target)
    return EsnParams(N=N, I=I, O=O, W_in=W_in, W_res=W_res, f=f,
                     mu=mu, sigma=sigma, spectral_target=spectral_target)


def esn_step(params: EsnParams, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """One reservoir update x' = f(W_res x + W_in u)."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape != (params.N,):
        raise ValueError(f"x must have shape ({params.N},), got {x.shape}")
    if u.shape != (params.I,):
        raise ValueError(f"u must have shape ({params.I},), got {u.shape}")
    return _NONLINEARITIES[params.f](params.W_res @ x + params.W_in @ u)
