"""Search a two-Gaussian family for a state whose model <p^3> differs
from <psi|p^3|psi> by many Monte Carlo standard errors.

psi(q) = G(q + d) + c exp(i phi) G(q - d),  G Gaussian of width sigma,
hbar = 1. Derivatives are analytic; integrals use a fine trapezoid grid.
"""
import numpy as np

SIGMA = 1.0
N_SAMPLES = 100_000


def state(q, d, c, phi, k=0.0):
    g1 = np.exp(-((q + d) ** 2) / (4 * SIGMA**2))
    g2 = np.exp(-((q - d) ** 2) / (4 * SIGMA**2))
    psi = g1 + c * np.exp(1j * phi) * g2
    dpsi = -(q + d) / (2 * SIGMA**2) * g1 - c * np.exp(1j * phi) * (q - d) / (2 * SIGMA**2) * g2
    boost = np.exp(1j * k * q)
    return psi * boost, (dpsi + 1j * k * psi) * boost


def moments(d, c, phi, k=0.0):
    q = np.linspace(-14, 14, 200_001)
    h = q[1] - q[0]
    psi, dpsi = state(q, d, c, phi, k)
    rho = np.abs(psi) ** 2
    norm = rho.sum() * h
    w = dpsi / psi
    s = w.imag
    u = w.real
    # quantum <p^3> = i <dpsi| d^2 psi> ... use integration by parts:
    # <p^3> = Re sum conj(psi) (-i)^3 psi''' = Re sum conj(-i dpsi) (-(psi'')) ... numerically:
    d2 = np.gradient(dpsi, h)
    d3 = np.gradient(d2, h)
    quantum = (np.conj(psi) * (1j) * d3).real.sum() * h / norm
    model_plus = (s + u) ** 3
    model_minus = (s - u) ** 3
    model = (rho * 0.5 * (model_plus + model_minus)).sum() * h / norm
    second = (rho * 0.5 * (model_plus**2 + model_minus**2)).sum() * h / norm
    sd = np.sqrt(max(second - model**2, 0.0))
    return quantum, model, sd


if __name__ == "__main__":
    best = None
    for d in (1.0, 1.5, 2.0):
        for c in (0.3, 0.5, 0.6, 0.8):
            for phi in np.linspace(0, np.pi, 9):
                for k in (0.0, 1.0):
                    qv, mv, sd = moments(d, c, phi, k)
                    z = abs(qv - mv) / (sd / np.sqrt(N_SAMPLES))
                    if best is None or z > best[0]:
                        best = (z, d, c, phi, k, qv, mv, sd)
                    print(f"d={d} c={c} phi={phi:.3f} k={k} quantum={qv:.5f} model={mv:.5f} sd={sd:.3f} z={z:.1f}")
    print("best", best)


def evolved_state(q, d, c, phi, t):
    """Free evolution (m = hbar = 1) of the same superposition."""
    z = 1 + 1j * t / (2 * SIGMA**2)
    g1 = np.exp(-((q + d) ** 2) / (4 * SIGMA**2 * z)) / np.sqrt(z)
    g2 = np.exp(-((q - d) ** 2) / (4 * SIGMA**2 * z)) / np.sqrt(z)
    psi = g1 + c * np.exp(1j * phi) * g2
    dpsi = -(q + d) / (2 * SIGMA**2 * z) * g1 - c * np.exp(1j * phi) * (q - d) / (2 * SIGMA**2 * z) * g2
    return psi, dpsi


def frozen_witness(t=0.0):
    """Values frozen into the C++ tests for d=2, c=0.6, phi=pi/2 at time t."""
    d, c, phi = 2.0, 0.6, np.pi / 2
    q = np.linspace(-14, 14, 400_001)
    h = q[1] - q[0]
    psi, dpsi = evolved_state(q, d, c, phi, t)
    rho = np.abs(psi) ** 2
    rho /= rho.sum() * h
    w = dpsi / psi
    gap = 2 * (rho * w.real * np.gradient(w.imag, h)).sum() * h
    s, u = w.imag, w.real
    d2 = np.gradient(dpsi, h)
    d3 = np.gradient(d2, h)
    qv = (np.conj(psi) * 1j * d3).real.sum() * h / ((np.abs(psi) ** 2).sum() * h)
    plus, minus = (s + u) ** 3, (s - u) ** 3
    mv = (rho * 0.5 * (plus + minus)).sum() * h
    sd = np.sqrt((rho * 0.5 * (plus**2 + minus**2)).sum() * h - mv**2)
    return qv, mv, sd, gap
