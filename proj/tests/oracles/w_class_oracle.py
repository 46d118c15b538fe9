#!/usr/bin/env python3
"""Dense-grid reference for controlled teleportation over a three-qubit state.

For each controller party: evaluate the controlled teleportation fidelity on a
721 x 1441 (theta, phi) grid of qubit projective measurements, refine the best
cells with scipy's Nelder-Mead, then report the control power at M ports.
Fully entangled fractions come from the two-qubit magic-basis eigenvalue.
Shares no code with the C++ library.

Run:  python3 tests/oracles/w_class_oracle.py
"""
import math

import numpy as np
from scipy.optimize import minimize

S = 1 / math.sqrt(2)
MAGIC = np.array([[S, 1j * S, 0, 0],
                  [0, 0, 1j * S, S],
                  [0, 0, 1j * S, -S],
                  [S, -1j * S, 0, 0]])


def fef(rho):
    m = (MAGIC.conj().T @ rho @ MAGIC).real
    return np.linalg.eigvalsh((m + np.swapaxes(m, -1, -2)) / 2)[..., -1]


def ft(f):
    return (2 * f + 1) / 3


def controller_first(psi, party):
    t = psi.reshape(2, 2, 2)
    others = [k for k in range(3) if k != party]
    return np.transpose(t, [party] + others).reshape(2, 4)


def ct_value(rows, theta, phi):
    """rows: 2x4 amplitudes with the controller index first."""
    theta = np.asarray(theta)
    phi = np.asarray(phi)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    e = np.exp(1j * phi)
    m0 = np.stack([c * np.ones_like(e), e * s], axis=-1)
    m1 = np.stack([-np.conj(e) * s, c * np.ones_like(e)], axis=-1)
    total = 0.0
    for m in (m0, m1):
        v = np.einsum("...i,ij->...j", m.conj(), rows)
        prob = np.sum(np.abs(v) ** 2, axis=-1)
        safe = np.where(prob > 1e-15, prob, 1.0)
        u = v / np.sqrt(safe)[..., None]
        rho = u[..., :, None] * u[..., None, :].conj()
        total = total + np.where(prob > 1e-15, prob * ft(fef(rho)), 0.0)
    return total


def max_ct(psi, party, nt=721, nphi=1441, restarts=10):
    rows = controller_first(psi, party)
    th = np.linspace(0, math.pi, nt)
    ph = np.linspace(0, 2 * math.pi, nphi)
    best_grid = []
    for i, t in enumerate(th):
        vals = ct_value(rows, np.full(nphi, t), ph)
        for j in np.argsort(vals)[-restarts:]:
            best_grid.append((vals[j], t, ph[j]))
    best_grid.sort(reverse=True)
    best = best_grid[0][0]
    for _, t, p in best_grid[:restarts]:
        res = minimize(lambda x: -float(ct_value(rows, x[0], x[1])), [t, p], method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 5000})
        best = max(best, -res.fun)
    return best


def uncontrolled(psi, party):
    rows = controller_first(psi, party)
    rho = rows.T @ rows.conj()
    return ft(fef(rho))


def main():
    w = np.array([0, 1, 1, 1]) / math.sqrt(3)
    psi = np.zeros(8)
    psi[0b000], psi[0b100], psi[0b101], psi[0b110] = w
    M, d = 10, 2
    powers = []
    for party, label in enumerate("ABC"):
        f_ct = max_ct(psi, party)
        f_nc = uncontrolled(psi, party)
        power = (f_ct - f_nc) * (1 - d * d / (4 * M))
        powers.append(power)
        print(f"party {label}: f_ct={f_ct:.15f} f_nc={f_nc:.15f} power_M={power:.15f}")
    print(f"minimal control power (M={M}): {min(powers):.15f}")


if __name__ == "__main__":
    main()
