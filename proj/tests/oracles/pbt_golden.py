#!/usr/bin/env python3
"""Brute-force reference values for the exact PBT simulator.

Builds rho^{(x)M} explicitly, traces out every Bob port except t, builds the
pretty good measurement from the ideal (maximally entangled) ensemble and sums
the diagonal trace terms. Shares no code with the C++ library. The qubit
closed form of Ishizaka and Hiroshima is printed alongside as a second check.

Run:  python3 tests/oracles/pbt_golden.py
"""
import itertools
import math

import numpy as np


def phi_plus(d):
    v = np.zeros(d * d, dtype=complex)
    for i in range(d):
        v[i * d + i] = 1.0
    v /= math.sqrt(d)
    return np.outer(v, v.conj())


def isotropic(d, p):
    return p * phi_plus(d) + (1 - p) * np.eye(d * d) / (d * d)


def ptrace(rho, dims, keep):
    n = len(dims)
    t = rho.reshape(dims + dims)
    drop = [k for k in range(n) if k not in keep]
    for k in sorted(drop, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + m)
    dk = int(np.prod([dims[k] for k in keep]))
    return t.reshape(dk, dk)


def permute(rho, dims, perm):
    n = len(dims)
    t = rho.reshape(dims + dims)
    t = t.transpose(list(perm) + [n + p for p in perm])
    D = int(np.prod(dims))
    return t.reshape(D, D)


def port_states_bruteforce(d, M, pair):
    full = pair
    for _ in range(M - 1):
        full = np.kron(full, pair)
    dims = [d] * (2 * M)  # A1 B1 A2 B2 ...
    order = [2 * k for k in range(M)] + [2 * k + 1 for k in range(M)]
    full = permute(full, dims, order)  # A1..AM B1..BM
    out = []
    for t in range(M):
        keep = list(range(M)) + [M + t]
        out.append(ptrace(full, dims, keep))
    return out


def inv_sqrt_on_support(S):
    w, V = np.linalg.eigh(S)
    tol = S.shape[0] * 1e-12 * max(w.max(), 0)
    inv = np.array([1 / math.sqrt(x) if x > tol else 0.0 for x in w])
    proj = np.array([1.0 if x > tol else 0.0 for x in w])
    return (V * inv) @ V.conj().T, (V * proj) @ V.conj().T


def pgm(etas):
    M = len(etas)
    S = sum(etas)
    R, P = inv_sqrt_on_support(S)
    kernel = (np.eye(S.shape[0]) - P) / M
    return [R @ e @ R + kernel for e in etas]


def fidelity(d, M, pair, O=None):
    ideal = port_states_bruteforce(d, M, phi_plus(d))
    actual = port_states_bruteforce(d, M, pair)
    if O is not None:
        big = np.kron(O, np.eye(d))
        ideal = [big @ s @ big.conj().T for s in ideal]
        actual = [big @ s @ big.conj().T for s in actual]
    povm = pgm(ideal)
    return sum(np.trace(P @ s).real for P, s in zip(povm, actual)) / d**2


def ishizaka_hiroshima(N):
    s = 0.0
    for k in range(N + 1):
        term = (N - 2 * k - 1) / math.sqrt(k + 1) + (N - 2 * k + 1) / math.sqrt(N - k + 1)
        s += term * term * math.comb(N, k)
    return s / 2 ** (N + 3)


if __name__ == "__main__":
    for M in range(1, 5):
        print(f"d=2 M={M} F_bruteforce={fidelity(2, M, phi_plus(2)):.17g} "
              f"F_closed={ishizaka_hiroshima(M):.17g}")
    for M in range(1, 4):
        print(f"d=3 M={M} F_bruteforce={fidelity(3, M, phi_plus(3)):.17g}")
    for p in (0.3, 0.5, 0.7):
        print(f"d=2 M=3 p={p} F_bruteforce={fidelity(2, 3, isotropic(2, p)):.17g}")
