#!/usr/bin/env python3
"""Independent brute-force oracle for the nonlinear discrete energy E_1h.

Recomputes, with plain numpy roll-based stencils and straight nodal
summation, the value of

    E_1h = 2 B0 q^2 <D_h^2 u, M u> + B0 q^4 ||M u||^2 + <f_bn, 1> + <f_s, 1>

on the reference initial data (director-wave Q, cosine u) so that the C++
implementation can pin the value as a frozen regression constant in
tests/test_energy.cpp.  This script shares no code with the library.

Run:  python3 tools/oracles/e1_reference.py
"""

import numpy as np

# Reference 2D parameter set (library defaults).
K, A, B, C = 0.1, -1.0, 0.0, 2.0
a, b, c = -5.0, 0.0, 5.0
B0, q, s_plus = 0.7e-4, 5.0, 1.0


def e1_bruteforce(J: int) -> float:
    L = 2.0 * np.pi
    h = L / J
    idx = np.arange(J) * h
    # axis 0 = x (slow), axis 1 = y (fast): row-major node order.
    x, y = np.meshgrid(idx, idx, indexing="ij")

    theta = x + y
    q11 = np.cos(theta) ** 2 - 0.5
    q12 = np.cos(theta) * np.sin(theta)
    u = 0.25 * np.cos(q * x)

    # f_bn and f_s, nodal.
    tr2 = 2.0 * (q11**2 + q12**2)
    fbn = 0.5 * A * tr2 + 0.25 * C * tr2**2
    fs = 0.5 * a * u**2 + (b / 3.0) * u**3 + 0.25 * c * u**4

    # Discrete Hessian of u: D+D- on the diagonal, central-central off it.
    def dplus_dminus(f, ax):
        return (np.roll(f, -1, axis=ax) - 2.0 * f + np.roll(f, 1, axis=ax)) / h**2

    def central(f, ax):
        return (np.roll(f, -1, axis=ax) - np.roll(f, 1, axis=ax)) / (2.0 * h)

    h11 = dplus_dminus(u, 0)
    h22 = dplus_dminus(u, 1)
    h12 = central(central(u, 1), 0)

    # M = Q/s_plus + I/2.
    m11 = q11 / s_plus + 0.5
    m12 = q12 / s_plus
    m22 = -q11 / s_plus + 0.5

    w = h * h  # nodal measure
    cross = 2.0 * B0 * q**2 * w * np.sum(
        h11 * m11 * u + 2.0 * h12 * m12 * u + h22 * m22 * u
    )
    quad = B0 * q**4 * w * np.sum((m11**2 + 2.0 * m12**2 + m22**2) * u**2)
    bulk_n = w * np.sum(fbn)
    bulk_s = w * np.sum(fs)
    total = cross + quad + bulk_n + bulk_s
    print(f"J={J:3d}  cross={cross:+.17e}  quad={quad:+.17e}")
    print(f"       bulk_nematic={bulk_n:+.17e}  bulk_smectic={bulk_s:+.17e}")
    print(f"       E_1h = {total:+.17e}")
    return total


if __name__ == "__main__":
    for J in (16, 64):
        e1_bruteforce(J)
    # Sanity: the director wave has tr(Q^2) = 1/2 at every node, so the
    # nematic bulk integral is exactly -(2*pi)^2 / 8.
    print(f"analytic bulk_nematic = {-(2.0 * np.pi) ** 2 / 8.0:+.17e}")
