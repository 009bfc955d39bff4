"""
The map, its inverse, reversors and Jacobians on lifted mpmath values.
"""

from typing import List, Tuple


def eta(ctx, psi, mu):
    return 2 * ctx.pi * (ctx.cos(psi) - 1) - mu * ctx.sin(psi)


def eta_prime(ctx, psi, mu):
    return -2 * ctx.pi * ctx.sin(psi) - mu * ctx.cos(psi)


def forward(ctx, psi, w, mu):
    psi1 = psi + w
    return psi1, w + eta(ctx, psi1, mu)


def inverse(ctx, psi1, w1, mu):
    w = w1 - eta(ctx, psi1, mu)
    return psi1 - w, w


def iterate(ctx, psi, w, mu, n: int):
    step = forward if n >= 0 else inverse
    for _ in range(abs(n)):
        psi, w = step(ctx, psi, w, mu)
    return psi, w


def r0(ctx, psi, w):
    return psi + w, -w


def r1(ctx, psi, w, mu):
    return psi, eta(ctx, psi, mu) - w


def tangent_forward(ctx, psi, w, dpsi, dw, mu):
    """One step of the map together with its action on a tangent vector."""
    psi1 = psi + w
    d = eta_prime(ctx, psi1, mu)
    dpsi1 = dpsi + dw
    return psi1, w + eta(ctx, psi1, mu), dpsi1, dw + d * dpsi1


def tangent_inverse(ctx, psi1, w1, dpsi1, dw1, mu):
    d = eta_prime(ctx, psi1, mu)
    dw = dw1 - d * dpsi1
    w = w1 - eta(ctx, psi1, mu)
    return psi1 - w, w, dpsi1 - dw, dw


def monodromy(ctx, psi, w, mu, n: int) -> Tuple[List[list], Tuple]:
    """Df^n at (psi, w) as a 2x2 nested list, and f^n(psi, w)."""
    m = [[ctx.mpf(1), ctx.mpf(0)], [ctx.mpf(0), ctx.mpf(1)]]
    for _ in range(n):
        d = eta_prime(ctx, psi + w, mu)
        # J = [[1, 1], [d, 1 + d]]
        m = [
            [m[0][0] + m[1][0], m[0][1] + m[1][1]],
            [d * m[0][0] + (1 + d) * m[1][0], d * m[0][1] + (1 + d) * m[1][1]],
        ]
        psi, w = forward(ctx, psi, w, mu)
    return m, (psi, w)
