"""Shared generators for randomized checks.  Everything is seeded."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from passlab.poly import Poly
from passlab.polymatrix import PolyMat, normalrank
from passlab.statespace import StateSpace


def rand_poly(rng: random.Random, max_deg: int, coeff_bound: int = 5,
              nonzero: bool = False) -> Poly:
    while True:
        deg = rng.randint(0, max_deg)
        p = Poly([Fraction(rng.randint(-coeff_bound, coeff_bound))
                  for _ in range(deg + 1)])
        if not nonzero or not p.is_zero:
            return p


def rand_polymat(rng: random.Random, rows: int, cols: int,
                 max_deg: int, coeff_bound: int = 5) -> PolyMat:
    return PolyMat([[rand_poly(rng, max_deg, coeff_bound) for _ in range(cols)]
                    for _ in range(rows)])


def rand_fullrank_pair(rng: random.Random, n: int, max_deg: int
                       ) -> tuple[PolyMat, PolyMat]:
    """Random square (P, Q) with normalrank [P -Q] = n."""
    while True:
        P = rand_polymat(rng, n, n, max_deg)
        Q = rand_polymat(rng, n, n, max_deg)
        if normalrank(P.hstack(-Q)) == n:
            return P, Q


def rand_nonsingular(rng: random.Random, n: int, max_deg: int) -> PolyMat:
    while True:
        F = rand_polymat(rng, n, n, max_deg)
        if not F.det().is_zero:
            return F


def corpus():
    """30 small systems: passive and not, controllable and not, observable
    and not, stable, lossless, static; all within the supported
    spectral-factorization sub-cases."""
    systems = []

    def add(name, A, B, C, D):
        systems.append((name, StateSpace.from_arrays(A, B, C, D)))

    add("rc", [[-1]], [[1]], [[1]], [[1]])
    add("rc-gain", [[-2]], [[1]], [[3]], [[1]])
    add("rc-weak", [[-0.5]], [[1]], [[0.25]], [[2]])
    add("integrator-d", [[0]], [[1]], [[1]], [[1]])
    add("capacitor", [[0]], [[1]], [[1]], [[0]])
    add("oscillator", [[0, 1], [-1, 0]], [[0], [1]], [[0, 1]], [[0]])
    add("oscillator-2", [[0, 2], [-2, 0]], [[0], [1]], [[0, 1]], [[0]])
    add("static-resistor", np.zeros((0, 0)), np.zeros((0, 1)),
        np.zeros((1, 0)), [[1]])
    add("static-2port", np.zeros((0, 0)), np.zeros((0, 2)),
        np.zeros((2, 0)), [[1, 0], [0, 2]])
    add("hidden-stable", [[-1, 0], [0, -2]], [[1], [0]], [[1, 1]], [[1]])
    add("unobservable", [[-1, 0], [0, -3]], [[1], [1]], [[1, 0]], [[1]])
    add("complex-pair", [[-1, 1], [-1, -1]], [[0], [1]], [[1, 0]], [[1]])
    add("second-order", [[0, 1], [-2, -3]], [[0], [1]], [[1, 0]], [[1]])
    add("rl-series", [[-1]], [[1]], [[-1]], [[1]])  # G = 1 - 1/(s+1), PR
    add("two-rc-diagonal", [[-1, 0], [0, -2]], [[1, 0], [0, 1]],
        [[1, 0], [0, 1]], [[1, 0], [0, 1]])
    add("stable-gain", [[-3]], [[2]], [[2]], [[1]])
    add("lossless-integrator-pair", [[0, 0], [0, -1]], [[1], [1]],
        [[1, 1]], [[1]])
    add("cap-with-leak", [[-0.1]], [[1]], [[1]], [[0]])
    add("double-rc", [[-1, 0], [0, -2]], [[1], [1]], [[1, 1]], [[1]])
    add("prop-half", [[-1]], [[1]], [[0.5]], [[0.5]])
    # non-passive members
    add("uncont-oscillator", [[0, 0, 1], [0, 0, 1], [0, -1, 0]], [[1], [0], [0]],
        [[1, 1, 0]], [[1]])
    add("neg-resistor", np.zeros((0, 0)), np.zeros((0, 1)),
        np.zeros((1, 0)), [[-1]])
    add("unstable", [[1]], [[1]], [[1]], [[1]])
    add("neg-gain", [[-1]], [[1]], [[-3]], [[1]])
    add("too-much-gain", [[-1]], [[1]], [[-1]], [[0.5]])
    add("unstable-hidden", [[1, 0], [0, -1]], [[0], [1]], [[1, 1]], [[1]])
    add("oscillator-neg", [[0, 1], [-1, 0]], [[0], [1]], [[0, -1]], [[0]])
    add("derivative-ish", [[-1]], [[1]], [[-2]], [[1]])
    add("weak-d", [[-1]], [[1]], [[-1.5]], [[1]])
    add("axis-unstable-pair", [[0, 1], [-1, 0]], [[0], [1]], [[1, 0]], [[0]])
    assert len(systems) == 30
    return systems
