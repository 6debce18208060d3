"""Nelder-Mead simplex minimizer.

Shared by the car-model calibration and the heater-model coefficient
fitting.  Standard coefficient schedule: reflection 1, expansion 2,
contraction 0.5, shrink 0.5; stops when the simplex diameter (max
infinity-norm distance from the best vertex) drops below ``xtol`` or the
iteration cap is reached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class NelderMeadResult:
    x: np.ndarray
    fx: float
    iterations: int
    converged: bool


def nelder_mead(objective, x0, xtol: float = 1e-8, max_iter: int = 1000) -> NelderMeadResult:
    """Minimize ``objective`` from ``x0``; returns the best vertex found.

    With ``max_iter=0`` the start point is returned unchanged.  Raises
    ``ValueError`` if the objective is not finite at the start point.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    f0 = float(objective(x0))
    if not math.isfinite(f0):
        raise ValueError(f"objective is not finite at the start point: {f0}")
    n = x0.size
    if max_iter == 0 or n == 0:
        return NelderMeadResult(x0.copy(), f0, 0, False)

    # initial simplex: 5% displacement per axis, small absolute step at zero
    verts = [x0.copy()]
    for i in range(n):
        v = x0.copy()
        if v[i] != 0.0:
            v[i] *= 1.05
        else:
            v[i] = 0.00025
        verts.append(v)
    simplex = np.array(verts)
    fvals = np.array([f0] + [float(objective(v)) for v in verts[1:]])

    rho, chi, gamma, sigma = 1.0, 2.0, 0.5, 0.5
    iterations = 0
    converged = False
    while iterations < max_iter:
        order = np.argsort(fvals, kind="stable")
        simplex = simplex[order]
        fvals = fvals[order]
        diameter = np.max(np.abs(simplex[1:] - simplex[0]))
        if diameter < xtol:
            converged = True
            break
        iterations += 1

        centroid = np.mean(simplex[:-1], axis=0)
        xr = centroid + rho * (centroid - simplex[-1])
        fr = float(objective(xr))
        if fr < fvals[0]:
            xe = centroid + chi * (xr - centroid)
            fe = float(objective(xe))
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = centroid + gamma * (xr - centroid)
            else:
                xc = centroid - gamma * (centroid - simplex[-1])
            fc = float(objective(xc))
            if fc < min(fr, fvals[-1]):
                simplex[-1], fvals[-1] = xc, fc
            else:
                for i in range(1, n + 1):
                    simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
                    fvals[i] = float(objective(simplex[i]))

    best = int(np.argmin(fvals))
    return NelderMeadResult(simplex[best].copy(), float(fvals[best]), iterations, converged)
