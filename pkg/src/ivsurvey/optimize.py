"""Derivative-free Nelder-Mead simplex minimizer.

Small, deterministic implementation used for variance-component
estimation: the objectives are cheap, low-dimensional (three parameters),
and smooth except at the boundary, which the callers remove by searching
in log space. Convergence requires both a relative objective spread and
an absolute parameter spread below tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    fx: float
    iterations: int
    converged: bool


def nelder_mead(
    fn: Callable[[np.ndarray], float],
    x0: Sequence[float],
    *,
    ftol: float = 1e-10,
    xtol: float = 1e-8,
    max_iter: int = 1000,
    initial_step: float = 0.5,
) -> SimplexResult:
    """Minimize ``fn`` from ``x0`` with the standard simplex moves.

    Coefficients are the classic reflection 1, expansion 2, contraction
    0.5, shrink 0.5. Converged when the simplex objective spread is below
    ``ftol`` relative to the best value and every coordinate spread is
    below ``xtol``.
    """
    x0 = np.asarray(x0, dtype=float)
    dim = x0.size
    simplex = np.vstack([x0] + [x0 + initial_step * np.eye(dim)[i] for i in range(dim)])
    values = np.array([fn(v) for v in simplex])

    iterations = 0
    converged = False
    while iterations < max_iter:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        f_spread = values[-1] - values[0]
        x_spread = np.max(np.abs(simplex[1:] - simplex[0]))
        if f_spread <= ftol * (1.0 + abs(values[0])) and x_spread <= xtol:
            converged = True
            break
        iterations += 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        reflected = centroid + (centroid - worst)
        f_reflected = fn(reflected)
        if values[0] <= f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
            continue
        if f_reflected < values[0]:
            expanded = centroid + 2.0 * (centroid - worst)
            f_expanded = fn(expanded)
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
            continue
        if f_reflected < values[-1]:
            contracted = centroid + 0.5 * (reflected - centroid)
        else:
            contracted = centroid + 0.5 * (worst - centroid)
        f_contracted = fn(contracted)
        if f_contracted < min(f_reflected, values[-1]):
            simplex[-1], values[-1] = contracted, f_contracted
            continue
        # shrink toward the best vertex
        simplex[1:] = simplex[0] + 0.5 * (simplex[1:] - simplex[0])
        values[1:] = [fn(v) for v in simplex[1:]]

    best = int(np.argmin(values))
    return SimplexResult(
        x=simplex[best].copy(), fx=float(values[best]), iterations=iterations, converged=converged
    )
