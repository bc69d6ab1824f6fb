"""Brute-force verification machinery, deliberately redundant with production.

Everything here favours transparency over speed: term enumeration instead of
coefficient tables, dense linear solves instead of divided differences,
nested finite differences instead of analytic derivatives.  Production and
oracle share no algorithm, so agreement between them is meaningful.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NumericalError
from .multilinear import _as_matrix
from .scalar_functions import ScalarFn
from .spectral import SymTensor, apply_fn, decompose

__all__ = [
    "PerturbationSeries",
    "expand_monomial",
    "finite_diff_derivative",
    "hermite_interp_solve",
    "hermite_data",
    "leading_from_lagrange",
]

_MAX_DEGREE = 12


@dataclass(frozen=True, eq=False)
class PerturbationSeries:
    """Exact terms of (A + X)^m grouped by the number of X factors.

    ``terms[k]`` collects every placement of k X factors among m slots, so
    it has binomial(m, k) summands; the terms sum back to the direct matrix
    power.
    """

    base: np.ndarray
    direction: np.ndarray
    degree: int
    terms: tuple[np.ndarray, ...]

    def total(self) -> np.ndarray:
        return sum(self.terms)


def expand_monomial(a, x, m: int) -> PerturbationSeries:
    """Enumerate (A + X)^m term by term; m is capped at 12."""
    if m < 1 or m > _MAX_DEGREE:
        raise ValueError(f"degree must be in 1..{_MAX_DEGREE} "
                         "(term count grows as 2^m)")
    am = _as_matrix(a)
    xm = _as_matrix(x)
    terms = [np.zeros((3, 3)) for _ in range(m + 1)]
    for bits in itertools.product((0, 1), repeat=m):
        prod = np.eye(3)
        for b in bits:
            prod = prod @ (xm if b else am)
        terms[sum(bits)] += prod
    return PerturbationSeries(base=am, direction=xm, degree=m, terms=tuple(terms))


def finite_diff_derivative(f: ScalarFn, a: SymTensor, xs: Sequence, n: int,
                           h: float | None = None) -> np.ndarray:
    """Nested central-difference estimate of the n-th directional derivative.

    Estimates the n-fold derivative of f(A + t1 X1 + ... + tn Xn) at zero
    (NOT divided by n factorial).  Accuracy collapses past n = 3.  The
    default step balances truncation against rounding for the nesting depth.
    """
    if n < 1 or n > 3:
        raise ValueError("finite differences are only trustworthy for n in 1..3")
    xs = [SymTensor.sym_part(_as_matrix(x)) for x in xs]
    if len(xs) != n:
        raise ValueError(f"need {n} directions, got {len(xs)}")
    if h is None:
        h = np.finfo(float).eps ** (1.0 / (n + 2)) * max(1.0, a.norm())
    if h < 1e2 * np.finfo(float).eps * max(1.0, a.norm()):
        raise ValueError(f"step {h:g} underflows against the tensor scale")

    def rec(base: SymTensor, dirs) -> np.ndarray:
        if not dirs:
            return apply_fn(decompose(base), f).matrix
        d0 = dirs[0]
        plus = rec(base + h * d0, dirs[1:])
        minus = rec(base + (-h) * d0, dirs[1:])
        return (plus - minus) / (2.0 * h)

    return rec(a, xs)


def hermite_interp_solve(nodes: Sequence[float], data: Sequence[float],
                         n: int | None = None) -> np.ndarray:
    """Interpolating-polynomial coefficients by a dense confluent Vandermonde solve.

    ``nodes`` is a multiset; sort order groups equal nodes, and within a group
    the r-th data entry is the r-th derivative value at that node (data is
    given in the order of the sorted nodes).  Returns all coefficients in
    ascending degree, the last being the leading one.  The system is solved
    directly and may be ill conditioned; singularity raises.
    """
    z = sorted(float(v) for v in nodes)
    m = len(z)
    if len(data) != m:
        raise ValueError(f"need one datum per node, got {len(data)} for {m}")
    if n is None:
        n = m - 1
    if n != m - 1:
        raise ValueError(f"degree {n} inconsistent with {m} conditions")
    rows = []
    rep = 0
    for i, x in enumerate(z):
        rep = rep + 1 if i > 0 and z[i - 1] == x else 0
        row = np.zeros(m)
        for col in range(rep, m):
            fall = 1.0
            for t in range(rep):
                fall *= col - t
            row[col] = fall * x ** (col - rep)
        rows.append(row)
    mat = np.array(rows)
    try:
        coeffs = np.linalg.solve(mat, np.asarray(data, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular interpolation system: {exc}") from exc
    return coeffs


def hermite_data(f: ScalarFn, nodes: Sequence[float]) -> list[float]:
    """Data vector matching hermite_interp_solve's sorted-node convention."""
    z = sorted(float(v) for v in nodes)
    out = []
    rep = 0
    for i, x in enumerate(z):
        rep = rep + 1 if i > 0 and z[i - 1] == x else 0
        out.append(f.deriv(rep, x))
    return out


def leading_from_lagrange(values: Sequence[float], nodes: Sequence[float]) -> float:
    """Leading interpolant coefficient for distinct nodes, by the direct sum
    of f(x_i) over the product of node differences."""
    nodes = [float(x) for x in nodes]
    total = 0.0
    for i, (v, xi) in enumerate(zip(values, nodes)):
        denom = 1.0
        for j, xj in enumerate(nodes):
            if j != i:
                denom *= xi - xj
        total += v / denom
    return total
