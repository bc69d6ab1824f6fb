"""Shared random ensembles and independent numeric oracles for the tests."""
from __future__ import annotations

import itertools

import numpy as np

from tenfun import SymTensor


def rand_sym(rng, scale: float = 1.0) -> SymTensor:
    """Generic random symmetric tensor (distinct eigenvalues almost surely)."""
    m = rng.uniform(-scale, scale, (3, 3))
    return SymTensor.sym_part(m)


def rand_unit_sym(rng) -> SymTensor:
    x = rand_sym(rng)
    return (1.0 / x.norm()) * x


def rand_psym(rng, lo: float = 0.5, hi: float = 2.0) -> SymTensor:
    """Random positive definite tensor with eigenvalues log-uniform in [lo, hi]."""
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    lam = np.exp(rng.uniform(np.log(lo), np.log(hi), 3))
    return SymTensor.sym_part(q @ np.diag(lam) @ q.T)


def sym_from_eigs(rng, eigs) -> SymTensor:
    """Symmetric tensor with prescribed eigenvalues and a random frame."""
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    return SymTensor.sym_part(q @ np.diag(np.asarray(eigs, dtype=float)) @ q.T)


def dense_identity4() -> np.ndarray:
    eye = np.eye(3)
    return np.einsum("ik,jl->ijkl", eye, eye)


def max_abs(x) -> float:
    return float(np.abs(np.asarray(x)).max())


def rel_err(got, want) -> float:
    got = np.asarray(got, dtype=float)
    want = np.asarray(want, dtype=float)
    denom = max(float(np.abs(got).max()), float(np.abs(want).max()), 1e-300)
    return float(np.abs(got - want).max()) / denom


def coeffs_agree(values, fmag: float, rel: float) -> bool:
    """True when coefficient evaluations agree to ``rel`` relative, or are all
    zero at working precision on the function's magnitude scale (a degree-k
    polynomial has exactly vanishing divided differences past order k, where
    relative comparison is meaningless).  The zero floor covers the roundoff
    envelope eps/gap**n of gaps >= 0.1 at n <= 4."""
    scale = max(abs(v) for v in values)
    if scale <= 1e-11 * max(1.0, fmag):
        return True
    return max(values) - min(values) <= rel * scale


def fn_magnitude(f, nodes) -> float:
    return max(1.0, max(abs(f.deriv(0, x)) for x in nodes))


def monomial_power_sum(m: int, nodes) -> float:
    """Brute-force sum of all monomials x1^i1 ... xk^ik with i1+...+ik = m-k+1.

    This is the complete homogeneous symmetric polynomial of degree m-(k-1)
    in the k nodes, enumerated term by term.
    """
    nodes = [float(x) for x in nodes]
    k = len(nodes)
    deg = m - (k - 1)
    if deg < 0:
        return 0.0
    total = 0.0
    for combo in itertools.combinations_with_replacement(range(k), deg):
        prod = 1.0
        for i in combo:
            prod *= nodes[i]
        total += prod
    return total


def fd_scalar_derivative(fn, order: int, x: float) -> tuple[float, float]:
    """High-order central finite-difference estimate of a scalar derivative.

    Weights come from a dense Vandermonde solve on a symmetric stencil, an
    algorithm independent of the analytic derivative formulas under test.
    The step is chosen by scanning a halving sequence and keeping the
    estimate where successive values stabilise (truncation meets roundoff);
    steps whose stencil leaves the domain are skipped.  Returns the estimate
    together with the stabilised gap, which bounds the oracle's own
    resolution at the float64 crossover.
    """
    import math

    half = order // 2 + 3
    offsets = np.arange(-half, half + 1, dtype=float)
    v = np.vander(offsets, increasing=True).T  # v[t, j] = offsets[j]**t
    rhs = np.zeros(offsets.size)
    rhs[order] = math.factorial(order)
    w = np.linalg.solve(v, rhs)

    estimates = []
    h = 0.25 * max(1.0, abs(x))
    for _ in range(16):
        try:
            estimates.append(float(
                sum(wj * fn(x + oj * h) for wj, oj in zip(w, offsets)) / h ** order))
        except Exception:
            estimates.append(None)
        h *= 0.5
    best, best_gap = None, np.inf
    for a, b in zip(estimates, estimates[1:]):
        if a is None or b is None:
            continue
        gap = abs(a - b)
        if gap < best_gap:
            best, best_gap = b, gap
    if best is None:
        raise RuntimeError("no admissible finite-difference step")
    return best, best_gap


def separated_nodes(rng, count: int, lo: float = 0.5, hi: float = 2.0) -> list[float]:
    """Distinct nodes in [lo, hi] from a jittered grid, so gaps stay bounded
    away from zero and partial-fraction denominators stay well scaled."""
    step = (hi - lo) / count
    base = lo + step * (np.arange(count) + 0.2 + 0.6 * rng.random(count))
    return [float(x) for x in rng.permutation(base)]
