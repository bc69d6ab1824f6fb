"""Assembly and contraction of spectral derivatives, plus the gradient calculus.

The n-th derivative of f at A, divided by n factorial, is the order-2(n+1)
tensor obtained by weighting every (n+1)-fold box product of eigenprojectors
with the coefficient table entry for its label multi-index.  Contractions sum
over all d**(n+1) index tuples in a fixed order; with d <= 3 and n <= 6 this
stays tiny.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .coefficients import CoeffTable, build_table
from .errors import DomainError
from .multilinear import BoxProduct, BoxSum, FourthTensor, _as_matrix
from .scalar_functions import ScalarFn
from .spectral import DEFAULT_CLUSTER_TOL, Spectrum, SymTensor, apply_fn, decompose

__all__ = [
    "SpectralDerivative",
    "derivative",
    "contract_dirs",
    "taylor_eval",
    "grad_product_rule",
    "grad_reciprocal",
    "grad_chain_rule",
]


@dataclass(frozen=True, eq=False)
class SpectralDerivative:
    """The n-th derivative of f at A, normalised by 1/n!.

    Stored as the spectrum (projector basis) plus the symmetric coefficient
    table; never densely.  Contracting with n direction tensors yields the
    degree-n term of the expansion of f(A + X).
    """

    order: int
    spectrum: Spectrum
    coeffs: CoeffTable

    def contract(self, xs: Sequence) -> SymTensor:
        """Contraction with n directions, as a totally symmetric multilinear map.

        The interleaved sum of coeff * A_{i1} X1 A_{i2} X2 ... Xn A_{i_{n+1}}
        over all index tuples pins the derivative down only on equal
        directions; mixed directions are averaged over the orderings of the
        direction list (polarisation), which is exactly the identity map when
        all directions coincide.
        """
        xs = [_as_matrix(x) for x in xs]
        if len(xs) != self.order:
            raise ValueError(f"need {self.order} directions, got {len(xs)}")
        projs = [p.matrix for p in self.spectrum.projectors]

        keys = [x.tobytes() for x in xs]
        seen = set()
        arrangements = []
        for perm in itertools.permutations(range(self.order)):
            key = tuple(keys[i] for i in perm)
            if key not in seen:
                seen.add(key)
                arrangements.append([xs[i] for i in perm])

        acc = np.zeros((3, 3))
        for idx in itertools.product(range(self.spectrum.d), repeat=self.order + 1):
            c = self.coeffs.get(idx)
            if c == 0.0:
                continue
            for ordered in arrangements:
                m = projs[idx[0]]
                for x, i in zip(ordered, idx[1:]):
                    m = m @ x @ projs[i]
                acc += c * m
        return SymTensor.sym_part(acc / len(arrangements))

    def as_box_sum(self) -> BoxSum:
        """Expand into a weighted sum of projector box products."""
        projs = [p.matrix for p in self.spectrum.projectors]
        terms = []
        for idx in itertools.product(range(self.spectrum.d), repeat=self.order + 1):
            c = self.coeffs.get(idx)
            if c != 0.0:
                terms.append((c, BoxProduct(*[projs[i] for i in idx])))
        return BoxSum(terms, nfactors=self.order + 1)

    def as_fourth_tensor(self) -> FourthTensor:
        """First-derivative view as an order-4 tensor (gradient map)."""
        if self.order != 1:
            raise ValueError("only the first derivative is a fourth-order tensor")
        projs = [p.matrix for p in self.spectrum.projectors]
        terms = []
        for i in range(self.spectrum.d):
            for j in range(self.spectrum.d):
                c = self.coeffs.get((i, j))
                if c != 0.0:
                    terms.append((c, BoxProduct(projs[i], projs[j])))
        return FourthTensor(terms)


def derivative(f: ScalarFn, a: SymTensor, n: int,
               cluster_tol: float = DEFAULT_CLUSTER_TOL,
               method: str = "dd") -> SpectralDerivative:
    """Assemble the spectral derivative of order n of f at A (times 1/n!)."""
    if n < 1:
        raise ValueError("derivative order must be at least 1")
    s = decompose(a, cluster_tol)
    return SpectralDerivative(order=n, spectrum=s, coeffs=build_table(f, s, n, method=method))


def contract_dirs(dv: SpectralDerivative, xs: Sequence) -> SymTensor:
    """Contract a spectral derivative with its direction tensors."""
    return dv.contract(xs)


def taylor_eval(f: ScalarFn, a: SymTensor, x: SymTensor, n: int,
                cluster_tol: float = DEFAULT_CLUSTER_TOL) -> SymTensor:
    """Truncated expansion f(A) + sum over k <= n of the degree-k term at X.

    A + X must stay inside the domain of f (e.g. positive definite for log);
    the series itself only consumes derivatives of f on the spectrum of A.
    """
    s = decompose(a, cluster_tol)
    for alpha in np.linalg.eigvalsh((a + x).matrix):
        if not f.in_domain(float(alpha)):
            raise DomainError(f"{f!r} is undefined on the spectrum of A + X (at {alpha})")
    out = apply_fn(s, f)
    for k in range(1, n + 1):
        dv = SpectralDerivative(order=k, spectrum=s, coeffs=build_table(f, s, k))
        out = out + dv.contract([x] * k)
    return out


def _grad4(f: ScalarFn, s: Spectrum) -> FourthTensor:
    return SpectralDerivative(1, s, build_table(f, s, 1)).as_fourth_tensor()


def grad_product_rule(f: ScalarFn, g: ScalarFn, a: SymTensor,
                      cluster_tol: float = DEFAULT_CLUSTER_TOL) -> FourthTensor:
    """Gradient of the pointwise product: (I x g(A)) grad f + (f(A) x I) grad g."""
    s = decompose(a, cluster_tol)
    fa = apply_fn(s, f)
    ga = apply_fn(s, g)
    eye = np.eye(3)
    left = FourthTensor.box(eye, ga).compose(_grad4(f, s))
    right = FourthTensor.box(fa, eye).compose(_grad4(g, s))
    return left + right


def grad_reciprocal(f: ScalarFn, a: SymTensor,
                    cluster_tol: float = DEFAULT_CLUSTER_TOL) -> FourthTensor:
    """Gradient of 1/f: -[f(A)^-1 x f(A)^-1] grad f."""
    s = decompose(a, cluster_tol)
    vals = [f.deriv(0, alpha) for alpha in s.alphas]
    scale = max(abs(v) for v in vals)
    if any(abs(v) <= 1e-14 * max(1.0, scale) for v in vals):
        raise DomainError("f vanishes at an eigenvalue; reciprocal gradient undefined")
    finv = s.apply([1.0 / v for v in vals])
    return -1.0 * FourthTensor.box(finv, finv).compose(_grad4(f, s))


def grad_chain_rule(f: ScalarFn, g: ScalarFn, a: SymTensor,
                    cluster_tol: float = DEFAULT_CLUSTER_TOL) -> FourthTensor:
    """Gradient of the composition f(g(A)): grad f at g(A), composed with grad g."""
    s = decompose(a, cluster_tol)
    inner = apply_fn(s, g)
    s_inner = decompose(inner, cluster_tol)
    return _grad4(f, s_inner).compose(_grad4(g, s))
