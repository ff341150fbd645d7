"""Gauss-Lobatto collocation operators of the DG spectral reference element.

Everything here lives on the reference interval ``[-1, 1]``: the quadrature
rule, the diagonal mass matrix ``M``, the nodal derivative matrix ``D``, the
boundary matrix ``B = diag(-1, 0, ..., 0, 1)``, the derivative-split matrix
``D_split = 2 D - M^{-1} B`` used by flux-differencing volume terms, and the
Vandermonde matrix of L2-orthonormal Legendre polynomials used by the modal
smoothness indicator.

The operators satisfy (up to roundoff) the summation-by-parts identity
``M D + (M D)^T = B`` and the telescoping property that every row of ``D``
sums to zero; both are what make the flux-differencing entropy analysis work.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MAX_DEGREE",
    "InvalidDegreeError",
    "QuadratureRule",
    "OperatorSet",
    "gauss_lobatto",
    "legendre_vandermonde",
    "build_operators",
]

MAX_DEGREE = 15

_NEWTON_TOL = 1e-14
_NEWTON_MAXIT = 100


class InvalidDegreeError(ValueError):
    """Polynomial degree outside the supported range ``1 <= p <= MAX_DEGREE``."""


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Lobatto nodes and weights of degree ``p`` (p+1 points)."""

    degree: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def npoints(self) -> int:
        return self.degree + 1


@dataclass(frozen=True)
class OperatorSet:
    """Reference-element matrices for one polynomial degree.

    Attributes
    ----------
    rule : QuadratureRule
    M : (p+1, p+1) diagonal mass matrix of quadrature weights
    D : (p+1, p+1) nodal derivative matrix, ``D[i, j] = l_j'(xi_i)``
    B : (p+1, p+1) boundary matrix ``diag(-1, 0, ..., 0, 1)``
    D_split : ``2 D - M^{-1} B``, zero on the diagonal
    V : Legendre Vandermonde, ``V[i, j] = Lhat_j(xi_i)`` (L2-orthonormal)
    Vinv : inverse of ``V`` (nodal-to-modal transform)
    Dhat : ``M^{-1} B - D``; by the SBP identity this equals ``M^{-1} D^T M``
        and is the weak-form volume operator
    """

    rule: QuadratureRule
    M: np.ndarray
    D: np.ndarray
    B: np.ndarray
    D_split: np.ndarray
    V: np.ndarray
    Vinv: np.ndarray
    Dhat: np.ndarray

    @property
    def degree(self) -> int:
        return self.rule.degree

    @property
    def weights(self) -> np.ndarray:
        return self.rule.weights

    @property
    def nodes(self) -> np.ndarray:
        return self.rule.nodes


def _legendre(p: int, x: np.ndarray):
    """Evaluate ``P_p`` and ``P_{p-1}`` by the three-term recurrence."""
    pm1 = np.ones_like(x)
    if p == 0:
        return pm1, np.zeros_like(x)
    pn = x.copy()
    for n in range(1, p):
        pm1, pn = pn, ((2 * n + 1) * x * pn - n * pm1) / (n + 1)
    return pn, pm1


def _legendre_with_derivative(p: int, x: np.ndarray):
    """Evaluate ``P_p`` and ``P_p'``; only valid away from the endpoints."""
    pn, pm1 = _legendre(p, x)
    # (1 - x^2) P_p' = p (P_{p-1} - x P_p)
    dpn = p * (pm1 - x * pn) / (1.0 - x * x)
    return pn, dpn


def _validated_degree(p) -> int:
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
        raise InvalidDegreeError(f"degree must be an integer, got {p!r}")
    if not 1 <= p <= MAX_DEGREE:
        raise InvalidDegreeError(
            f"degree must satisfy 1 <= p <= {MAX_DEGREE}, got {p}"
        )
    return int(p)


def gauss_lobatto(p) -> QuadratureRule:
    """Gauss-Lobatto quadrature rule with ``p + 1`` nodes on ``[-1, 1]``.

    Interior nodes are the roots of ``P_p'``, found by Newton iteration from
    Chebyshev-Gauss-Lobatto initial guesses; weights are
    ``2 / (p (p+1) P_p(xi)^2)``.  Exact for polynomials up to degree
    ``2p - 1``.
    """
    p = _validated_degree(p)
    nodes = np.empty(p + 1)
    nodes[0] = -1.0
    nodes[p] = 1.0
    if p >= 2:
        x = -np.cos(np.pi * np.arange(1, p) / p)
        for _ in range(_NEWTON_MAXIT):
            pn, dpn = _legendre_with_derivative(p, x)
            # Newton step for P_p'(x) = 0 with
            # P_p'' = (2 x P_p' - p (p+1) P_p) / (1 - x^2)
            dx = dpn * (1.0 - x * x) / (2.0 * x * dpn - p * (p + 1) * pn)
            x -= dx
            if np.max(np.abs(dx)) < _NEWTON_TOL:
                break
        nodes[1:p] = x
    # enforce exact symmetry of the rule
    nodes = 0.5 * (nodes - nodes[::-1])
    pn, _ = _legendre(p, nodes)
    weights = 2.0 / (p * (p + 1) * pn * pn)
    weights = 0.5 * (weights + weights[::-1])
    return QuadratureRule(degree=p, nodes=nodes, weights=weights)


def _barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    b = 1.0 / np.prod(diff, axis=1)
    return b / np.max(np.abs(b))


def _derivative_matrix(nodes: np.ndarray) -> np.ndarray:
    """Barycentric Lagrange differentiation matrix with exact zero row sums."""
    n = nodes.size
    b = _barycentric_weights(nodes)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                D[i, j] = (b[j] / b[i]) / (nodes[i] - nodes[j])
        D[i, i] = -np.sum(D[i, :])
    return D


def legendre_vandermonde(rule: QuadratureRule) -> np.ndarray:
    """Vandermonde matrix of L2-orthonormal Legendre polynomials at the nodes.

    ``V[i, j] = sqrt(j + 1/2) P_j(xi_i)`` so that the modal transform of a
    constant has only the lowest coefficient nonzero and modal energies are
    basis-independent.
    """
    p = rule.degree
    V = np.polynomial.legendre.legvander(rule.nodes, p)
    V *= np.sqrt(np.arange(p + 1) + 0.5)
    return V


def build_operators(p) -> OperatorSet:
    """Construct the full operator set for degree ``p``."""
    rule = gauss_lobatto(p)
    w = rule.weights
    M = np.diag(w)
    D = _derivative_matrix(rule.nodes)
    B = np.zeros((p + 1, p + 1))
    B[0, 0] = -1.0
    B[p, p] = 1.0
    MinvB = B / w[:, None]
    D_split = 2.0 * D - MinvB
    V = legendre_vandermonde(rule)
    Vinv = np.linalg.inv(V)
    Dhat = MinvB - D
    for a in (M, D, B, D_split, V, Vinv, Dhat):
        a.setflags(write=False)
    rule.nodes.setflags(write=False)
    rule.weights.setflags(write=False)
    return OperatorSet(rule=rule, M=M, D=D, B=B, D_split=D_split, V=V,
                       Vinv=Vinv, Dhat=Dhat)
