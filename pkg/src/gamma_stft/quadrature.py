"""Composite Gauss-Legendre quadrature on boxes, with panel doubling."""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

__all__ = ["QuadSpec", "QuadratureError", "gl_rule", "integrate_box", "trapezoid_weights", "sphere_rule"]


class QuadratureError(RuntimeError):
    def __init__(self, message: str, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadSpec:
    """Composite Gauss-Legendre settings.

    ``panels`` is the starting number of panels per axis; it is doubled until
    two successive estimates agree to ``rtol`` relative to the integral of the
    absolute integrand, or ``max_panels`` is exceeded.
    """

    order: int = 16
    panels: int = 8
    rtol: float = 1e-10
    max_panels: int = 2048

    def __post_init__(self):
        if self.panels < 4:
            raise ValueError("panel count must be >= 4")
        if self.order < 2:
            raise ValueError("Gauss-Legendre order must be >= 2")

    def to_json(self) -> dict:
        return {"order": self.order, "panels": self.panels, "rtol": self.rtol, "max_panels": self.max_panels}


@functools.lru_cache(maxsize=64)
def _leggauss(order: int):
    return np.polynomial.legendre.leggauss(order)


def gl_rule(lo: float, hi: float, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the composite rule on [lo, hi]."""
    x, w = _leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _tensor_rule(lo, hi, panels, order):
    rules = [gl_rule(a, b, panels, order) for a, b in zip(lo, hi)]
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wgrid = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    T = np.stack([g.ravel() for g in grids], axis=1)
    W = np.prod(np.stack([g.ravel() for g in wgrid], axis=1), axis=1)
    return T, W


def integrate_box(func, lo, hi, spec: QuadSpec = QuadSpec()):
    """Integrate ``func`` over the box [lo, hi] (arrays of length d).

    ``func`` maps an (n, d) array of nodes to shape (n,) or (n, m); the
    result has shape () or (m,). Empty boxes integrate to zero.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    if np.any(hi <= lo):
        probe = np.asarray(func(np.zeros((1, lo.size))))
        return np.zeros(probe.shape[1:], dtype=probe.dtype)
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("integration box must be finite")
    panels = spec.panels
    prev = None
    while True:
        T, W = _tensor_rule(lo, hi, panels, spec.order)
        vals = np.asarray(func(T))
        wv = W.reshape((-1,) + (1,) * (vals.ndim - 1))
        est = np.sum(vals * wv, axis=0)
        scale = np.max(np.sum(np.abs(vals) * wv, axis=0))
        if prev is not None:
            err = np.max(np.abs(est - prev))
            if err <= spec.rtol * scale or scale == 0.0:
                return est
        if panels * 2 > spec.max_panels:
            err = np.inf if prev is None else float(np.max(np.abs(est - prev)))
            raise QuadratureError(
                f"quadrature did not converge: panels={panels}, error estimate {err:.3e}, scale {scale:.3e}",
                estimate=est,
                error=err,
            )
        prev = est
        panels *= 2


def trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    """Trapezoid weights for a strictly increasing 1-d node set."""
    h = np.diff(nodes)
    w = np.zeros_like(nodes)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def sphere_rule(d: int, n: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Directions and weights integrating over the unit sphere S^{d-1}."""
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if d == 2:
        th = 2 * np.pi * (np.arange(n) + 0.5) / n
        return np.stack([np.cos(th), np.sin(th)], axis=1), np.full(n, 2 * np.pi / n)
    if d == 3:
        z, wz = _leggauss(max(n // 2, 4))
        m = n
        phi = 2 * np.pi * (np.arange(m) + 0.5) / m
        Z, P = np.meshgrid(z, phi, indexing="ij")
        s = np.sqrt(1 - Z**2)
        U = np.stack([(s * np.cos(P)).ravel(), (s * np.sin(P)).ravel(), Z.ravel()], axis=1)
        W = (wz[:, None] * np.full(m, 2 * np.pi / m)[None, :]).ravel()
        return U, W
    raise ValueError(f"unsupported dimension {d}")
