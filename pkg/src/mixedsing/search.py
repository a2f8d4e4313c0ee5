"""Batched multistart search for critical points of face systems on a torus stratum.

A point x of the stratum (K*)^I is critical for F : K^n -> K^p when some unit
covector lam kills the real Jacobian, ``J(x)^T lam = 0``.  All starts are
driven together by a damped Gauss-Newton (Levenberg-Marquardt) iteration on

    R(x, lam) = [J(x)^T lam, |lam|^2 - 1, rho(x) - 1, F(x) (weak mode only)]

where rho is the weighted slice sum_i w_i |x_i|^(2L/w_i), L = lcm(w).  Face
systems are radially weighted homogeneous for their generator weight, so the
slice meets every orbit of the positive scaling action exactly once.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .poly_core import MIXED, NumericMap, PolynomialMap, wirtinger

FD_STEP = 1e-7


def task_seed(master: int, *parts) -> int:
    """Stable per-task seed from the master seed and a task key."""
    text = "|".join([str(master)] + [repr(p) for p in parts])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "little")


@dataclass
class SearchResult:
    points: np.ndarray          # (N, n) complex points on the slice
    multipliers: np.ndarray     # (N, q) real covectors
    residual: np.ndarray        # Oka / singular-value residual per point
    value: np.ndarray           # |F| per point
    margin: np.ndarray          # min_{i in I} |x_i| per point
    relative: np.ndarray        # scale-free residual, see StratumProblem.relative


class StratumProblem:
    """Geometry of one (system, I, mode) obligation."""

    def __init__(self, fmap: PolynomialMap, I: Sequence[int], weak: bool, weight: Sequence | None = None):
        self.map = fmap
        self.num = NumericMap(fmap)
        self.n, self.p = fmap.n, fmap.p
        self.mixed = fmap.kind == MIXED
        self.I = sorted(int(i) - 1 for i in I)
        self.weak = weak
        w = [int(x) for x in (weight or [1] * self.n)]
        self.w = np.array(w, dtype=float)
        wI = [w[i] for i in self.I]
        self.L = reduce(math.lcm, wI, 1)
        self.exps = np.array([2 * self.L / w[i] for i in self.I])
        self.wI = np.array(wI, dtype=float)
        self.q = 2 * self.p if self.mixed else self.p
        self.m = 2 * self.n if self.mixed else self.n
        self.nx = 2 * len(self.I) if self.mixed else len(self.I)

    # variable packing -------------------------------------------------
    def to_points(self, xs: np.ndarray) -> np.ndarray:
        N = xs.shape[0]
        X = np.zeros((N, self.n), dtype=complex)
        if self.mixed:
            X[:, self.I] = xs[:, 0::2] + 1j * xs[:, 1::2]
        else:
            X[:, self.I] = xs
        return X

    def from_points(self, X: np.ndarray) -> np.ndarray:
        sub = X[:, self.I]
        if self.mixed:
            out = np.empty((X.shape[0], 2 * len(self.I)))
            out[:, 0::2], out[:, 1::2] = sub.real, sub.imag
            return out
        return sub.real.copy()

    def rho(self, X: np.ndarray) -> np.ndarray:
        return (self.wI * np.abs(X[:, self.I]) ** self.exps).sum(axis=1)

    def to_slice(self, X: np.ndarray) -> np.ndarray:
        r = self.rho(X)
        t = r ** (-1.0 / (2 * self.L))
        Y = X.copy()
        Y[:, self.I] = X[:, self.I] * t[:, None] ** self.wI
        return Y

    # residual ------------------------------------------------------------
    def residual_vector(self, z: np.ndarray) -> np.ndarray:
        xs, lam = z[:, : self.nx], z[:, self.nx:]
        X = self.to_points(xs)
        J = self.num.real_jacobian(X)                      # (N, q, m)
        parts = [np.einsum("nqm,nq->nm", J, lam), (lam ** 2).sum(1, keepdims=True) - 1, self.rho(X)[:, None] - 1]
        if self.weak:
            F = self.num.values(X)
            parts.append(np.concatenate([F.real, F.imag], axis=1) if self.mixed else F.real)
        return np.concatenate(parts, axis=1)

    def initial_multipliers(self, X: np.ndarray) -> np.ndarray:
        J = self.num.real_jacobian(X)
        if J.shape[1] == 0:
            return np.zeros((X.shape[0], 0))
        u, s, vt = np.linalg.svd(J, full_matrices=True)
        return u[:, :, -1] if self.q <= self.m else u[:, :, -1]

    def starts(self, count: int, rng: np.random.Generator) -> np.ndarray:
        k = len(self.I)
        base = [1.0, -1.0] if not self.mixed else [1.0, -1.0, 1j, -1j]
        fixed = []
        # simplest torus points first: unit coordinates with small phase patterns
        for code in range(min(16, len(base) ** k)):
            digits = []
            c = code
            for _ in range(k):
                digits.append(base[c % len(base)])
                c //= len(base)
            fixed.append(digits)
        fixed = fixed[:count]
        rnd = count - len(fixed)
        if self.mixed:
            R = rng.standard_normal((rnd, k)) + 1j * rng.standard_normal((rnd, k))
        else:
            R = rng.standard_normal((rnd, k)).astype(complex)
        pts = np.zeros((count, self.n), dtype=complex)
        pts[:, self.I] = np.vstack([np.array(fixed, dtype=complex).reshape(len(fixed), k), R]) if fixed else R
        return self.to_slice(pts)

    # evaluation of the reported quantities ------------------------------
    def measure(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        res = self.num.residual(X)
        val = np.linalg.norm(self.num.values(X), axis=1)
        margin = np.abs(X[:, self.I]).min(axis=1) if self.I else np.ones(X.shape[0])
        return res, val, margin

    @staticmethod
    def _magnitude(polys, A: np.ndarray) -> np.ndarray:
        total = np.zeros(A.shape[0])
        for f in polys:
            coef, nu, mu = f._compiled
            if len(coef):
                total = total + np.prod(A[:, None, :] ** (nu + mu)[None], axis=2) @ np.abs(coef)
        return total

    def term_scale(self, X: np.ndarray) -> np.ndarray:
        """Sum of term magnitudes per component, shape (N, p); coordinates off I count as 1."""
        A = np.ones(X.shape)
        A[:, self.I] = np.abs(X[:, self.I])
        return np.stack([self._magnitude([f], A) for f in self.map], axis=1)

    def _off_derivatives(self):
        # derivative polynomials in each variable off I, restricted to the stratum
        if not hasattr(self, "_offd"):
            zero = [k + 1 for k in range(self.n) if k not in self.I]
            self._offd = {k - 1: [[g.restrict_zero(zero) for g in
                                   ((wirtinger(f, k), wirtinger(f, k, True)) if self.mixed else (wirtinger(f, k),))]
                                  for f in self.map] for k in zero}
        return self._offd

    def column_scale(self, X: np.ndarray, S: np.ndarray) -> np.ndarray:
        """Per-variable column factors: |x_i| on I, and off I the inverse size of the derivative terms.

        Off I the derivative column only sees terms linear in that variable; when
        all of them shrink together the column is rescaled to order one, so a
        point drifting towards another coordinate hyperplane is not mistaken
        for a critical point.
        """
        d = np.ones((X.shape[0], self.n))
        d[:, self.I] = np.abs(X[:, self.I])
        A = np.abs(X)
        for k, per_comp in self._off_derivatives().items():
            T = np.stack([self._magnitude(ds, A) for ds in per_comp], axis=1) / S
            top = T.max(axis=1)
            d[:, k] = np.where(top > 0, 1.0 / np.maximum(top, 1e-300), 1.0)
        return d

    def relative(self, X: np.ndarray) -> np.ndarray:
        """Criticality and vanishing measured against the size of the terms.

        Columns of the Jacobian are scaled by ``column_scale`` and rows by the
        term scale of their component, neither of which changes the rank on the
        torus.  Points drifting to a coordinate hyperplane, where every term
        and derivative shrinks together, keep a relative residual of order one.
        """
        S = np.maximum(self.term_scale(X), 1e-300)
        J = self.num.real_jacobian(X)
        d = self.column_scale(X, S)
        rows = np.repeat(S, 2, axis=1) if self.mixed else S
        cols = np.repeat(d, 2, axis=1) if self.mixed else d
        Js = J * cols[:, None, :] / rows[:, :, None]
        sv = np.linalg.svd(Js, compute_uv=False)[:, -1] if Js.shape[1] <= Js.shape[2] else np.zeros(X.shape[0])
        if not self.weak:
            return sv
        rel_val = (np.abs(self.num.values(X)) / S).max(axis=1)
        return np.maximum(sv, rel_val)


def levenberg_marquardt(prob: StratumProblem, z: np.ndarray, iters: int) -> np.ndarray:
    """Damped Gauss-Newton on all starts at once with forward-difference Jacobians."""
    N, u = z.shape
    R = prob.residual_vector(z)
    cost = (R ** 2).sum(1)
    mu = np.full(N, 1e-3)
    eye = np.eye(u)
    for _ in range(iters):
        h = FD_STEP * np.maximum(1.0, np.abs(z))
        Jr = np.empty((N, R.shape[1], u))
        for k in range(u):
            zk = z.copy()
            zk[:, k] += h[:, k]
            Jr[:, :, k] = (prob.residual_vector(zk) - R) / h[:, k : k + 1]
        JtJ = np.einsum("nrk,nrl->nkl", Jr, Jr)
        g = np.einsum("nrk,nr->nk", Jr, R)
        diag = np.einsum("nkk->nk", JtJ)
        A = JtJ + mu[:, None, None] * (eye[None] * (diag[:, :, None] + 1e-12))
        try:
            step = -np.linalg.solve(A, g[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            step = -np.stack([np.linalg.lstsq(A[i], g[i], rcond=None)[0] for i in range(N)])
        z_new = z + step
        R_new = prob.residual_vector(z_new)
        cost_new = (R_new ** 2).sum(1)
        good = np.isfinite(cost_new) & (cost_new < cost)
        z = np.where(good[:, None], z_new, z)
        R = np.where(good[:, None], R_new, R)
        cost = np.where(good, cost_new, cost)
        mu = np.where(good, mu / 3.0, mu * 4.0)
        mu = np.clip(mu, 1e-15, 1e12)
        if np.all(cost < 1e-30):
            break
    return z


def search_stratum(prob: StratumProblem, starts: int, iters: int, rng: np.random.Generator, polish: bool = True, tol_w: float = 1e-6) -> SearchResult:
    X0 = prob.starts(starts, rng)
    lam0 = prob.initial_multipliers(X0)
    z = np.concatenate([prob.from_points(X0), lam0], axis=1)
    z = levenberg_marquardt(prob, z, iters)
    X = prob.to_slice(prob.to_points(z[:, : prob.nx]))
    res, val, margin = prob.measure(X)
    if polish:
        cand = res + (val if prob.weak else 0.0) <= tol_w
        if np.any(cand):
            zc = np.concatenate([prob.from_points(X[cand]), z[cand, prob.nx:]], axis=1)
            zc = levenberg_marquardt(prob, zc, iters)
            Xc = prob.to_slice(prob.to_points(zc[:, : prob.nx]))
            X[cand] = Xc
            z[cand, prob.nx:] = zc[:, prob.nx:]
            res, val, margin = prob.measure(X)
    return SearchResult(X, z[:, prob.nx:], res, val, margin, prob.relative(X))


class BallProblem(StratumProblem):
    """Critical points (or zero-set points) of F inside a ball, in coordinates y = x / r.

    Rows are divided by the term scale of their component at |x| = r so that
    small radii do not make every residual look converged.
    """

    def __init__(self, fmap: PolynomialMap, radius: float, weak: bool, sphere: bool = False):
        super().__init__(fmap, range(1, fmap.n + 1), weak, None)
        self.r = float(radius)
        self.sphere = sphere
        probe = np.full((1, self.n), self.r, dtype=complex)
        self.scale = np.maximum(self.term_scale(probe)[0], 1e-300)

    def to_points(self, xs: np.ndarray) -> np.ndarray:
        return super().to_points(xs) * self.r

    def from_points(self, X: np.ndarray) -> np.ndarray:
        return super().from_points(X / self.r)

    def residual_vector(self, z: np.ndarray) -> np.ndarray:
        xs, lam = z[:, : self.nx], z[:, self.nx:]
        X = self.to_points(xs)
        rows = np.repeat(self.scale, 2) if self.mixed else self.scale
        parts = []
        if not self.sphere:
            J = self.num.real_jacobian(X) * self.r / rows[None, :, None]
            parts += [np.einsum("nqm,nq->nm", J, lam), (lam ** 2).sum(1, keepdims=True) - 1]
        else:
            parts.append(((np.abs(X) / self.r) ** 2).sum(1, keepdims=True) - 1)
        if self.weak or self.sphere:
            F = self.num.values(X) / self.scale[None, :]
            parts.append(np.concatenate([F.real, F.imag], axis=1) if self.mixed else F.real)
        return np.concatenate(parts, axis=1)

    def starts(self, count: int, rng: np.random.Generator) -> np.ndarray:
        dim = 2 * self.n if self.mixed else self.n
        g = rng.standard_normal((count, dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        rad = np.ones(count) if self.sphere else rng.random(count) ** (1.0 / dim)
        g *= rad[:, None] * self.r
        if self.mixed:
            return g[:, 0::2] + 1j * g[:, 1::2]
        return g.astype(complex)
