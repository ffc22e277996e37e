"""Polynomial capacity ``inf_{x > 0} p(x) / x^alpha``.

Work happens in log coordinates: with ``P(y) = log p(exp(y))`` the objective
``F(y) = P(y) - alpha . y`` is convex, and ``cpc_alpha(p) = exp(inf F)``.  The
Newton polytope decides the three regimes:

* ``alpha`` outside: the capacity is 0.
* ``alpha`` on a proper face: the infimum is approached at infinity and equals
  the capacity of the terms on that face, which are kept and re-solved.
* relative interior: ``F`` attains its minimum; damped Newton finds it.

``F`` is constant along directions orthogonal to the affine hull of the
support, so the solve runs in an orthonormal basis of that hull.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .poly import Exponent, SparsePoly, to_fraction
from .polytope import BOUNDARY, INTERIOR, OUTSIDE, membership

log = logging.getLogger(__name__)

GRAD_TOL = 1e-10
MAX_ITER = 200
ARMIJO_C = 1e-4
RIDGE = 1e-12


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class CapacityResult:
    value: float
    status: str
    minimizer_log: Optional[np.ndarray] = None
    face: Optional[Tuple[Exponent, ...]] = None
    converged: bool = True
    iterations: int = 0
    grad_norm: float = 0.0

    def to_dict(self) -> dict:
        out = {"value": float(self.value), "status": self.status}
        if self.face is not None and self.status == BOUNDARY:
            out["face"] = [list(e) for e in self.face]
        if self.minimizer_log is not None:
            out["minimizer_log"] = [float(v) for v in self.minimizer_log]
        out["converged"] = bool(self.converged)
        out["iterations"] = int(self.iterations)
        return out


def _log_coef(c) -> float:
    if isinstance(c, Fraction):
        return math.log(c.numerator) - math.log(c.denominator)
    return math.log(c)


def _arrays(p: SparsePoly):
    exps = list(p.terms)
    logc = np.array([_log_coef(p.terms[e]) for e in exps], dtype=float)
    return exps, logc


def log_partition(p: SparsePoly, y: Sequence[float]):
    """Value, gradient and Hessian of ``P(y) = log sum_mu p_mu exp(mu . y)``.

    The gradient is the mean of ``mu`` under the Gibbs weights
    ``p_mu exp(mu . y) / p(exp y)`` and the Hessian is their covariance.
    """
    if p.is_zero():
        raise CapacityError("log_partition of the zero polynomial")
    y = np.asarray(y, dtype=float)
    if y.shape != (p.arity,):
        raise ValueError(f"y has shape {y.shape}, expected ({p.arity},)")
    exps, logc = _arrays(p)
    mu = np.array(exps, dtype=float).reshape(len(exps), p.arity)
    s = logc + mu @ y
    top = s.max()
    w = np.exp(s - top)
    total = w.sum()
    value = top + math.log(total)
    w /= total
    mean = w @ mu
    centered = mu - mean
    hess = (centered * w[:, None]).T @ centered
    return value, mean, hess


def _lse(s: np.ndarray):
    top = s.max()
    w = np.exp(s - top)
    total = w.sum()
    return top + math.log(total), w / total


def _affine_basis(d: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the span of the rows of ``d``."""
    if d.size == 0:
        return np.zeros((d.shape[1], 0))
    _, sv, vt = np.linalg.svd(d, full_matrices=False)
    if sv.size == 0:
        return np.zeros((d.shape[1], 0))
    rank = int((sv > max(d.shape) * sv[0] * 1e-12).sum()) if sv[0] > 0 else 0
    return vt[:rank].T


def _newton(exps: np.ndarray, logc: np.ndarray, alpha: np.ndarray,
            grad_tol: float, max_iter: int):
    """Minimise ``log sum exp(logc + (mu - alpha) . y)`` over the affine hull."""
    shifted = exps - alpha
    basis = _affine_basis(exps - exps[0]) if len(exps) > 1 else np.zeros((exps.shape[1], 0))
    d = shifted @ basis
    r = basis.shape[1]
    z = np.zeros(r)

    def objective(z):
        return _lse(logc + d @ z)

    f, w = objective(z)
    if r == 0:
        return f, np.zeros(exps.shape[1]), True, 0, 0.0
    it = 0
    converged = False
    while True:
        g = w @ d
        gnorm = float(np.abs(w @ shifted).max())
        if gnorm <= grad_tol:
            converged = True
            break
        if it >= max_iter:
            break
        dc = d - g
        H = (dc * w[:, None]).T @ dc
        try:
            L = np.linalg.cholesky(H)
        except np.linalg.LinAlgError:
            H = H + RIDGE * max(np.trace(H), 1.0) * np.eye(r)
            L = np.linalg.cholesky(H)
        step = -np.linalg.solve(L.T, np.linalg.solve(L, g))
        slope = float(g @ step)
        if slope >= 0:
            step, slope = -g, -float(g @ g)
        # near the optimum F changes below rounding; allow that much slack
        noise = 8 * np.finfo(float).eps * max(1.0, abs(f))
        t = 1.0
        f_new, w_new = objective(z + step)
        while f_new > f + ARMIJO_C * t * slope + noise and t > 1e-20:
            t *= 0.5
            f_new, w_new = objective(z + t * step)
        it += 1
        if f_new > f + ARMIJO_C * t * slope + noise:
            # no decrease representable in double precision: F is flat to rounding here
            converged = gnorm <= 1e3 * grad_tol
            break
        z = z + t * step
        f, w = f_new, w_new
    return f, basis @ z, converged, it, gnorm


def capacity_from_log_terms(exps: Sequence[Exponent], logc: Sequence[float], alpha: Sequence,
                            grad_tol: float = GRAD_TOL, max_iter: int = MAX_ITER) -> CapacityResult:
    """Capacity of ``sum_i exp(logc[i]) x^exps[i]``; coefficients never leave log space."""
    exps = [tuple(int(v) for v in e) for e in exps]
    alpha_q = [to_fraction(a) for a in alpha]
    if any(a < 0 for a in alpha_q):
        raise CapacityError("alpha must be entrywise nonnegative")
    if not exps:
        raise CapacityError("capacity of the zero polynomial")
    n = len(alpha_q)
    if any(len(e) != n for e in exps):
        raise CapacityError(f"alpha has length {n}, polynomial arity {len(exps[0])}")
    if n == 0:
        value, _ = _lse(np.asarray(logc, dtype=float))
        return CapacityResult(math.exp(value), INTERIOR, np.zeros(0), tuple(exps))

    mem = membership(exps, alpha_q)
    if mem.status == OUTSIDE:
        return CapacityResult(0.0, OUTSIDE)
    index = {e: i for i, e in enumerate(exps)}
    keep = [index[e] for e in mem.face]
    E = np.array([exps[i] for i in keep], dtype=float)
    L = np.asarray(logc, dtype=float)[keep]
    a = np.array([float(v) for v in alpha_q])
    f, y, converged, it, gnorm = _newton(E, L, a, grad_tol, max_iter)
    if not converged:
        log.warning("capacity: no convergence after %d iterations (|grad|=%.3e)", it, gnorm)
    value = math.exp(f)
    if mem.status == BOUNDARY:
        return CapacityResult(value, BOUNDARY, None, mem.face, converged, it, gnorm)
    return CapacityResult(value, INTERIOR, y, mem.face, converged, it, gnorm)


def capacity(p: SparsePoly, alpha: Sequence, grad_tol: float = GRAD_TOL,
             max_iter: int = MAX_ITER) -> CapacityResult:
    """``cpc_alpha(p)`` with status and minimiser (in log coordinates)."""
    if len(alpha) != p.arity:
        raise CapacityError(f"alpha has length {len(alpha)}, expected {p.arity}")
    if p.is_zero():
        raise CapacityError("capacity of the zero polynomial")
    exps, logc = _arrays(p)
    return capacity_from_log_terms(exps, logc, alpha, grad_tol, max_iter)


def cpc(p: SparsePoly, alpha: Sequence) -> float:
    """Shorthand for ``capacity(p, alpha).value``."""
    return capacity(p, alpha).value


def xlogx(a) -> float:
    """``a log a`` with ``0 log 0 = 0``."""
    a = float(a)
    return 0.0 if a == 0 else a * math.log(a)


def power_self(alpha: Sequence) -> float:
    """``alpha^alpha = prod_k alpha_k^alpha_k`` with ``0^0 = 1``."""
    return math.exp(sum(xlogx(a) for a in alpha))


def capacity_linear_power(c: Sequence[float], alpha: Sequence, m=None) -> float:
    """Closed form ``prod_k (m c_k / alpha_k)^alpha_k`` for ``(c . x)^m``, ``m = sum(alpha)``."""
    if len(c) != len(alpha):
        raise ValueError("c and alpha differ in length")
    if any(ci <= 0 for ci in c):
        raise ValueError("c must be positive")
    total = sum(to_fraction(a) for a in alpha)
    if m is None:
        m = total
    if abs(float(total) - float(m)) > 1e-12 * max(1.0, abs(float(m))):
        raise ValueError(f"sum(alpha) = {total} differs from m = {m}")
    m = float(m)
    s = 0.0
    for ci, a in zip(c, alpha):
        a = float(a)
        if a > 0:
            s += a * (math.log(m * float(ci)) - math.log(a))
    return math.exp(s)


def truncation_poly_log_terms(coef: Callable[[Exponent], float], lam: Sequence[int]):
    """Log-terms of ``f_lam(x / lam) = sum_{mu <= lam} binom(lam, mu) c_mu (x / lam)^mu``."""
    import itertools

    lam = tuple(int(l) for l in lam)
    exps, logc = [], []
    for mu in itertools.product(*(range(l + 1) for l in lam)):
        c = coef(mu)
        if c < 0:
            raise ValueError("coefficient functional must be nonnegative")
        if c == 0:
            continue
        lc = _log_coef(c) if not isinstance(c, int) else math.log(c)
        for l, k in zip(lam, mu):
            lc += math.lgamma(l + 1) - math.lgamma(k + 1) - math.lgamma(l - k + 1) - k * math.log(l)
        exps.append(mu)
        logc.append(lc)
    return exps, logc


def capacity_of_truncation_sequence(coef: Callable[[Exponent], float], alpha: Sequence,
                                    lam_list: Sequence) -> list[float]:
    """``cpc_alpha(f_lam(x / lam))`` for each ``lam``.

    ``f = sum_mu c_mu x^mu / mu!`` is given by its coefficient functional
    ``coef(mu) = c_mu``.  Each ``lam`` may be an int (same degree in every
    variable) or a tuple.
    """
    n = len(alpha)
    out = []
    for lam in lam_list:
        lam_t = (lam,) * n if isinstance(lam, int) else tuple(lam)
        exps, logc = truncation_poly_log_terms(coef, lam_t)
        out.append(capacity_from_log_terms(exps, logc, alpha).value)
    return out


# -- basic capacity preservers ----------------------------------------------

PRESERVER_IDENTITIES = (
    "scaling", "product", "disjoint_product", "evaluation", "external_field", "inversion",
    "concavity", "diagonalization", "symmetric_diagonalization", "homogenization", "polarization",
)


def _frac_vec(v) -> list:
    return [to_fraction(a) for a in v]


def check_preserver_identity(name: str, instance: dict, tol: float | None = None):
    """Evaluate both sides of one basic capacity-preserver relation.

    ``instance`` keys by identity:

    ========================== ==========================================
    scaling                    p, alpha, b
    product                    p, q, alpha, beta
    disjoint_product           p, q, alpha, beta
    evaluation                 p, alpha, y, [k] (default: last variable)
    external_field             p, alpha, c
    inversion                  p, alpha, lam
    concavity                  p, q, alpha, b, c
    diagonalization            p, alpha
    symmetric_diagonalization  p (symmetric), alpha (constant vector)
    homogenization             p, alpha, lam
    polarization               p, alpha, lam
    ========================== ==========================================
    """
    from . import poly as P
    from .report import EQ_TOL, INEQ_TOL, BoundReport

    p = instance["p"]
    alpha = _frac_vec(instance["alpha"])
    equality = True

    if name == "scaling":
        b = instance["b"]
        lhs, rhs = cpc(p * b, alpha), b * cpc(p, alpha)
    elif name == "product":
        q, beta = instance["q"], _frac_vec(instance["beta"])
        lhs = cpc(p * q, [a + b for a, b in zip(alpha, beta)])
        rhs = cpc(p, alpha) * cpc(q, beta)
        equality = False
    elif name == "disjoint_product":
        q, beta = instance["q"], _frac_vec(instance["beta"])
        lhs = cpc(P.tensor(p, q), alpha + beta)
        rhs = cpc(p, alpha) * cpc(q, beta)
    elif name == "evaluation":
        y = instance["y"]
        k = instance.get("k", p.arity - 1)
        rest = alpha[:k] + alpha[k + 1:]
        lhs = cpc(P.substitute(p, k, y), rest)
        weight = 1.0 if alpha[k] == 0 else float(y) ** float(alpha[k])
        rhs = weight * cpc(p, alpha)
        equality = False
    elif name == "external_field":
        c = instance["c"]
        lhs = cpc(P.scale_variables(p, c), alpha)
        rhs = math.prod(float(ci) ** float(a) for ci, a in zip(c, alpha)) * cpc(p, alpha)
    elif name == "inversion":
        lam = instance["lam"]
        lhs = cpc(P.invert(p, lam), [l - a for l, a in zip(lam, alpha)])
        rhs = cpc(p, alpha)
    elif name == "concavity":
        q, b, c = instance["q"], instance["b"], instance["c"]
        lhs = cpc(p * b + q * c, alpha)
        rhs = b * cpc(p, alpha) + c * cpc(q, alpha)
        equality = False
    elif name == "diagonalization":
        lhs = cpc(P.diagonal(p), [sum(alpha)])
        rhs = cpc(p, alpha)
        equality = False
    elif name == "symmetric_diagonalization":
        if len(set(alpha)) > 1:
            raise ValueError("symmetric diagonalization needs a constant alpha")
        if not p.is_symmetric():
            raise ValueError("symmetric diagonalization needs a symmetric polynomial")
        lhs = cpc(P.diagonal(p), [sum(alpha)])
        rhs = cpc(p, alpha)
    elif name == "homogenization":
        lam = instance["lam"]
        lhs = cpc(P.homogenize(p, lam), alpha + [l - a for l, a in zip(lam, alpha)])
        rhs = cpc(p, alpha)
    elif name == "polarization":
        lam = instance["lam"]
        lhs = cpc(P.polarize(p, lam), P.polarize_vector(alpha, lam))
        rhs = cpc(p, alpha)
    else:
        raise ValueError(f"unknown identity {name!r}; expected one of {PRESERVER_IDENTITIES}")

    trivial = lhs == 0 and rhs == 0 if equality else rhs == 0
    ctx = f"{name}: alpha={[str(a) for a in alpha]}"
    if equality:
        return BoundReport.equality(lhs, rhs, tol=tol or EQ_TOL, context=ctx, tag=name,
                                    trivial=trivial)
    return BoundReport.inequality(lhs, rhs, tol=tol or INEQ_TOL, context=ctx, tag=name,
                                  trivial=trivial)
