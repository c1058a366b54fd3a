"""Complex determinants, truncated power series and a damped Newton solver."""

from dataclasses import dataclass

import numpy as np

from .errors import SU2DetError, InvalidInput, NoConvergence, PoleAtExpansionPoint, SingularJacobian

SINGULAR_RTOL = 1e-13
POLE_TOL = 1e-12


def as_complex(x, name="value"):
    """Coerce to a finite Python complex or raise InvalidInput."""
    try:
        c = complex(x)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{name} is not a complex number: {x!r}", name=name) from exc
    if not (np.isfinite(c.real) and np.isfinite(c.imag)):
        raise InvalidInput(f"{name} is not finite: {c!r}", name=name)
    return c


def as_complex_array(xs, name="values"):
    arr = np.asarray(xs, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} contains non-finite entries", name=name)
    return arr


def det(m):
    """Determinant by LU factorization with partial pivoting.

    Returns exactly 0 when a pivot column has no entry above
    ``1e-13 * max row norm``. The empty matrix has determinant 1.
    """
    a = np.array(m, dtype=complex, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        if a.size == 0:
            return 1.0 + 0j
        raise InvalidInput("det requires a square matrix", shape=list(a.shape))
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    if not np.all(np.isfinite(a)):
        raise InvalidInput("det: matrix has non-finite entries")
    scale = np.max(np.sum(np.abs(a), axis=1))
    thresh = SINGULAR_RTOL * scale
    result = 1.0 + 0j
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) <= thresh:
            return 0j
        if p != k:
            a[[k, p]] = a[[p, k]]
            result = -result
        piv = a[k, k]
        result *= piv
        if k + 1 < n:
            factors = a[k + 1:, k] / piv
            a[k + 1:, k + 1:] -= np.outer(factors, a[k, k + 1:])
    return complex(result)


@dataclass(frozen=True)
class PowerSeries:
    """Truncated expansion c_0 + c_1 eps + ... + c_order eps^order."""

    coeffs: tuple

    @property
    def order(self):
        return len(self.coeffs) - 1

    def __mul__(self, other):
        return series_mul(self, other)

    def scale(self, k):
        return PowerSeries(tuple(complex(k) * c for c in self.coeffs))


def power_series(coeffs):
    arr = as_complex_array(coeffs, "coeffs")
    if arr.size == 0:
        raise InvalidInput("a power series needs at least one coefficient")
    return PowerSeries(tuple(complex(c) for c in arr))


def pole_series(c, order):
    """Taylor coefficients of eps -> 1/(c - eps): coefficient m is c**-(m+1)."""
    c = as_complex(c, "c")
    if order < 0:
        raise InvalidInput("order must be non-negative", order=order)
    if abs(c) < POLE_TOL:
        raise PoleAtExpansionPoint(f"pole at the expansion point (|c|={abs(c):.3g})", c=[c.real, c.imag])
    inv = 1.0 / c
    coeffs = []
    t = inv
    for _ in range(order + 1):
        coeffs.append(t)
        t *= inv
    return PowerSeries(tuple(coeffs))


def series_mul(a, b):
    """Cauchy product truncated at the common order."""
    if a.order != b.order:
        raise InvalidInput("series orders differ", left=a.order, right=b.order)
    out = np.convolve(np.asarray(a.coeffs), np.asarray(b.coeffs))[: a.order + 1]
    return PowerSeries(tuple(complex(c) for c in out))


def fd_jacobian(residual, x, f0=None):
    """Central-difference Jacobian for a holomorphic residual."""
    x = np.asarray(x, dtype=complex)
    cols = []
    for i in range(x.size):
        h = 1e-7 * (1.0 + abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        cols.append((np.asarray(residual(xp)) - np.asarray(residual(xm))) / (2 * h))
    return np.array(cols, dtype=complex).T.reshape(x.size, x.size)


def newton_solve(residual, x0, jacobian=None, tol=1e-12, max_iter=100):
    """Damped Newton iteration for a square complex system.

    ``jacobian`` defaults to central finite differences. When a full step does
    not reduce the sup-norm residual the step is halved up to 30 times.
    Returns x with ||residual(x)||_inf <= tol or raises NoConvergence with the
    best iterate attached.
    """
    if tol <= 0:
        raise InvalidInput("tol must be positive", tol=tol)
    x = np.array(x0, dtype=complex).reshape(-1)
    jac = jacobian if jacobian is not None else (lambda y: fd_jacobian(residual, y))
    f = np.asarray(residual(x), dtype=complex).reshape(-1)
    if f.size != x.size:
        raise InvalidInput("residual must return as many components as unknowns", n=x.size, m=f.size)
    norm = np.max(np.abs(f)) if f.size else 0.0
    best, best_norm = x.copy(), norm
    for _ in range(max_iter):
        if norm <= tol:
            return x
        J = np.asarray(jac(x), dtype=complex).reshape(x.size, x.size)
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian("Newton Jacobian is singular", residual=float(norm)) from exc
        if not np.all(np.isfinite(step)):
            raise SingularJacobian("Newton step is not finite", residual=float(norm))
        lam = 1.0
        for _ in range(31):
            xn = x + lam * step
            try:
                with np.errstate(all="ignore"):
                    fn = np.asarray(residual(xn), dtype=complex).reshape(-1)
                nn = np.max(np.abs(fn))
            except (SU2DetError, ZeroDivisionError):
                nn = np.inf
            if np.isfinite(nn) and nn < norm:
                break
            lam *= 0.5
        else:
            raise NoConvergence("damping could not reduce the residual", best=best, residual=float(best_norm))
        x, f, norm = xn, fn, nn
        if norm < best_norm:
            best, best_norm = x.copy(), norm
    if norm <= tol:
        return x
    raise NoConvergence(f"no convergence in {max_iter} iterations", best=best, residual=float(best_norm))
