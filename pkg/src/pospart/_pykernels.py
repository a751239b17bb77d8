"""Pure-Python reference kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used
when the extension is not built or ``POSPART_PURE_PYTHON=1`` is set.
"""

import numpy as np


def ldl_factor(diag, off):
    """LDL^T factorization of a symmetric tridiagonal matrix, no pivoting.

    Returns ``(d, l)`` with ``d`` the pivots and ``l`` the unit lower
    subdiagonal. Raises ``ZeroDivisionError`` on a non-positive pivot.
    """
    diag = np.asarray(diag, dtype=np.float64)
    off = np.asarray(off, dtype=np.float64)
    n = diag.shape[0]
    d = np.empty(n)
    l = np.empty(max(n - 1, 0))
    d[0] = diag[0]
    if not d[0] > 0.0:
        raise ZeroDivisionError("non-positive pivot at row 0")
    for i in range(1, n):
        l[i - 1] = off[i - 1] / d[i - 1]
        d[i] = diag[i] - l[i - 1] * off[i - 1]
        if not d[i] > 0.0:
            raise ZeroDivisionError("non-positive pivot at row %d" % i)
    return d, l


def ldl_solve(d, l, rhs):
    """Solve with a factor from :func:`ldl_factor`; ``rhs`` is 1-D or 2-D (columns)."""
    x = np.array(rhs, dtype=np.float64, copy=True)
    n = d.shape[0]
    for i in range(1, n):
        x[i] -= l[i - 1] * x[i - 1]
    if x.ndim == 1:
        x /= d
    else:
        x /= d[:, None]
    for i in range(n - 2, -1, -1):
        x[i] -= l[i] * x[i + 1]
    return x


def tridiag_matvec(diag, off, x):
    x = np.asarray(x, dtype=np.float64)
    y = diag * x if x.ndim == 1 else diag[:, None] * x
    if off.shape[0]:
        o = off if x.ndim == 1 else off[:, None]
        y[:-1] += o * x[1:]
        y[1:] += o * x[:-1]
    return y


def heat_march(d, l, b_diag, b_off, u0, source, out):
    """Run ``out[k+1] = L^{-T} D^{-1} L^{-1} (B out[k] + source[k])``.

    ``B`` is the symmetric tridiagonal explicit-side matrix given by
    ``b_diag``/``b_off``; ``source`` has shape ``(num_steps, n)`` or is None.
    """
    out[0] = u0
    for k in range(out.shape[0] - 1):
        rhs = tridiag_matvec(b_diag, b_off, out[k])
        if source is not None:
            rhs += source[k]
        out[k + 1] = ldl_solve(d, l, rhs)
    return out
