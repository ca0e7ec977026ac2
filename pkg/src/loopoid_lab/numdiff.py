"""Central finite differences for chart maps.

All derivatives in the package come through here: Jacobians, gradients,
directional derivatives, the 4-point mixed stencil used for structure
constants, and the two-step Lie bracket of vector fields.  Steps are
relative: ``h = rel * max(1, |x|_inf)``, so charts centered at the origin
get the raw relative step.
"""

import numpy as np


def step_for(x, rel):
    x = np.asarray(x, dtype=float)
    scale = 1.0 if x.size == 0 else max(1.0, float(np.max(np.abs(x))))
    return rel * scale


def jacobian(f, x, rel_step=1e-6):
    """Jacobian of f at x, one central difference per input coordinate."""
    x = np.asarray(x, dtype=float)
    h = step_for(x, rel_step)
    n = x.size
    cols = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        cols.append((np.asarray(f(x + e), dtype=float) - np.asarray(f(x - e), dtype=float)) / (2.0 * h))
    if not cols:
        return np.zeros((np.asarray(f(x)).size, 0))
    return np.stack(cols, axis=-1)


def gradient(f, x, rel_step=1e-6):
    """Gradient of a scalar f at x."""
    return jacobian(lambda p: np.atleast_1d(f(p)), x, rel_step)[0]


def directional(f, x, v, rel_step=1e-6):
    """Central difference of f along the (unnormalized) direction v."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    h = step_for(x, rel_step)
    return (np.asarray(f(x + h * v), dtype=float) - np.asarray(f(x - h * v), dtype=float)) / (2.0 * h)


def mixed_bilinear(f, x0, y0, i, j, rel_step=1e-5):
    """d^2 f / dx_i dy_j at (x0, y0) via the 4-point stencil.

    ``f`` maps a pair of vectors to a vector; the stencil is
    (f(+h,+h) - f(+h,-h) - f(-h,+h) + f(-h,-h)) / (4 h^2).
    """
    x0 = np.asarray(x0, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    h = max(step_for(x0, rel_step), step_for(y0, rel_step))
    ei = np.zeros(x0.size)
    ei[i] = h
    ej = np.zeros(y0.size)
    ej[j] = h
    fpp = np.asarray(f(x0 + ei, y0 + ej), dtype=float)
    fpm = np.asarray(f(x0 + ei, y0 - ej), dtype=float)
    fmp = np.asarray(f(x0 - ei, y0 + ej), dtype=float)
    fmm = np.asarray(f(x0 - ei, y0 - ej), dtype=float)
    return (fpp - fpm - fmp + fmm) / (4.0 * h * h)


def lie_bracket(field_v, field_w, x, rel_step=1e-4):
    """[V, W](x) = DW(x) V(x) - DV(x) W(x) for vector fields on a chart.

    The outer Jacobians use ``rel_step``; the fields themselves may do their
    own (finer-step) differencing internally, which keeps the nested noise
    under control.
    """
    x = np.asarray(x, dtype=float)
    vx = np.asarray(field_v(x), dtype=float)
    wx = np.asarray(field_w(x), dtype=float)
    dw = jacobian(field_w, x, rel_step)
    dv = jacobian(field_v, x, rel_step)
    return dw @ vx - dv @ wx


def null_space(mat, rtol=1e-8):
    """Orthonormal rows spanning the null space of ``mat``."""
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.shape[0] == 0:
        return np.eye(mat.shape[1])
    u, s, vt = np.linalg.svd(mat)
    cut = s[0] * rtol if s.size else 0.0
    rank = int(np.sum(s > cut))
    return vt[rank:]


def smallest_singular_value(mat):
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.size == 0:
        return 0.0
    return float(np.linalg.svd(mat, compute_uv=False)[-1])
