"""Infinitesimal structure of charted quasiloopoids.

The normal bundle of the unit manifold is realized by per-point frames: an
alpha-vertical basis (null space of T alpha at the embedded unit), the
beta-vertical representatives of the same normal classes
(X^beta_i = X^alpha_i - T eps . rho_i, which forces opposite left/right
anchors), and a basis of the embedded tangent directions.  Frames also carry
an "anchor-aligned" beta basis: the strict representatives reflected across
the bi-vertical subspace, so their T alpha images equal +rho instead of
-rho.  Discrete mechanics defaults to the aligned orientation (it makes the
two Legendre transforms agree on the unit manifold); brackets, anchors and
the inversion identities use the strict one.

Left/right prolongations are fundamental vector fields obtained by
differencing the partial multiplication along fiber directions; their Lie
brackets at unit points, expanded back in the frame, are the two skew
brackets carried by the normal bundle.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    FrameSingular,
    JetNotVanishing,
    NotOnFiber,
    NotSubmersion,
    RankDeficient,
    RankNotConstant,
)
from .numdiff import (
    directional,
    gradient,
    jacobian,
    lie_bracket,
    null_space,
    smallest_singular_value,
)

STRICT = "normal_class"
ALIGNED = "aligned"


@dataclass(frozen=True)
class AlgebroidFrame:
    """Frame of the normal bundle at one unit point."""

    unit_point: np.ndarray
    rank: int
    alpha_vertical: np.ndarray        # (r, dim_g) rows, ker T alpha
    beta_vertical: np.ndarray         # (r, dim_g) strict same-class reps, ker T beta
    beta_vertical_aligned: np.ndarray  # (r, dim_g) reflected reps, T alpha image = +rho
    tm_basis: np.ndarray              # (dim_m, dim_g) image of T eps
    rho_left: np.ndarray              # (r, dim_m) anchors T beta(alpha-vertical)

    def beta_reps(self, orientation):
        if orientation == STRICT:
            return self.beta_vertical
        if orientation == ALIGNED:
            return self.beta_vertical_aligned
        raise ValueError(f"unknown orientation {orientation!r}")


def algebroid_frame(q, u, alpha_vertical=None, *, tol=1e-7):
    """Compute the frame at the embedded unit of ``u``.

    ``alpha_vertical`` overrides the basis of ker T alpha (rows); by default
    the instance's preferred frame is used when it has one, otherwise an SVD
    null space.
    """
    u = np.asarray(u, dtype=float)
    e = np.asarray(q.unit_embed(u), dtype=float)
    ja = jacobian(q.alpha, e, q.fd_step)
    jb = jacobian(q.beta, e, q.fd_step)
    je = jacobian(q.unit_embed, u, q.fd_step)

    r = q.rank
    if q.dim_m > 0 and (
        smallest_singular_value(ja) < 1e-8 or smallest_singular_value(jb) < 1e-8
    ):
        raise RankDeficient(f"alpha/beta Jacobian loses submersion rank at u = {u}")
    if alpha_vertical is None and q.preferred_alpha_vertical is not None:
        alpha_vertical = q.preferred_alpha_vertical(u)
    if alpha_vertical is None:
        alpha_vertical = null_space(ja)
    a = np.atleast_2d(np.asarray(alpha_vertical, dtype=float))
    if a.shape != (r, q.dim_g):
        raise RankDeficient(f"alpha-vertical basis shape {a.shape} != ({r}, {q.dim_g})")
    if q.dim_m > 0 and float(np.max(np.abs(ja @ a.T))) > tol:
        raise RankDeficient("alpha-vertical basis is not in ker T alpha")

    rho = (jb @ a.T).T                       # (r, m)
    b = a - rho @ je.T                       # strict: subtract T eps . rho
    if q.dim_m > 0 and float(np.max(np.abs(jb @ b.T))) > tol:
        raise RankDeficient("beta-vertical representatives left ker T beta")

    biv = null_space(np.vstack([ja, jb]))    # orthonormal rows
    proj = biv.T @ biv if biv.size else np.zeros((q.dim_g, q.dim_g))
    b_aligned = (2.0 * proj @ b.T - b.T).T

    return AlgebroidFrame(
        unit_point=u,
        rank=r,
        alpha_vertical=a,
        beta_vertical=b,
        beta_vertical_aligned=b_aligned,
        tm_basis=je.T,
        rho_left=rho,
    )


def make_frame_field(q, alpha_vertical_fn=None):
    """Cached u -> AlgebroidFrame map for use inside field differencing."""
    cache = {}

    def field(u):
        u = np.asarray(u, dtype=float)
        key = np.round(u, 12).tobytes()
        if key not in cache:
            av = alpha_vertical_fn(u) if alpha_vertical_fn is not None else None
            cache[key] = algebroid_frame(q, u, av)
        return cache[key]

    return field


def prolong(q, frame_field, coeffs, side, g, orientation=STRICT, *, slab_tol=1e-6):
    """Fundamental vector field value at g.

    Left: difference h -> m(g, h) at the unit of beta(g) along the
    alpha-vertical representative of the section.  Right: difference
    h -> m(h, g) at the unit of alpha(g) along the beta representative in
    the requested orientation.
    """
    g = np.asarray(g, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    if side == "left":
        u = np.asarray(q.beta(g), dtype=float)
        fr = frame_field(u)
        direction = coeffs @ fr.alpha_vertical
        base = np.asarray(q.unit_embed(u), dtype=float)
        probe = base + q.fd_step * direction
        gap = np.linalg.norm(np.asarray(q.alpha(probe), dtype=float) - u)
        if gap > slab_tol:
            raise NotOnFiber(f"difference step leaves the slab by {gap:.2e}")
        return directional(lambda h: q.mul(g, h), base, direction, q.fd_step)
    if side == "right":
        u = np.asarray(q.alpha(g), dtype=float)
        fr = frame_field(u)
        direction = coeffs @ fr.beta_reps(orientation)
        base = np.asarray(q.unit_embed(u), dtype=float)
        probe = base + q.fd_step * direction
        gap = np.linalg.norm(np.asarray(q.beta(probe), dtype=float) - u)
        if gap > slab_tol:
            raise NotOnFiber(f"difference step leaves the slab by {gap:.2e}")
        return directional(lambda h: q.mul(h, g), base, direction, q.fd_step)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def fundamental_field(q, frame_field, coeffs, side, orientation=STRICT):
    """The prolonged field as a plain chart vector field g -> vector."""

    def field(g):
        return prolong(q, frame_field, coeffs, side, g, orientation)

    return field


def expand_in_frame(fr, side, value, orientation=STRICT, *, tm_tol=1e-5):
    """Coefficients of a vertical vector in [side basis | TM basis].

    Returns (side_coeffs, tm_coeffs); raises FrameSingular on an
    ill-conditioned frame matrix.
    """
    rows = fr.alpha_vertical if side == "left" else fr.beta_reps(orientation)
    mat = np.vstack([rows, fr.tm_basis]).T
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv[-1] < 1e-10 * sv[0]:
        raise FrameSingular(f"frame condition {sv[0] / sv[-1]:.2e}")
    coeffs, *_ = np.linalg.lstsq(mat, np.asarray(value, dtype=float), rcond=None)
    return coeffs[: fr.rank], coeffs[fr.rank :]


def algebroid_bracket(
    q,
    side,
    x_coeffs,
    y_coeffs,
    u,
    frame_field=None,
    orientation=STRICT,
    outer_step=1e-4,
    return_tm=False,
):
    """Skew bracket of two constant-in-frame sections, in frame coefficients.

    The Lie bracket of the prolonged fields is evaluated at the embedded
    unit by nested central differences (outer step here, inner step the
    instance's) and expanded back in the frame; the TM component of the
    expansion is reported when ``return_tm`` is set and should vanish, since
    brackets of vertical fields stay vertical.
    """
    if frame_field is None:
        frame_field = make_frame_field(q)
    u = np.asarray(u, dtype=float)
    fx = fundamental_field(q, frame_field, x_coeffs, side, orientation)
    fy = fundamental_field(q, frame_field, y_coeffs, side, orientation)
    e = np.asarray(q.unit_embed(u), dtype=float)
    value = lie_bracket(fx, fy, e, outer_step)
    fr = frame_field(u)
    coeffs, tm = expand_in_frame(fr, side, value, orientation)
    if return_tm:
        return coeffs, tm
    return coeffs


def anchor(q, x_coeffs, u, side="left", frame_field=None, *, check_tol=1e-8):
    """rho_l(X) = T beta(alpha-rep) or rho_r(X) = T alpha(strict beta-rep).

    The opposition contract rho_r = -rho_l is re-verified on every call.
    """
    if frame_field is None:
        frame_field = make_frame_field(q)
    u = np.asarray(u, dtype=float)
    fr = frame_field(u)
    x = np.asarray(x_coeffs, dtype=float)
    rho_l = x @ fr.rho_left
    e = np.asarray(q.unit_embed(u), dtype=float)
    ja = jacobian(q.alpha, e, q.fd_step)
    rho_r = ja @ (x @ fr.beta_vertical)
    if np.linalg.norm(rho_r + rho_l) > check_tol * max(1.0, np.linalg.norm(rho_l)):
        raise FrameSingular(
            f"anchor opposition violated: |rho_r + rho_l| = {np.linalg.norm(rho_r + rho_l):.2e}"
        )
    return rho_l if side == "left" else rho_r


def check_almost_lie_loopoid(q, u_samples, frame_field=None, outer_step=1e-4):
    """max |rho([X,Y]) - [rho X, rho Y]| over frame pairs at sampled units."""
    if frame_field is None:
        frame_field = make_frame_field(q)
    r = q.rank
    worst = 0.0
    for u in np.atleast_2d(np.asarray(u_samples, dtype=float)):
        fr = frame_field(u)
        for i in range(r):
            for j in range(i + 1, r):
                ei = np.eye(r)[i]
                ej = np.eye(r)[j]
                br = algebroid_bracket(q, "left", ei, ej, u, frame_field)
                rho_br = br @ fr.rho_left
                fi = lambda up, k=i: frame_field(up).rho_left[k]
                fj = lambda up, k=j: frame_field(up).rho_left[k]
                vf = lie_bracket(fi, fj, u, outer_step)
                worst = max(worst, float(np.linalg.norm(rho_br - vf)))
    return worst


# ---------------------------------------------------------------------------
# skew-algebroid charts (structure functions + anchor functions)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SkewAlgebroidChart:
    """Skew algebroid over R^base_dim in a frame of rank ``rank``.

    ``c_fn(x)`` returns the (rank, rank, rank) structure tensor c[k, i, j],
    antisymmetric in (i, j); ``rho_fn(x)`` the (base_dim, rank) anchor
    matrix whose columns are the anchors of the frame sections.
    """

    base_dim: int
    rank: int
    c_fn: Callable
    rho_fn: Callable
    fd_step: float = 1e-5
    name: str = "skew_algebroid"
    spec: Optional[dict] = None

    def c(self, x):
        t = np.asarray(self.c_fn(np.asarray(x, dtype=float)), dtype=float)
        return t.reshape(self.rank, self.rank, self.rank)

    def rho(self, x):
        m = np.asarray(self.rho_fn(np.asarray(x, dtype=float)), dtype=float)
        return m.reshape(self.base_dim, self.rank)


def constant_chart(c, rho, name="constant"):
    c = np.asarray(c, dtype=float)
    rho = np.asarray(rho, dtype=float)
    r = c.shape[0]
    m = rho.shape[0]
    return SkewAlgebroidChart(
        base_dim=m,
        rank=r,
        c_fn=lambda x: c,
        rho_fn=lambda x: rho,
        name=name,
        spec={"kind": "constant", "c": c.tolist(), "rho": rho.tolist()},
    )


def tangent_chart(m):
    """TM as a skew algebroid: zero bracket constants, identity anchor."""
    return SkewAlgebroidChart(
        base_dim=m,
        rank=m,
        c_fn=lambda x: np.zeros((m, m, m)),
        rho_fn=lambda x: np.eye(m),
        name=f"tangent({m})",
        spec={"kind": "tangent", "dim": m},
    )


def _as_section(section, rank):
    if callable(section):
        return lambda x: np.asarray(section(x), dtype=float).reshape(rank)
    arr = np.asarray(section, dtype=float).reshape(rank)
    return lambda x: arr


def leibniz_bracket(chart, x_section, y_section, x):
    """[f_i e_i, g_j e_j](x) by the Leibniz rule.

    = f_i g_j c_{ij}(x) + (rho(f)(x) . grad) g - (rho(g)(x) . grad) f,
    the derivative terms being central differences of the coefficient
    functions along the anchored base directions.
    """
    x = np.asarray(x, dtype=float)
    fx = _as_section(x_section, chart.rank)
    gy = _as_section(y_section, chart.rank)
    f0 = fx(x)
    g0 = gy(x)
    c = chart.c(x)
    rho = chart.rho(x)
    out = np.einsum("kij,i,j->k", c, f0, g0)
    vf = rho @ f0
    vg = rho @ g0
    out = out + directional(gy, x, vf, chart.fd_step) - directional(fx, x, vg, chart.fd_step)
    return out


def check_almost_lie_chart(chart, x_samples, tol_scale=1.0):
    """max |c^k_ij rho_k - [rho_i, rho_j]| over frame pairs at samples."""
    worst = 0.0
    for x in np.atleast_2d(np.asarray(x_samples, dtype=float)):
        c = chart.c(x)
        rho = chart.rho(x)
        for i in range(chart.rank):
            for j in range(i + 1, chart.rank):
                lhs = rho @ c[:, i, j]
                fi = lambda p, k=i: chart.rho(p)[:, k]
                fj = lambda p, k=j: chart.rho(p)[:, k]
                rhs = lie_bracket(fi, fj, x, 1e-5)
                worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def prolong_algebroid(chart, pi, *, probe_rng=None, n_probe=8):
    """Prolongation over a split fibration pi: P -> M.

    Carrier {(X, V): rho(X) = T pi(V)} over P, rank = rank + dim_fiber.  In
    the frame (horizontal lifts of the input frame, vertical fiber
    directions) the structure tensor embeds the input one and the anchor
    stacks rho with the vertical identity.  The anchor of a bracket is the
    bracket of anchors by construction, so the output is almost Lie whenever
    its own bracket closes (in particular for almost-Lie inputs of any
    Jacobi status, and always over a point base).
    """
    rng = probe_rng if probe_rng is not None else np.random.default_rng(0)
    pi.check_submersion(rng)
    if pi.dim_base != chart.base_dim:
        raise NotSubmersion(
            f"fibration base dim {pi.dim_base} != algebroid base dim {chart.base_dim}"
        )
    nf = pi.dim_fiber
    r = chart.rank
    big_r = r + nf

    # constant-rank probe of the pointwise fiber {(X, V) : rho(X) = T pi(V)}
    dims = set()
    for p in rng.normal(scale=0.5, size=(n_probe, pi.dim_total)):
        jpi = jacobian(pi.proj, p)
        span = np.hstack([chart.rho(pi.proj(p)), jpi])
        srank = int(np.linalg.matrix_rank(span, tol=1e-10))
        dims.add(r + pi.dim_total - srank)
    if len(dims) != 1:
        raise RankNotConstant(f"prolonged fiber dimension varies: {sorted(dims)}")

    def c_fn(p):
        base = pi.proj(p)
        out = np.zeros((big_r, big_r, big_r))
        out[:r, :r, :r] = chart.c(base)
        return out

    def rho_fn(p):
        base, fib = pi.split(p)
        if pi.join_jac_base is not None:
            jb = np.asarray(pi.join_jac_base(base, fib), dtype=float)
        else:
            jb = jacobian(lambda bb: pi.join(bb, fib), base)   # horizontal lift
        if pi.join_jac_fiber is not None:
            jf = np.asarray(pi.join_jac_fiber(base, fib), dtype=float)
        else:
            jf = jacobian(lambda ff: pi.join(base, ff), fib)   # vertical lift
        out = np.zeros((pi.dim_total, big_r))
        out[:, :r] = jb @ chart.rho(base)
        out[:, r:] = jf
        return out

    return SkewAlgebroidChart(
        base_dim=pi.dim_total,
        rank=big_r,
        c_fn=c_fn,
        rho_fn=rho_fn,
        fd_step=chart.fd_step,
        name=f"prolongation({chart.name})",
        spec={
            "kind": "prolongation",
            "base": chart.spec,
            "fibration": {"dim_total": pi.dim_total, "dim_base": pi.dim_base},
        },
    )


def prolongation_projection_residual(chart, prolonged, pi, p_samples):
    """Residual of (first-factor projection, pi) intertwining the anchors."""
    worst = 0.0
    for p in np.atleast_2d(np.asarray(p_samples, dtype=float)):
        base = pi.proj(p)
        jpi = jacobian(pi.proj, p)
        rho_p = prolonged.rho(p)
        rho_b = chart.rho(base)
        for i in range(chart.rank):
            worst = max(worst, float(np.linalg.norm(jpi @ rho_p[:, i] - rho_b[:, i])))
    return worst


# ---------------------------------------------------------------------------
# contrast metric
# ---------------------------------------------------------------------------


def contrast_metric(
    q,
    f_scalar,
    u,
    frame_field=None,
    *,
    jet_tol=1e-7,
    jet_rng=None,
    n_jet=10,
    outer_step=1e-4,
    inner_step=1e-5,
):
    """Metric g_ij = X_i(X_j(F)) at the embedded unit via left prolongations.

    Requires F and its first derivatives to vanish along sampled unit
    points; returns the symmetrized matrix and the asymmetry residual.
    """
    if frame_field is None:
        frame_field = make_frame_field(q)
    rng = jet_rng if jet_rng is not None else np.random.default_rng(0)
    for up in q.sample_m(rng, n_jet):
        e = np.asarray(q.unit_embed(up), dtype=float)
        if abs(float(f_scalar(e))) > jet_tol:
            raise JetNotVanishing(f"F({up}) = {f_scalar(e):.2e}")
        if float(np.max(np.abs(gradient(f_scalar, e, inner_step)))) > jet_tol:
            raise JetNotVanishing(f"grad F nonzero at u = {up}")

    u = np.asarray(u, dtype=float)
    fr = frame_field(u)
    r = fr.rank
    e0 = np.asarray(q.unit_embed(u), dtype=float)

    def first_derivative(j):
        def phi(g):
            vj = prolong(q, frame_field, np.eye(r)[j], "left", g)
            return directional(lambda p: np.atleast_1d(f_scalar(p)), g, vj, inner_step)[0]

        return phi

    g_mat = np.zeros((r, r))
    for j in range(r):
        phi_j = first_derivative(j)
        for i in range(r):
            vi = fr.alpha_vertical[i]
            h = outer_step
            g_mat[i, j] = (phi_j(e0 + h * vi) - phi_j(e0 - h * vi)) / (2.0 * h)
    asym = float(np.max(np.abs(g_mat - g_mat.T)))
    return 0.5 * (g_mat + g_mat.T), asym
