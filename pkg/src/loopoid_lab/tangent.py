"""Tangent multiplication and the two cotangent fibrations.

The tangent product of (g, v_g) and (h, v_h) with matching base velocity
v_q = T beta(v_g) = T alpha(v_h) is assembled from local sections through
the factors:

    T r_tau(v_g) + T l_sigma(v_h) - T (l_sigma o r_tau)(v_q),

sigma a beta-section through g and tau an alpha-section through h.  Over a
point base this collapses to T r_h(v_g) + T l_g(v_h).  The result does not
depend on the choice of sections, which the checker certifies by building
them twice with different predictors.

There is no tangent product on covectors; the module only exposes the two
fibrations of T*G over the dual of the normal bundle, obtained by pairing a
covector with the left (respectively right) fundamental fields.
"""

from dataclasses import dataclass

import numpy as np

from .algebroid import ALIGNED, make_frame_field, prolong
from .errors import IncompatibleVelocities, NoConvergence, NotComposable, SectionFailure
from .loopoids import build_local_section, composable, multiply
from .numdiff import jacobian, smallest_singular_value


@dataclass(frozen=True)
class TangentElement:
    base: np.ndarray
    vector: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.base, dtype=float)
        v = np.asarray(self.vector, dtype=float)
        if b.shape != v.shape:
            raise ValueError(f"base shape {b.shape} != vector shape {v.shape}")
        object.__setattr__(self, "base", b)
        object.__setattr__(self, "vector", v)

    def to_dict(self):
        return {"base": self.base.tolist(), "vector": self.vector.tolist()}

    @staticmethod
    def from_dict(d):
        return TangentElement(d["base"], d["vector"])


@dataclass(frozen=True)
class CovectorElement:
    base: np.ndarray
    covector: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.base, dtype=float)
        v = np.asarray(self.covector, dtype=float)
        if b.shape != v.shape:
            raise ValueError(f"base shape {b.shape} != covector shape {v.shape}")
        object.__setattr__(self, "base", b)
        object.__setattr__(self, "covector", v)

    def to_dict(self):
        return {"base": self.base.tolist(), "covector": self.covector.tolist()}

    @staticmethod
    def from_dict(d):
        return CovectorElement(d["base"], d["covector"])


def tangent_multiply(q, xg, yh, *, velocity_tol=1e-7, predictor="unit", fd_step=None):
    """Product of tangent elements via the local-section formula.

    The shared base velocity is taken from T beta(v_g); a mismatch with
    T alpha(v_h) beyond ``velocity_tol`` raises, a smaller one is absorbed
    by snapping v_h's base component.
    """
    g, vg = xg.base, xg.vector
    h, vh = yh.base, yh.vector
    if not composable(q, g, h):
        raise NotComposable("tangent factors sit over a non-composable pair")
    step = q.fd_step if fd_step is None else fd_step

    jb_g = jacobian(q.beta, g, step)
    ja_h = jacobian(q.alpha, h, step)
    vq = jb_g @ vg
    mismatch = float(np.linalg.norm(ja_h @ vh - vq))
    if mismatch > velocity_tol:
        raise IncompatibleVelocities(f"base velocities differ by {mismatch:.2e}")
    if mismatch > 0:
        corr, *_ = np.linalg.lstsq(ja_h, ja_h @ vh - vq, rcond=None)
        vh = vh - corr

    if q.dim_m == 0:
        t1 = _push(lambda x: multiply(q, x, h, unchecked=True), g, vg, step)
        t2 = _push(lambda y: multiply(q, g, y, unchecked=True), h, vh, step)
        return TangentElement(multiply(q, g, h, unchecked=True), t1 + t2)

    sigma = build_local_section(q, "beta", g, predictor=predictor)
    tau = build_local_section(q, "alpha", h, predictor=predictor)
    quni = np.asarray(q.beta(g), dtype=float)

    r_tau = lambda x: multiply(q, x, tau(q.beta(x)), unchecked=True)
    l_sigma = lambda y: multiply(q, sigma(q.alpha(y)), y, unchecked=True)
    both = lambda qq: multiply(q, sigma(qq), tau(qq), unchecked=True)

    try:
        t1 = _push(r_tau, g, vg, step)
        t2 = _push(l_sigma, h, vh, step)
        t3 = _push(both, quni, vq, step)
    except NoConvergence as exc:
        raise SectionFailure(f"section projection failed inside the product: {exc}") from exc
    return TangentElement(multiply(q, g, h, unchecked=True), t1 + t2 - t3)


def _push(f, x, v, step):
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    h = step * max(1.0, float(np.max(np.abs(x))))
    return (np.asarray(f(x + h * v), dtype=float) - np.asarray(f(x - h * v), dtype=float)) / (2.0 * h)


def tangent_alpha(q, el, step=None):
    s = q.fd_step if step is None else step
    return TangentElement(q.alpha(el.base), jacobian(q.alpha, el.base, s) @ el.vector)


def tangent_beta(q, el, step=None):
    s = q.fd_step if step is None else step
    return TangentElement(q.beta(el.base), jacobian(q.beta, el.base, s) @ el.vector)


def check_tangent_loopoid(q, n_samples=8, seed=0, tol=1e-6):
    """Sampled audit of the tangent structure.

    Checks T alpha(X * Y) = T alpha(X), T beta(X * Y) = T beta(Y), the unit
    action of T eps vectors, injectivity of v_h -> X * Y_h on tangent
    fibers, agreement between the two section predictors, and the tangent
    inversion when the instance carries one.
    """
    from .loopoids import sample_composable_pairs

    rng = np.random.default_rng(seed)
    pairs = sample_composable_pairs(q, rng, n_samples)
    anchor_resid = 0.0
    unit_resid = 0.0
    section_resid = 0.0
    inv_resid = None if q.inverse is None else 0.0
    min_rank_sv = np.inf

    for g, h in pairs:
        jb_g = jacobian(q.beta, g, q.fd_step)
        ja_h = jacobian(q.alpha, h, q.fd_step)
        vg = rng.normal(size=q.dim_g)
        # match v_h's base velocity to v_g's exactly up to lstsq
        vh = rng.normal(size=q.dim_g)
        corr, *_ = np.linalg.lstsq(ja_h, ja_h @ vh - jb_g @ vg, rcond=None)
        vh = vh - corr
        xg = TangentElement(g, vg)
        yh = TangentElement(h, vh)
        prod = tangent_multiply(q, xg, yh)

        ta_p = tangent_alpha(q, prod)
        ta_x = tangent_alpha(q, xg)
        tb_p = tangent_beta(q, prod)
        tb_y = tangent_beta(q, yh)
        anchor_resid = max(
            anchor_resid,
            float(np.linalg.norm(ta_p.vector - ta_x.vector)),
            float(np.linalg.norm(tb_p.vector - tb_y.vector)),
            float(np.linalg.norm(ta_p.base - ta_x.base)),
            float(np.linalg.norm(tb_p.base - tb_y.base)),
        )

        # unit action: (eps(u), T eps(w)) with matching velocity leaves Y_h fixed
        u = np.asarray(q.alpha(h), dtype=float)
        je = jacobian(q.unit_embed, u, q.fd_step)
        w = ja_h @ vh
        unit_el = TangentElement(np.asarray(q.unit_embed(u), dtype=float), je @ w)
        lhs = tangent_multiply(q, unit_el, yh)
        unit_resid = max(unit_resid, float(np.linalg.norm(lhs.vector - yh.vector)))

        # section-choice independence
        prod2 = tangent_multiply(q, xg, yh, predictor="hold")
        section_resid = max(section_resid, float(np.linalg.norm(prod.vector - prod2.vector)))

        # injectivity of v_h -> product vector on the alpha-fiber directions
        from .numdiff import null_space

        fib = null_space(ja_h)
        if fib.shape[0]:
            cols = []
            for direction in fib:
                plus = tangent_multiply(q, xg, TangentElement(h, vh + 1e-4 * direction))
                minus = tangent_multiply(q, xg, TangentElement(h, vh - 1e-4 * direction))
                cols.append((plus.vector - minus.vector) / 2e-4)
            min_rank_sv = min(min_rank_sv, smallest_singular_value(np.stack(cols, axis=1)))

        if q.inverse is not None and q.inverse_side == "both":
            ji = jacobian(q.inverse, g, q.fd_step)
            inv_el = TangentElement(np.asarray(q.inverse(g), dtype=float), ji @ vg)
            back = tangent_multiply(q, inv_el, prod)
            inv_resid = max(inv_resid, float(np.linalg.norm(back.vector - yh.vector)))

    return {
        "anchor_residual": anchor_resid,
        "unit_residual": unit_resid,
        "section_choice_residual": section_resid,
        "tangent_translation_min_sv": float(min_rank_sv),
        "tangent_inverse_residual": inv_resid,
        "ok": bool(
            anchor_resid < tol
            and unit_resid < tol
            and section_resid < tol
            and min_rank_sv > 1e-7
            and (inv_resid is None or inv_resid < tol)
        ),
    }


def cotangent_fibration(q, side, mu, frame_field=None, orientation=ALIGNED):
    """Components of beta~(mu) or alpha~(mu) in the dual frame.

    beta~ pairs the covector with the left fundamental fields and lives over
    beta(g); alpha~ pairs with the right fields over alpha(g).  The right
    orientation defaults to the anchor-aligned representatives so the minus
    Legendre transform of mechanics is exactly alpha~ composed with dL.
    """
    if frame_field is None:
        frame_field = make_frame_field(q)
    g = mu.base
    cov = mu.covector
    if side == "beta":
        u = np.asarray(q.beta(g), dtype=float)
        r = frame_field(u).rank
        return np.array(
            [cov @ prolong(q, frame_field, np.eye(r)[i], "left", g) for i in range(r)]
        )
    if side == "alpha":
        u = np.asarray(q.alpha(g), dtype=float)
        r = frame_field(u).rank
        return np.array(
            [cov @ prolong(q, frame_field, np.eye(r)[i], "right", g, orientation) for i in range(r)]
        )
    raise ValueError(f"side must be 'alpha' or 'beta', got {side!r}")
