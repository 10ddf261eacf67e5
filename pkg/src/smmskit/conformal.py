"""Conformal change of a radially weighted instance by a radial factor.

For a positive radial factor u the metric u^{-2} g of a warped product is
again a warped product: the base coordinate is rescaled through
Q(t) = integral of 1/u and the warping becomes phi/u at the mapped point.
The density transforms as v -> v/u (equivalently f -> f + m log u) and the
characteristic constant is unchanged.

Residual identities on the transformed instance are autonomous pointwise
checks, so quadrature error in the coordinate map only moves the sample
points and never degrades the residuals themselves.  Law checks compare the
directly computed transformed tensors against independent closed formulas
assembled entirely in the original frame.
"""

from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass

from scipy.integrate import IntegrationWarning, quad

from .errors import DomainError, EvalError, UnsupportedError
from .geometry import PointSpec, WarpedMetric, field_components, hessian_radial, \
    ricci_blocks_for
from .jets import BiJet2, Jet2
from .profiles import Interval, sample_grid
from .weighted import (
    DensitySpec,
    Instance,
    RadialDensity,
    SplitDensity,
    bakry_emery,
    weighted_scalar,
    weighted_schouten,
)

_QUAD_KW = dict(epsabs=1e-13, epsrel=1e-13, limit=200)


def _quad(fn, a, b):
    # reparameterized integrands carry rounding noise near the endpoints
    # that trips the convergence heuristics; the error estimate still governs
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        return quad(fn, a, b, **_QUAD_KW)


class ConformalMap:
    """Monotone coordinate change Q with Q'(t) = 1/u(t), Q(t_ref) = 0.

    Forward values accumulate as anchors; the inverse runs safeguarded
    Newton iterations T -> T - (Q(T) - q) u(T) inside an anchor bracket, so
    image points produced by forward() invert exactly through the cache.
    """

    def __init__(self, u, interval: Interval, t_ref: float | None = None,
                 image: Interval | None = None):
        self.u = u
        self.interval = interval
        u.check_positive(samples=2048)
        if t_ref is None:
            window = sample_grid(interval, 3, margin=0.01)
            t_ref = float(window[1])
        self.t_ref = float(t_ref)
        self._anchors = [(self.t_ref, 0.0)]  # sorted by t; Q increasing in t
        self._image = image

    def _integrand(self, x: float) -> float:
        try:
            return 1.0 / self.u.value(x)
        except EvalError:
            # overflow guard of the factor fired far out; 1/u is negligible
            return 0.0

    def forward(self, t: float) -> float:
        t = float(t)
        self.interval.require(t)
        i = bisect.bisect_left(self._anchors, (t, -math.inf))
        if i < len(self._anchors) and self._anchors[i][0] == t:
            return self._anchors[i][1]
        near = min((a for a in (self._anchors[max(i - 1, 0)],
                                self._anchors[min(i, len(self._anchors) - 1)])),
                   key=lambda a: abs(a[0] - t))
        seg, _ = _quad(self._integrand, near[0], t)
        q = near[1] + seg
        bisect.insort(self._anchors, (t, q))
        return q

    def derivative(self, t: float) -> float:
        return self._integrand(t)

    def inverse(self, q: float) -> float:
        q = float(q)
        tol = 5e-16 * max(1.0, abs(q))
        i = min(range(len(self._anchors)), key=lambda j: abs(self._anchors[j][1] - q))
        if abs(self._anchors[i][1] - q) <= tol:
            return self._anchors[i][0]
        lo, hi = self._bracket(q)
        t = 0.5 * (lo + hi)
        for _ in range(80):
            resid = self.forward(t) - q
            if abs(resid) <= 1e-15 * max(1.0, abs(q)) + 1e-15:
                return t
            if resid > 0.0:
                hi = t
            else:
                lo = t
            step = resid * self.u.value(t)
            t_new = t - step
            if not (lo < t_new < hi):
                t_new = 0.5 * (lo + hi)
            t = t_new
        return t

    def _bracket(self, q: float) -> tuple:
        anchors = self._anchors
        if anchors[0][1] <= q <= anchors[-1][1]:
            i = bisect.bisect_left([a[1] for a in anchors], q)
            lo = anchors[max(i - 1, 0)][0]
            hi = anchors[min(i, len(anchors) - 1)][0]
            if lo == hi:
                lo, hi = lo - 1e-12, hi + 1e-12
            return lo, hi
        # expand outward with growing steps, clipped to the interval
        if q > anchors[-1][1]:
            t, val = anchors[-1]
            step = max(1e-3, abs(t) * 1e-3)
            while val < q:
                t_next = t + step
                if t_next >= self.interval.hi:
                    t_next = self.interval.hi - 1e-12 * max(1.0, abs(self.interval.hi)) \
                        if math.isfinite(self.interval.hi) else t + step
                val_next = self.forward(t_next)
                if val_next >= q:
                    return t, t_next
                if math.isfinite(self.interval.hi) and t_next >= self.interval.hi - 1e-9:
                    raise DomainError(f"image coordinate {q} beyond the mapped interval")
                t, val = t_next, val_next
                step *= 2.0
        t, val = anchors[0]
        step = max(1e-3, abs(t) * 1e-3)
        while val > q:
            t_next = t - step
            if t_next <= self.interval.lo:
                t_next = self.interval.lo + 1e-12 * max(1.0, abs(self.interval.lo)) \
                    if math.isfinite(self.interval.lo) else t - step
            val_next = self.forward(t_next)
            if val_next <= q:
                return t_next, t
            if math.isfinite(self.interval.lo) and t_next <= self.interval.lo + 1e-9:
                raise DomainError(f"image coordinate {q} beyond the mapped interval")
            t, val = t_next, val_next
            step *= 2.0
        raise DomainError(f"could not bracket image coordinate {q}")

    def image_interval(self) -> Interval:
        if self._image is None:
            lo = self._image_endpoint(self.interval.lo, -1)
            hi = self._image_endpoint(self.interval.hi, +1)
            self._image = Interval(
                lo, hi, closed_lo=self.interval.closed_lo and math.isfinite(lo),
                closed_hi=self.interval.closed_hi and math.isfinite(hi))
        return self._image

    def _image_endpoint(self, e: float, sign: int) -> float:
        try:
            val, err = _quad(self._integrand, self.t_ref, e)
        except Exception:
            return sign * math.inf
        if not math.isfinite(val) or err > 1e-6 * (1.0 + abs(val)):
            return sign * math.inf
        return val

    def pullback_jet(self, base, q: float) -> Jet2:
        """Jets of (base o T)(q) where T is the inverse coordinate change."""
        t = self.inverse(q)
        bj = base.jet(t)
        uv = self.u.jet(t)
        dT = uv.value
        ddT = uv.d1 * uv.value
        return Jet2(bj.value, bj.d1 * dT, bj.d2 * dT * dT + bj.d1 * ddT)


class ReparamProfile:
    """Profile (num o T) / (den o T) on the image of a conformal map.

    Either part may be omitted (treated as the constant 1).
    """

    def __init__(self, cmap: ConformalMap, num=None, den=None, name: str = ""):
        if num is None and den is None:
            raise EvalError("reparameterized profile needs at least one part")
        self.cmap = cmap
        self.num = num
        self.den = den
        self.domain = cmap.image_interval()
        self.var = "t"
        self.name = name or "reparam"

    def jet(self, q: float) -> Jet2:
        self.domain.require(q)
        if self.num is not None and self.den is not None:
            return self.cmap.pullback_jet(self.num, q) / self.cmap.pullback_jet(self.den, q)
        if self.num is not None:
            return self.cmap.pullback_jet(self.num, q)
        return Jet2.constant(1.0) / self.cmap.pullback_jet(self.den, q)

    def value(self, q: float) -> float:
        return self.jet(q).value

    def is_constant(self) -> bool:
        return False

    def check_positive(self, samples: int = 200, margin: float = 0.0):
        from .errors import PositivityError
        for q in sample_grid(self.domain, samples, margin=1e-4):
            if self.value(float(q)) <= margin:
                raise PositivityError(f"profile {self.name} is not positive")

    def to_string(self) -> str:
        parts = []
        if self.num is not None:
            parts.append(getattr(self.num, "to_string", lambda: "?")())
        if self.den is not None:
            parts.append("/ " + getattr(self.den, "to_string", lambda: "?")())
        return f"reparam({' '.join(parts)})"


@dataclass
class TransformResult:
    instance: Instance
    cmap: ConformalMap
    u: object


def apply_conformal(instance: Instance, u, t_ref: float | None = None,
                    image: Interval | None = None) -> TransformResult:
    """Transformed instance for the metric u^{-2} g and density v/u.

    u must be a positive radial profile on the base interval.  The fiber is
    untouched; only the base coordinate, warping and density change.  When
    the image interval is known exactly (for example when undoing an earlier
    change), pass it to bypass the quadrature heuristics at the endpoints.
    """
    metric = instance.metric
    cmap = ConformalMap(u, metric.interval, t_ref=t_ref, image=image)
    image = cmap.image_interval()
    phi_hat = ReparamProfile(cmap, num=metric.phi, den=u, name="phi_hat")
    metric_hat = WarpedMetric(image, phi_hat, metric.fiber)
    dens = instance.density
    if isinstance(dens, SplitDensity):
        alpha_hat = ReparamProfile(cmap, num=dens.alpha, den=u, name="alpha_hat")
        dens_hat: DensitySpec = SplitDensity(dens.v_n, alpha_hat)
    elif isinstance(dens, RadialDensity):
        dens_hat = RadialDensity(ReparamProfile(cmap, num=dens.v, den=u, name="v_hat"))
    else:
        raise UnsupportedError(f"no conformal rule for density {dens!r}")
    inst = Instance(metric_hat, dens_hat, instance.params,
                    complete=instance.complete, compact=instance.compact)
    return TransformResult(inst, cmap, u)


def inverse_factor(result: TransformResult) -> ReparamProfile:
    """The factor that undoes the change: 1/u carried to the image frame."""
    return ReparamProfile(result.cmap, num=None, den=result.u, name="u_inverse")


# ---------------------------------------------------------------------------
# transformation-law checks in the original frame

def _symmetric_product(structure, a_t, a_s, b_t, b_s, phi):
    """Components of da (x) db + db (x) da against g-unit vectors."""
    from .geometry import Tensor2Blocks
    if len(structure) == 1:
        return Tensor2Blocks(structure, 2.0 * a_t * b_t, (0.0,), 0.0)
    gs_a = a_s / phi
    gs_b = b_s / phi
    blocks = (2.0 * gs_a * gs_b,) + tuple(0.0 for _ in structure[1:])
    return Tensor2Blocks(structure, 2.0 * a_t * b_t, blocks,
                         a_t * gs_b + gs_a * b_t)


def conformal_law_residuals(instance: Instance, u, result: TransformResult,
                            ts) -> dict:
    """Sup residuals of the conformal transformation laws over base points.

    For each t the transformed tensors are computed directly on the image
    instance at Q(t) and compared, after the u^{-2} frame conversion, with
    closed formulas assembled in the original frame:

      ricci:     Ric^ = Ric + (n-2) Hes(u)/u + (L(u)/u - (n-1)|du|^2/u^2) g
      modified:  Ric^_f = Ric^ - m Hes^(v^)/v^ with
                 Hes^(h) = Hes(h) + (du (x) dh + dh (x) du)/u - <du, dh> g / u
      schouten:  P^ from the two above plus the scalar trace conversions
    """
    metric, dens, params = instance.metric, instance.density, instance.params
    n, m = params.n, params.m
    out = {"ricci": 0.0, "modified_ricci": 0.0, "schouten": 0.0, "scalar": 0.0}
    s_active = dens.s_active(metric)
    structure = dens.structure(metric)
    hat = result.instance
    for t in ts:
        t = float(t)
        s = None
        if s_active:
            dom = metric.fiber.probe_domain()
            s = float(sample_grid(dom, 5, margin=0.2)[2])
        pt = PointSpec(t, s)
        q = result.cmap.forward(t)
        pt_hat = PointSpec(q, s)
        uj = u.jet(t)
        uv, du, ddu = uj.value, uj.d1, uj.d2

        # original-frame ingredients
        rho = ricci_blocks_for(metric, pt, structure)
        hes_u = hessian_radial(metric, u, pt, structure=structure)
        lap_u = hes_u.trace()
        phi_val = metric.phi.value(t)

        # law: ordinary Ricci
        law_rho = rho.combine(hes_u, 1.0, (n - 2.0) / uv) \
                     .scale_shift(1.0, lap_u / uv - (n - 1.0) * (du / uv) ** 2)

        # transformed-frame direct values, converted to the original frame
        rho_hat = ricci_blocks_for(hat.metric, pt_hat, structure)
        dev = rho_hat.scale_shift(1.0 / uv ** 2).combine(law_rho, 1.0, -1.0)
        out["ricci"] = max(out["ricci"], dev.sup_dev(0.0))

        # law: modified Ricci via the transformed Hessian of v^ = v/u
        vb = dens.v_bijet(metric, pt)
        ub = BiJet2.lift_t(uj)
        vhat_b = vb / ub
        vhat = vhat_b.value
        fc = field_components(metric, vhat_b, pt, structure)
        sym = _symmetric_product(structure, du, 0.0, vhat_b.dt, vhat_b.ds, phi_val)
        inner = du * vhat_b.dt
        hes_hat_v = fc.hess.combine(sym, 1.0, 1.0 / uv) \
                           .scale_shift(1.0, -inner / uv)
        law_be = law_rho.combine(hes_hat_v, 1.0, -m / vhat)
        be_hat = bakry_emery(hat.metric, hat.density, params, pt_hat, form="v")
        dev = be_hat.scale_shift(1.0 / uv ** 2).combine(law_be, 1.0, -1.0)
        out["modified_ricci"] = max(out["modified_ricci"], dev.sup_dev(0.0))

        # law: weighted scalar and Schouten
        fb = dens.f_bijet(metric, pt, m)
        fhat_t = fb.dt + m * du / uv
        fhat_s = fb.ds
        fch = field_components(metric, BiJet2(0.0, fhat_t, fhat_s,
                                              fb.dtt + m * (ddu * uv - du * du) / uv ** 2,
                                              fb.dts, fb.dss), pt, structure)
        tau_hat = uv ** 2 * law_rho.trace()
        grad_fhat = uv ** 2 * (fhat_t ** 2 + ((fhat_s / phi_val) ** 2 if s_active else 0.0))
        lap_hat_f = uv ** 2 * (fch.laplacian - (n - 2.0) / uv
                               * (du * fhat_t))
        tau_f_hat = tau_hat + 2.0 * lap_hat_f - ((m + 1.0) / m) * grad_fhat
        if m != 1.0:
            tau_f_hat += m * (m - 1.0) * params.mu * (uv / vb.value) ** 2
        from .weighted import weighted_scalar
        tau_direct = weighted_scalar(hat.metric, hat.density, params, pt_hat)
        out["scalar"] = max(out["scalar"], abs(tau_direct - tau_f_hat))

        j_hat = tau_f_hat / (2.0 * (n + m - 1.0))
        law_p = law_be.scale_shift(1.0 / (n + m - 2.0),
                                   -j_hat / (uv ** 2 * (n + m - 2.0)))
        _, p_hat = weighted_schouten(hat.metric, hat.density, params, pt_hat)
        dev = p_hat.scale_shift(1.0 / uv ** 2).combine(law_p, 1.0, -1.0)
        out["schouten"] = max(out["schouten"], dev.sup_dev(0.0))
    return out


def involution_residual(instance: Instance, u, ts) -> float:
    """Round-trip deviation after transforming by u and then by its inverse.

    The composite coordinate map is a pure translation of the base
    coordinate (each map anchors its own reference point), so coordinates
    are compared after removing the constant shift, and warping and density
    values are compared at corresponding points.
    """
    first = apply_conformal(instance, u)
    base = instance.metric.interval
    ref = first.cmap.t_ref
    # undoing the change recovers the base interval up to the translation
    # that re-anchors the reference point, so the image is known exactly
    back = Interval(base.lo - ref, base.hi - ref,
                    closed_lo=base.closed_lo, closed_hi=base.closed_hi)
    second = apply_conformal(first.instance, inverse_factor(first),
                             t_ref=0.0, image=back)
    ts = [float(t) for t in ts]
    qs2 = [second.cmap.forward(first.cmap.forward(t)) for t in ts]
    shift = qs2[0] - ts[0]
    out = 0.0
    for t, q2 in zip(ts, qs2):
        out = max(out, abs(q2 - t - shift))
        out = max(out, abs(second.instance.metric.phi.value(q2)
                           - instance.metric.phi.value(t)))
        vd0 = instance.density
        vd2 = second.instance.density
        if isinstance(vd0, RadialDensity):
            out = max(out, abs(vd2.v.value(q2) - vd0.v.value(t)))
        else:
            out = max(out, abs(vd2.alpha.value(q2) - vd0.alpha.value(t)))
    return out
