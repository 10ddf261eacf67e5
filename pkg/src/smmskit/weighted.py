"""Weighted curvature tensors of a smooth metric measure space.

An instance is (M, g, f, m, mu) with density v = exp(-f/m) > 0.  The
modified Ricci tensor, weighted scalar curvature, weighted Schouten tensor
and the scale extracted from the trace identity are all evaluated pointwise
from exact jets.  Two independent computation routes exist for the modified
Ricci tensor: the v-form (rho - m Hes_v / v, using the displayed Hessian
decompositions) and the f-form (rho + Hes_f - df (x) df / m, using generic
covariant assembly of f = -m log v).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import FormError, PositivityError, UnsupportedError
from .geometry import (
    PointSpec,
    Tensor2Blocks,
    WarpedMetric,
    field_components,
    hessian_radial,
    hessian_split,
    ricci,
    ricci_blocks_for,
    sectional_blocks,
)
from .jets import BiJet2, UNARY


@dataclass(frozen=True)
class SmmsParams:
    """Dimension n, weight parameter m > 0 and characteristic constant mu.

    For m = 1 the constant mu never enters any formula; it is stored but
    inert, and outputs are bitwise independent of it.
    """

    n: int
    m: float
    mu: float = 0.0

    def __post_init__(self):
        if self.n < 2:
            raise FormError("need dimension n >= 2")
        if not self.m > 0.0:
            raise FormError("weight parameter m must be positive")


# ---------------------------------------------------------------------------
# density specifications and instances

class DensitySpec:
    """Base class for the supported closed density forms."""

    kind = "?"

    def s_active(self, metric: WarpedMetric) -> bool:
        raise NotImplementedError

    def structure(self, metric: WarpedMetric) -> tuple:
        return metric.structure(s_active=self.s_active(metric))

    def v_bijet(self, metric: WarpedMetric, point: PointSpec) -> BiJet2:
        raise NotImplementedError

    def v_value(self, metric: WarpedMetric, point: PointSpec) -> float:
        return self.v_bijet(metric, point).value

    def f_bijet(self, metric: WarpedMetric, point: PointSpec, m: float) -> BiJet2:
        """Coordinate jets of f = -m log v (independent chain-rule route)."""
        v = self.v_bijet(metric, point)
        if v.value <= 0.0:
            raise PositivityError(f"density v = {v.value} is not positive at {point}")
        return -m * UNARY["log"](v)

    def hessian_v(self, metric: WarpedMetric, point: PointSpec) -> Tensor2Blocks:
        """Hessian of v from the displayed closed-form decomposition."""
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


class RadialDensity(DensitySpec):
    """v depends on the base coordinate t alone."""

    kind = "radial"

    def __init__(self, v):
        self.v = v

    def __repr__(self):
        return f"RadialDensity({self.v!r})"

    def s_active(self, metric) -> bool:
        return False

    def v_bijet(self, metric, point) -> BiJet2:
        return BiJet2.lift_t(self.v.jet(point.t))

    def v_value(self, metric, point) -> float:
        return self.v.value(point.t)

    def hessian_v(self, metric, point) -> Tensor2Blocks:
        return hessian_radial(metric, self.v, point,
                              structure=self.structure(metric))

    def to_config(self) -> dict:
        return {"kind": "radial", "v": self.v.to_string()}


class SplitDensity(DensitySpec):
    """v = phi(t) * v_N(s) + alpha(t) along a fiber probe coordinate."""

    kind = "split"

    def __init__(self, v_n, alpha):
        self.v_n = v_n
        self.alpha = alpha

    def __repr__(self):
        return f"SplitDensity(v_n={self.v_n!r}, alpha={self.alpha!r})"

    def s_active(self, metric) -> bool:
        return True

    def v_bijet(self, metric, point) -> BiJet2:
        if point.s is None:
            raise FormError("split density needs a fiber coordinate s")
        phi = BiJet2.lift_t(metric.phi.jet(point.t))
        vn = BiJet2.lift_s(self.v_n.jet(point.s))
        al = BiJet2.lift_t(self.alpha.jet(point.t))
        return phi * vn + al

    def hessian_v(self, metric, point) -> Tensor2Blocks:
        return hessian_split(metric, self.v_n, self.alpha, point)

    def to_config(self) -> dict:
        return {"kind": "split", "v_n": self.v_n.to_string(),
                "alpha": self.alpha.to_string()}


@dataclass
class Instance:
    """A concrete smooth metric measure space: metric, density, parameters.

    complete marks the instance as metrically complete (required for any
    global classification); compact additionally marks it closed.
    """

    metric: WarpedMetric
    density: DensitySpec
    params: SmmsParams
    complete: bool = False
    compact: bool = False


class FiberLinearExponent(SplitDensity):
    """Density from f = c0 t + c1 s with s the fiber's conformal coordinate.

    Only c0 = 0 is realizable in split form (the t-factor would have to be
    the warping itself); the resolved fiber profile must be supplied by the
    constructor that knows the fiber realization.
    """

    kind = "fiber_linear_exponent"

    def __init__(self, c0: float, c1: float, v_n, alpha):
        if c0 != 0.0:
            raise FormError("fiber-linear exponent supports no base-coordinate term")
        super().__init__(v_n, alpha)
        self.c0 = float(c0)
        self.c1 = float(c1)

    def to_config(self) -> dict:
        cfg = super().to_config()
        cfg.update({"kind": "fiber_linear_exponent", "c0": self.c0, "c1": self.c1})
        return cfg


# ---------------------------------------------------------------------------
# pointwise weighted tensors

def _grad_tensor(structure: tuple, bij: BiJet2, phi_value: float) -> Tensor2Blocks:
    """Components of dF (x) dF against g-unit vectors."""
    if len(structure) == 1:
        return Tensor2Blocks(structure, bij.dt ** 2, (0.0,), 0.0)
    gs = bij.ds / phi_value
    blocks = (gs ** 2,) + tuple(0.0 for _ in structure[1:])
    return Tensor2Blocks(structure, bij.dt ** 2, blocks, bij.dt * gs)


def bakry_emery(metric: WarpedMetric, density: DensitySpec, params: SmmsParams,
                point: PointSpec, form: str = "v") -> Tensor2Blocks:
    """Modified Ricci tensor rho_f^m at a point.

    form="v" uses rho - m Hes_v / v; form="f" uses
    rho + Hes_f - df (x) df / m.  The two agree to rounding.
    """
    structure = density.structure(metric)
    rho = ricci_blocks_for(metric, point, structure)
    m = params.m
    if form == "v":
        v = density.v_value(metric, point)
        if v <= 0.0:
            raise PositivityError(f"density v = {v} is not positive at {point}")
        hv = density.hessian_v(metric, point)
        return rho.combine(hv, 1.0, -m / v)
    if form == "f":
        fb = density.f_bijet(metric, point, m)
        fc = field_components(metric, fb, point, structure)
        grad2 = _grad_tensor(structure, fb, metric.phi.value(point.t))
        return rho.combine(fc.hess, 1.0, 1.0).combine(grad2, 1.0, -1.0 / m)
    raise ValueError(f"unknown form {form!r}")


def weighted_scalar(metric: WarpedMetric, density: DensitySpec,
                    params: SmmsParams, point: PointSpec) -> float:
    """Weighted scalar curvature tau_f^m."""
    structure = density.structure(metric)
    tau = ricci_blocks_for(metric, point, structure).trace()
    fb = density.f_bijet(metric, point, params.m)
    fc = field_components(metric, fb, point, structure)
    m = params.m
    out = tau + 2.0 * fc.laplacian - ((m + 1.0) / m) * fc.grad_sq
    if m != 1.0:
        v = density.v_value(metric, point)
        out += m * (m - 1.0) * params.mu / (v * v)
    return out


def weighted_schouten(metric: WarpedMetric, density: DensitySpec,
                      params: SmmsParams, point: PointSpec) -> tuple:
    """(J_f^m, P_f^m): weighted Schouten scalar and tensor."""
    n, m = params.n, params.m
    be = bakry_emery(metric, density, params, point, form="v")
    tau_f = weighted_scalar(metric, density, params, point)
    j = tau_f / (2.0 * (n + m - 1.0))
    p = be.scale_shift(1.0 / (n + m - 2.0), -j / (n + m - 2.0))
    return j, p


def extract_scale(metric: WarpedMetric, density: DensitySpec, params: SmmsParams,
                  lam: float, point: PointSpec) -> float:
    """Scale kappa at a point from the trace identity.

    For a weighted Einstein instance J = (m+n) lam - m kappa e^{f/m}, so
    kappa = ((m+n) lam - J) v / m; constancy across points certifies the
    instance.
    """
    j, _ = weighted_schouten(metric, density, params, point)
    v = density.v_value(metric, point)
    return ((params.m + params.n) * lam - j) * v / params.m


def weyl_norm(metric: WarpedMetric, density: DensitySpec, params: SmmsParams,
              point: PointSpec) -> float:
    """Norm of the weighted Weyl tensor R - P_f^m (x w) g at a point.

    Convention: (g (x w) g)(X, Y, Y, X) = 2 (|X|^2 |Y|^2 - <X,Y>^2), so a
    space form of sectional curvature 2 lam has R = lam g (x w) g.
    Requires the fiber curvature to be fully determined.
    """
    structure = density.structure(metric)
    _, p = weighted_schouten(metric, density, params, point)
    if abs(p.mixed) > 1e-9:
        raise UnsupportedError("Weyl norm needs a block-diagonal Schouten tensor")
    sec = sectional_blocks(metric, point, s_active=len(structure) > 1)
    if sec.weyl_norm is None:
        raise UnsupportedError("fiber curvature remainder unknown")
    p_by_block = (p.tt,) + p.blocks
    total = 0.0
    for (i, j), k in sec.pairs():
        di = sec.blocks[i][1]
        dj = sec.blocks[j][1]
        if i == j:
            npairs = di * (di - 1) // 2
            if npairs == 0:
                continue
            if k is None:
                raise UnsupportedError("sectional curvature not determined by fiber data")
            total += npairs * (k - 2.0 * p_by_block[i]) ** 2
        else:
            if k is None:
                raise UnsupportedError("sectional curvature not determined by fiber data")
            total += di * dj * (k - p_by_block[i] - p_by_block[j]) ** 2
    return math.sqrt(4.0 * total + sec.weyl_norm ** 2)


def solve_mu(metric: WarpedMetric, density: DensitySpec, params: SmmsParams,
             lam: float, points: list) -> tuple:
    """Solve the trace identity for mu assuming P_f^m = lam g.

    Returns (mean, spread) of the pointwise solution over the grid; a small
    spread certifies that a single mu makes the instance weighted Einstein.
    """
    n, m = params.n, params.m
    if m == 1.0:
        raise UnsupportedError("mu does not enter the m = 1 equations")
    base = SmmsParams(n, m, 0.0)
    vals = []
    for p in points:
        be = bakry_emery(metric, density, base, p, form="v")
        tau0 = weighted_scalar(metric, density, base, p)
        j_target = be.tt - (n + m - 2.0) * lam
        v = density.v_value(metric, p)
        vals.append((2.0 * (n + m - 1.0) * j_target - tau0) * v * v / (m * (m - 1.0)))
    mean = sum(vals) / len(vals)
    spread = max(vals) - min(vals)
    return mean, spread


# ---------------------------------------------------------------------------
# grid reports

@dataclass
class WeightedReport:
    """Per-point weighted tensor records plus sup-norm aggregates.

    Reports merge associatively: aggregates are recomputed from the
    concatenated per-point records.
    """

    params: SmmsParams
    lam: float
    points: list = field(default_factory=list)
    be_tt: list = field(default_factory=list)
    be_blocks: list = field(default_factory=list)
    be_mixed: list = field(default_factory=list)
    rho_dev: list = field(default_factory=list)      # sup dev of rho from 2(n-1) lam g
    qe_dev: list = field(default_factory=list)       # sup dev of rho_f^m from 2(n+m-1) lam g
    p_dev: list = field(default_factory=list)        # sup dev of P_f^m from lam g
    tau_f: list = field(default_factory=list)
    j_f: list = field(default_factory=list)
    kappa: list = field(default_factory=list)
    v: list = field(default_factory=list)
    weyl: list = field(default_factory=list)
    sec_dev: list = field(default_factory=list)
    fiber_flat_dev: list = field(default_factory=list)
    fiber_be_dev: list = field(default_factory=list)

    @property
    def residual_P(self) -> float:
        return max(self.p_dev)

    @property
    def residual_QE(self) -> float:
        return max(self.qe_dev)

    @property
    def residual_Einstein(self) -> float:
        return max(self.rho_dev)

    @property
    def kappa_mean(self) -> float:
        return sum(self.kappa) / len(self.kappa)

    @property
    def kappa_spread(self) -> float:
        return max(self.kappa) - min(self.kappa)

    @property
    def v_spread(self) -> float:
        return max(self.v) - min(self.v)

    @property
    def sec_residual(self) -> float | None:
        vals = [x for x in self.sec_dev if x is not None]
        return max(vals) if vals else None

    @property
    def fiber_flat_residual(self) -> float | None:
        vals = [x for x in self.fiber_flat_dev if x is not None]
        return max(vals) if vals else None

    @property
    def fiber_be_residual(self) -> float | None:
        vals = [x for x in self.fiber_be_dev if x is not None]
        return max(vals) if vals else None

    def merge(self, other: "WeightedReport") -> "WeightedReport":
        if other.params != self.params or other.lam != self.lam:
            raise FormError("cannot merge reports of different instances")
        out = WeightedReport(self.params, self.lam)
        for name in ("points", "be_tt", "be_blocks", "be_mixed", "rho_dev",
                     "qe_dev", "p_dev", "tau_f", "j_f", "kappa", "v", "weyl",
                     "sec_dev", "fiber_flat_dev", "fiber_be_dev"):
            setattr(out, name, getattr(self, name) + getattr(other, name))
        return out

    def summary(self) -> dict:
        out = {
            "lambda": self.lam,
            "points": len(self.points),
            "residual_P": self.residual_P,
            "residual_QE": self.residual_QE,
            "residual_Einstein": self.residual_Einstein,
            "kappa_mean": self.kappa_mean,
            "kappa_spread": self.kappa_spread,
            "v_spread": self.v_spread,
        }
        for key, val in (("sectional_residual", self.sec_residual),
                         ("fiber_ricci_flat_residual", self.fiber_flat_residual),
                         ("fiber_quasi_einstein_residual", self.fiber_be_residual)):
            if val is not None:
                out[key] = val
        if self.weyl and self.weyl[0] is not None:
            out["weyl_norm_max"] = max(self.weyl)
        return out


def _fiber_diagnostics(metric: WarpedMetric, density: DensitySpec,
                       params: SmmsParams, point: PointSpec, structure: tuple):
    """(fiber Ricci-flatness deviation, fiber modified-Ricci deviation).

    The second is only defined when the density restricts to the fiber as
    v_N (split form with vanishing alpha, or radial v proportional to phi);
    None otherwise.
    """
    split = len(structure) > 1
    try:
        coeffs = metric.fiber.ricci_coeffs(point.s if split else None, split)
    except Exception:
        return None, None
    flat_dev = max(abs(c) for c in coeffs)
    m = params.m
    if isinstance(density, SplitDensity):
        al = density.alpha
        if not (al.is_constant() and al.value(point.t) == 0.0):
            return flat_dev, None
        s = point.s
        vn = density.v_n.jet(s)
        if vn.value <= 0.0:
            return flat_dev, None
        h_orth = metric.fiber.orth_hess_factor(s) * vn.d1
        dev = max(abs(coeffs[0] - m * vn.d2 / vn.value),
                  abs(coeffs[1] - m * h_orth / vn.value))
        return flat_dev, dev
    if isinstance(density, RadialDensity):
        # v proportional to phi means v_N is constant: fiber term is rho_N
        vj = density.v.jet(point.t)
        pj = metric.phi.jet(point.t)
        ratio = vj.value / pj.value
        d_ratio = (vj.d1 - ratio * pj.d1) / pj.value
        scale = abs(vj.value) + abs(vj.d1)
        if abs(d_ratio) <= 1e-10 * max(1.0, scale):
            return flat_dev, flat_dev
        return flat_dev, None
    return flat_dev, None


def einstein_residuals(metric: WarpedMetric, density: DensitySpec,
                       params: SmmsParams, lam: float, points: list,
                       with_weyl: bool = False,
                       with_diagnostics: bool = True) -> WeightedReport:
    """Evaluate the weighted Einstein residuals over a grid of points.

    residual_P is the sup of |P_f^m - lam g|, residual_QE the sup of
    |rho_f^m - 2(n+m-1) lam g| and residual_Einstein the sup of
    |rho - 2(n-1) lam g|, all componentwise against g-unit vectors.
    """
    n, m = params.n, params.m
    rep = WeightedReport(params, lam)
    for p in points:
        structure = density.structure(metric)
        rho = ricci_blocks_for(metric, p, structure)
        be = bakry_emery(metric, density, params, p, form="v")
        tau_f = weighted_scalar(metric, density, params, p)
        j = tau_f / (2.0 * (n + m - 1.0))
        pt = be.scale_shift(1.0 / (n + m - 2.0), -j / (n + m - 2.0))
        v = density.v_value(metric, p)
        kappa = ((m + n) * lam - j) * v / m
        rep.points.append(p)
        rep.be_tt.append(be.tt)
        rep.be_blocks.append(be.blocks)
        rep.be_mixed.append(be.mixed)
        rep.rho_dev.append(rho.sup_dev(2.0 * (n - 1.0) * lam))
        rep.qe_dev.append(be.sup_dev(2.0 * (n + m - 1.0) * lam))
        rep.p_dev.append(pt.sup_dev(lam))
        rep.tau_f.append(tau_f)
        rep.j_f.append(j)
        rep.kappa.append(kappa)
        rep.v.append(v)
        if with_weyl:
            rep.weyl.append(weyl_norm(metric, density, params, p))
        else:
            rep.weyl.append(None)
        if with_diagnostics:
            try:
                rep.sec_dev.append(sectional_residual_at(metric, p, 2.0 * lam,
                                                         len(structure) > 1))
            except UnsupportedError:
                rep.sec_dev.append(None)
            flat_dev, be_dev = _fiber_diagnostics(metric, density, params, p,
                                                  structure)
            rep.fiber_flat_dev.append(flat_dev)
            rep.fiber_be_dev.append(be_dev)
        else:
            rep.sec_dev.append(None)
            rep.fiber_flat_dev.append(None)
            rep.fiber_be_dev.append(None)
    return rep


def sectional_residual_at(metric: WarpedMetric, point: PointSpec,
                          two_lam: float, s_active: bool) -> float:
    from .geometry import sectional_residual
    return sectional_residual(metric, point, two_lam, s_active=s_active)


def sample_points(metric: WarpedMetric, density: DensitySpec, k: int,
                  margin: float = 0.05, cap: float | None = None) -> list:
    """Verification grid matching the block structure the density needs."""
    s_active = len(density.structure(metric)) > 1
    kwargs = {} if cap is None else {"cap": cap}
    return metric.grid(k, margin=margin, s_active=s_active, **kwargs)


def tau_consistency_residual(report: WeightedReport) -> float:
    """sup deviation of the weighted scalar curvature from its trace form.

    For a weighted Einstein instance the trace identity forces
    tau_f^m = 2 (n+m-1) ((m+n) lam - m kappa / v) with a single constant
    kappa; a wrong characteristic constant mu shows up here directly.
    """
    n, m = report.params.n, report.params.m
    kbar = report.kappa_mean
    out = 0.0
    for tau, v in zip(report.tau_f, report.v):
        pred = 2.0 * (n + m - 1.0) * ((m + n) * report.lam - m * kbar / v)
        out = max(out, abs(tau - pred))
    return out
