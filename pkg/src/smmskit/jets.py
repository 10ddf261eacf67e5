"""Second-order forward-mode jets.

A ``Jet2`` carries the value and first two derivatives of a scalar function
of one variable; arithmetic propagates them exactly (product, quotient and
chain rules), so no symbolic differentiation or finite differencing is
involved.  ``BiJet2`` is the two-variable analogue used for densities that
depend on the base coordinate and one fiber coordinate: it carries the
gradient pair and the symmetric 2x2 block of second partials.
"""

from __future__ import annotations

import math

from .errors import EvalError

_FINITE_CAP = 1e300


def _check(x: float) -> float:
    if not math.isfinite(x) or abs(x) > _FINITE_CAP:
        raise EvalError(f"non-finite intermediate value: {x!r}")
    return x


class Jet2:
    """Value and first two derivatives with respect to one variable."""

    __slots__ = ("value", "d1", "d2")

    def __init__(self, value: float, d1: float = 0.0, d2: float = 0.0):
        self.value = float(value)
        self.d1 = float(d1)
        self.d2 = float(d2)

    @staticmethod
    def variable(t: float) -> "Jet2":
        """Jet of the identity map at t."""
        return Jet2(t, 1.0, 0.0)

    @staticmethod
    def constant(c: float) -> "Jet2":
        return Jet2(c, 0.0, 0.0)

    @staticmethod
    def _coerce(other) -> "Jet2":
        if isinstance(other, Jet2):
            return other
        if isinstance(other, (int, float)):
            return Jet2(float(other))
        return NotImplemented

    def __repr__(self):
        return f"Jet2({self.value!r}, {self.d1!r}, {self.d2!r})"

    def __add__(self, other):
        o = Jet2._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Jet2(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.d1, -self.d2)

    def __sub__(self, other):
        o = Jet2._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Jet2(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2)

    def __rsub__(self, other):
        o = Jet2._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = Jet2._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Jet2(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Jet2._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.value == 0.0:
            raise EvalError("division by zero")
        q = self.value / o.value
        qd = (self.d1 - q * o.d1) / o.value
        qs = (self.d2 - q * o.d2 - 2.0 * qd * o.d1) / o.value
        return Jet2(_check(q), qd, qs)

    def __rtruediv__(self, other):
        o = Jet2._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def chain(self, u: float, du: float, ddu: float) -> "Jet2":
        """Compose an outer function u with derivatives evaluated at self.value."""
        return Jet2(
            _check(u),
            du * self.d1,
            ddu * self.d1 * self.d1 + du * self.d2,
        )

    def __pow__(self, p):
        if isinstance(p, Jet2):
            if p.d1 == 0.0 and p.d2 == 0.0:
                p = p.value
            else:
                # general exponent: x**y = exp(y*log x), requires x > 0
                return exp(p * log(self))
        x = self.value
        if x == 0.0 and p < 2:
            raise EvalError("power of zero with exponent < 2 has no 2-jet")
        if x < 0.0 and p != round(p):
            raise EvalError("fractional power of a negative base")
        return self.chain(x ** p, p * x ** (p - 1), p * (p - 1) * x ** (p - 2))


class BiJet2:
    """Second-order jet in two variables (t, s).

    Fields: value, first partials (dt, ds) and the symmetric block of
    second partials (dtt, dts, dss).
    """

    __slots__ = ("value", "dt", "ds", "dtt", "dts", "dss")

    def __init__(self, value, dt=0.0, ds=0.0, dtt=0.0, dts=0.0, dss=0.0):
        self.value = float(value)
        self.dt = float(dt)
        self.ds = float(ds)
        self.dtt = float(dtt)
        self.dts = float(dts)
        self.dss = float(dss)

    @staticmethod
    def lift_t(j: Jet2) -> "BiJet2":
        """Embed a jet in t as a two-variable jet with no s dependence."""
        return BiJet2(j.value, j.d1, 0.0, j.d2, 0.0, 0.0)

    @staticmethod
    def lift_s(j: Jet2) -> "BiJet2":
        return BiJet2(j.value, 0.0, j.d1, 0.0, 0.0, j.d2)

    @staticmethod
    def constant(c: float) -> "BiJet2":
        return BiJet2(float(c))

    @staticmethod
    def _coerce(other) -> "BiJet2":
        if isinstance(other, BiJet2):
            return other
        if isinstance(other, (int, float)):
            return BiJet2(float(other))
        return NotImplemented

    def __repr__(self):
        return (f"BiJet2({self.value!r}, dt={self.dt!r}, ds={self.ds!r}, "
                f"dtt={self.dtt!r}, dts={self.dts!r}, dss={self.dss!r})")

    def __add__(self, other):
        o = BiJet2._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return BiJet2(self.value + o.value, self.dt + o.dt, self.ds + o.ds,
                      self.dtt + o.dtt, self.dts + o.dts, self.dss + o.dss)

    __radd__ = __add__

    def __neg__(self):
        return BiJet2(-self.value, -self.dt, -self.ds, -self.dtt, -self.dts, -self.dss)

    def __sub__(self, other):
        o = BiJet2._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = BiJet2._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = BiJet2._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        a, b = self, o
        return BiJet2(
            a.value * b.value,
            a.dt * b.value + a.value * b.dt,
            a.ds * b.value + a.value * b.ds,
            a.dtt * b.value + 2.0 * a.dt * b.dt + a.value * b.dtt,
            a.dts * b.value + a.dt * b.ds + a.ds * b.dt + a.value * b.dts,
            a.dss * b.value + 2.0 * a.ds * b.ds + a.value * b.dss,
        )

    __rmul__ = __mul__

    def chain(self, u: float, du: float, ddu: float) -> "BiJet2":
        return BiJet2(
            _check(u),
            du * self.dt,
            du * self.ds,
            ddu * self.dt * self.dt + du * self.dtt,
            ddu * self.dt * self.ds + du * self.dts,
            ddu * self.ds * self.ds + du * self.dss,
        )

    def __truediv__(self, other):
        o = BiJet2._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.value == 0.0:
            raise EvalError("division by zero")
        inv = o.chain(1.0 / o.value, -1.0 / o.value ** 2, 2.0 / o.value ** 3)
        return self * inv

    def __rtruediv__(self, other):
        o = BiJet2._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self


def _unary(name, fn, dfn, ddfn, guard=None):
    def apply(j):
        if isinstance(j, (int, float)):
            j = Jet2.constant(j)
        x = j.value
        if guard is not None:
            guard(x)
        return j.chain(fn(x), dfn(x), ddfn(x))

    apply.__name__ = name
    return apply


def _need_positive(x):
    if x <= 0.0:
        raise EvalError(f"argument must be positive, got {x!r}")


def _exp_guard(x):
    if x > 700.0:
        raise EvalError("exp overflow")


exp = _unary("exp", math.exp, math.exp, math.exp, _exp_guard)
log = _unary("log", math.log, lambda x: 1.0 / x, lambda x: -1.0 / x ** 2, _need_positive)
sin = _unary("sin", math.sin, math.cos, lambda x: -math.sin(x))
cos = _unary("cos", math.cos, lambda x: -math.sin(x), lambda x: -math.cos(x))
sinh = _unary("sinh", math.sinh, math.cosh, math.sinh, _exp_guard)
cosh = _unary("cosh", math.cosh, math.sinh, math.cosh, _exp_guard)
sqrt = _unary(
    "sqrt",
    math.sqrt,
    lambda x: 0.5 / math.sqrt(x),
    lambda x: -0.25 / x ** 1.5,
    _need_positive,
)

UNARY = {
    "exp": exp,
    "log": log,
    "sin": sin,
    "cos": cos,
    "sinh": sinh,
    "cosh": cosh,
    "sqrt": sqrt,
}
