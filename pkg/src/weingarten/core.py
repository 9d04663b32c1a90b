"""Coefficients, prescribed functions and the type classifier.

The relation solved throughout the package is ``2aH + bK = phi(nu)`` where
``nu`` is the vertical component of the unit normal.  Its type at a point
is given by the sign of the discriminant ``a**2 + b*phi(nu)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import BadInput, DegenerateParams, DomainError

TOL_CLASS = 1e-12


class Kind(str, enum.Enum):
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"
    MIXED = "mixed"


class Branch(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is Branch.PLUS else -1

    @classmethod
    def coerce(cls, value) -> "Branch":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise BadInput(f"branch must be 'plus' or 'minus', got {value!r}") from None


@dataclass(frozen=True)
class WeingartenParams:
    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise BadInput(f"coefficients must be finite, got a={a}, b={b}")
        if a == 0.0 and b == 0.0:
            raise DegenerateParams("a and b cannot both vanish")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class Phi:
    """Prescribed right-hand side as a closed form in ``nu`` on [-1, 1].

    ``form`` is ``"const"``, ``"identity"`` or ``"poly"``; ``coeffs`` holds
    ascending polynomial coefficients for all three (a constant is a degree
    zero polynomial, the identity is ``(0, 1)``).

    Non-polynomial right-hand sides go through :meth:`from_callable`.  They
    are evaluated like any other ``Phi`` but have no string form, so they
    cannot be passed through the CLI.  Set ``lipschitz_only`` when the
    function is merely Lipschitz near ``nu = 1``; existence at the axis only
    needs that much regularity.
    """

    form: str
    coeffs: tuple = ()
    lipschitz_only: bool = False
    func: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.form not in ("const", "identity", "poly", "callable"):
            raise BadInput(f"unknown phi form {self.form!r}")
        if self.form == "callable":
            if self.func is None:
                raise BadInput("callable phi needs func")
            return
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs or not all(math.isfinite(c) for c in coeffs):
            raise BadInput("phi coefficients must be finite and non-empty")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def constant(cls, c: float, lipschitz_only: bool = False) -> "Phi":
        return cls("const", (c,), lipschitz_only)

    @classmethod
    def identity(cls, lipschitz_only: bool = False) -> "Phi":
        return cls("identity", (0.0, 1.0), lipschitz_only)

    @classmethod
    def polynomial(cls, coeffs: Sequence[float], lipschitz_only: bool = False) -> "Phi":
        return cls("poly", tuple(coeffs), lipschitz_only)

    @classmethod
    def from_callable(cls, func: Callable, lipschitz_only: bool = True) -> "Phi":
        return cls("callable", (), lipschitz_only, func)

    @classmethod
    def parse(cls, text: str) -> "Phi":
        """Parse ``const:<c>``, ``identity`` or ``poly:<c0>,<c1>,...``."""
        text = text.strip()
        head, _, rest = text.partition(":")
        head = head.lower()
        try:
            if head == "const" and rest:
                return cls.constant(float(rest))
            if head == "identity" and not rest:
                return cls.identity()
            if head == "poly" and rest:
                return cls.polynomial([float(c) for c in rest.split(",")])
        except ValueError:
            pass
        raise BadInput(f"cannot parse phi {text!r}; expected const:<c>, identity or poly:<c0>,<c1>,...")

    def __str__(self) -> str:
        if self.form == "const":
            return f"const:{self.coeffs[0]!r}"
        if self.form == "identity":
            return "identity"
        if self.form == "poly":
            return "poly:" + ",".join(repr(c) for c in self.coeffs)
        raise BadInput("callable phi has no string form")

    @property
    def is_constant(self) -> bool:
        return self.form == "const"

    def __call__(self, nu):
        """Vectorised evaluation; rejects arguments outside [-1, 1]."""
        arr = np.asarray(nu, dtype=float)
        if np.any(np.isnan(arr)) or np.any(np.abs(arr) > 1.0):
            raise DomainError(f"phi evaluated outside [-1, 1]: {nu!r}")
        if self.form == "const":
            out = np.full(arr.shape, self.coeffs[0])
        elif self.form == "identity":
            out = arr.astype(float, copy=True)
        elif self.form == "poly":
            out = P.polyval(arr, self.coeffs)
        else:
            out = np.asarray(self.func(arr), dtype=float)
            if out.shape != arr.shape:
                out = np.broadcast_to(out, arr.shape).copy()
        return float(out) if out.ndim == 0 else out


def eval_phi(phi: Phi, nu: float) -> float:
    return float(phi(nu))


def discriminant(params: WeingartenParams, phi: Phi, nu: float) -> float:
    """``a**2 + b*phi(nu)``."""
    return params.a * params.a + params.b * eval_phi(phi, nu)


def _band(params: WeingartenParams, phi_val, tol_class: float):
    # scale by the magnitude of both summands; a**2 alone is 0 when a = 0
    return tol_class * np.maximum(params.a * params.a, np.abs(params.b * phi_val))


@dataclass(frozen=True)
class Classification:
    kind: Kind
    discriminant: float


def _kind_of(d: float, band: float) -> Kind:
    if abs(d) <= band:
        return Kind.PARABOLIC
    return Kind.ELLIPTIC if d > 0 else Kind.HYPERBOLIC


def classify_at(params: WeingartenParams, phi: Phi, nu: float,
                tol_class: float = TOL_CLASS) -> Classification:
    if not tol_class > 0:
        raise BadInput("tol_class must be positive")
    value = eval_phi(phi, nu)
    d = params.a * params.a + params.b * value
    return Classification(_kind_of(d, float(_band(params, value, tol_class))), d)


@dataclass(frozen=True)
class GlobalClassification:
    kind: Kind
    d_min: float
    d_max: float
    n_samples: int


def classify_global(params: WeingartenParams, phi: Phi, n_samples: int = 101,
                    tol_class: float = TOL_CLASS) -> GlobalClassification:
    """Type of the equation over all of ``nu`` in [-1, 1], by dense sampling."""
    if int(n_samples) < 2:
        raise BadInput("n_samples must be at least 2")
    nu = np.linspace(-1.0, 1.0, int(n_samples))
    values = phi(nu)
    d = params.a * params.a + params.b * values
    band = _band(params, values, tol_class)
    if np.all(np.abs(d) <= band):
        kind = Kind.PARABOLIC
    elif np.all(d > band):
        kind = Kind.ELLIPTIC
    elif np.all(d < -band):
        kind = Kind.HYPERBOLIC
    else:
        kind = Kind.MIXED
    return GlobalClassification(kind, float(d.min()), float(d.max()), int(n_samples))
