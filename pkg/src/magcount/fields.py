"""Magnetic field and Robin boundary data.

A field is either a constant, a sampled radial profile with an interpolation
rule, or an analytic function of (x, y) evaluated on demand.  The
``nonnegative`` / ``radially_nonincreasing`` flags are asserted metadata:
constructors verify them against the data they are given.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import fourier

SIGN_TOL = 1e-12


@dataclass(frozen=True)
class FieldSpec:
    kind: str  # 'constant' | 'radial' | 'analytic'
    beta: float = 0.0
    radii: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    rule: str = "linear"
    fn: Optional[Callable] = None
    nonnegative: bool = False
    radially_nonincreasing: bool = False
    label: str = ""

    @staticmethod
    def constant(beta, label=""):
        b = float(beta)
        return FieldSpec(
            kind="constant",
            beta=b,
            nonnegative=b >= 0.0,
            radially_nonincreasing=True,
            label=label or f"constant({b})",
        )

    @staticmethod
    def radial_profile(radii, values, rule="linear", nonnegative=None,
                       radially_nonincreasing=None, label=""):
        r = np.asarray(radii, dtype=np.float64)
        v = np.asarray(values, dtype=np.float64)
        if r.ndim != 1 or r.shape != v.shape or r.size < 2:
            raise ValueError("radial profile needs matching 1D (r, B) samples")
        if r[0] != 0.0:
            raise ValueError("radial profile must start at r = 0")
        if np.any(np.diff(r) <= 0):
            raise ValueError("radial profile radii must be strictly increasing")
        if rule not in ("linear", "pchip"):
            raise ValueError(f"unknown interpolation rule {rule!r}")
        scale = max(np.abs(v).max(), 1e-30)
        nn = bool(np.all(v >= -SIGN_TOL * scale)) if nonnegative is None else nonnegative
        ni = bool(np.all(np.diff(v) <= SIGN_TOL * scale)) if radially_nonincreasing is None \
            else radially_nonincreasing
        spec = FieldSpec(kind="radial", radii=r, values=v, rule=rule,
                         nonnegative=nn, radially_nonincreasing=ni,
                         label=label or "radial-profile")
        spec._check_flags()
        return spec

    @staticmethod
    def radial_callable(fn, r_max, n=4097, rule="pchip", label=""):
        """Sample a radial callable into a profile on [0, r_max]."""
        r = np.linspace(0.0, float(r_max), int(n))
        return FieldSpec.radial_profile(r, np.asarray(fn(r), dtype=np.float64),
                                        rule=rule, label=label or "radial-callable")

    @staticmethod
    def analytic(fn, nonnegative=False, label=""):
        return FieldSpec(kind="analytic", fn=fn, nonnegative=nonnegative,
                         label=label or "analytic")

    def _check_flags(self):
        if self.kind != "radial":
            return
        scale = max(np.abs(self.values).max(), 1e-30)
        if self.nonnegative and np.any(self.values < -SIGN_TOL * scale):
            raise ValueError("field flagged nonnegative but profile has negative samples")
        if self.radially_nonincreasing and np.any(np.diff(self.values) > SIGN_TOL * scale):
            raise ValueError("field flagged nonincreasing but profile increases")

    @property
    def is_radial(self):
        return self.kind in ("constant", "radial")

    def _interp(self):
        if self.rule == "pchip":
            return PchipInterpolator(self.radii, self.values, extrapolate=True)
        return lambda r: np.interp(r, self.radii, self.values)

    def eval_radial(self, r):
        r = np.asarray(r, dtype=np.float64)
        if self.kind == "constant":
            return np.full(r.shape, self.beta)
        if self.kind == "radial":
            return np.asarray(self._interp()(r), dtype=np.float64)
        raise ValueError("analytic field is not radial; use eval_xy")

    def eval_xy(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if self.kind == "constant":
            return np.full(x.shape, self.beta)
        if self.kind == "radial":
            return self.eval_radial(np.hypot(x, y))
        return np.asarray(self.fn(x, y), dtype=np.float64)

    def scale(self):
        """Magnitude estimate used in zero-guard thresholds."""
        if self.kind == "constant":
            return max(abs(self.beta), 1.0)
        if self.kind == "radial":
            return max(np.abs(self.values).max(), 1.0)
        return 1.0


@dataclass(frozen=True)
class RobinComponent:
    """Robin datum g on one boundary component, as a function of arclength."""

    kind: str = "constant"  # 'constant' | 'fourier' | 'callable'
    value: float = 0.0
    coeffs: Optional[np.ndarray] = None  # centered, for 'fourier'
    fn: Optional[Callable] = None

    def evaluate(self, s, L):
        s = np.asarray(s, dtype=np.float64)
        if self.kind == "constant":
            return np.full(s.shape, self.value)
        if self.kind == "fourier":
            vals = fourier.eval_series(self.coeffs, s, L)
            if np.abs(vals.imag).max(initial=0.0) > 1e-10 * (1 + np.abs(vals.real).max(initial=0.0)):
                raise ValueError("Robin coefficients are not Hermitian-symmetric (g must be real)")
            return vals.real
        return np.asarray(self.fn(s), dtype=np.float64)

    def mean(self, L):
        if self.kind == "constant":
            return self.value
        if self.kind == "fourier":
            K = (len(self.coeffs) - 1) // 2
            return float(np.real(self.coeffs[K]))
        return float(fourier.trapezoid_mean(self.fn, L))


@dataclass(frozen=True)
class RobinSpec:
    """Per-component Robin data; g identically zero encodes Neumann."""

    components: Sequence[RobinComponent] = dc_field(default_factory=tuple)

    @staticmethod
    def neumann(n_components=1):
        return RobinSpec(tuple(RobinComponent() for _ in range(n_components)))

    @staticmethod
    def constant(values):
        if np.isscalar(values):
            values = [values]
        return RobinSpec(tuple(RobinComponent(kind="constant", value=float(v)) for v in values))

    @staticmethod
    def from_callables(fns):
        return RobinSpec(tuple(RobinComponent(kind="callable", fn=f) for f in fns))

    def component(self, j):
        if j < len(self.components):
            return self.components[j]
        return RobinComponent()  # missing components default to Neumann

    def is_zero(self):
        return all(
            c.kind == "constant" and c.value == 0.0 for c in self.components
        ) or len(self.components) == 0
