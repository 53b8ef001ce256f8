"""
Catalog of maximal monotone graphs in ℝ with analytic resolvents
"""
from dataclasses import dataclass
from enum import Enum
from typing import Dict

import numpy as np
from scipy import optimize

from ..errors import RejectedInputError, StepSizeError, ToleranceError, UnsupportedRelationError


class ScalarGraphKind(Enum):
    """Scalar graph enumeration"""
    LINEAR = "linear"
    ABS = "abs"
    POWER = "power"
    BOX = "box"
    RELU = "relu"
    ZERO = "zero"


@dataclass(frozen=True)
class ScalarGraph:
    """
    Maximal monotone graph g ⊂ ℝ×ℝ, the sub-differential of a scalar potential j

    linear: g(s) = α s                      j(s) = α s²/2
    abs:    g = ∂|·|                        j(s) = |s|
    power:  g(s) = |s|^{p−1} sign s         j(s) = |s|^p / p
    box:    g = ∂I_[a,b]                    j = indicator of [a, b]
    relu:   g(s) = 2b s for s > 0, else 0   j(s) = b s₊²
    zero:   g = ∂I_{0}                      j = indicator of {0}
    """

    kind: ScalarGraphKind
    slope: float = 0.0
    exponent: float = 2.0
    lower: float = -1.0
    upper: float = 1.0
    weight: float = 1.0

    def __post_init__(self):
        if self.kind == ScalarGraphKind.POWER and not self.exponent > 1.0:
            raise RejectedInputError(f"power graph needs p > 1, got {self.exponent}")
        if self.kind == ScalarGraphKind.BOX and not self.lower <= self.upper:
            raise RejectedInputError(f"box graph needs a <= b, got [{self.lower}, {self.upper}]")
        if self.kind == ScalarGraphKind.RELU and not self.weight > 0.0:
            raise RejectedInputError(f"relu graph needs b > 0, got {self.weight}")

    @property
    def type_constant(self) -> float:
        """Smallest γ with g + γ monotone; negative for strictly increasing linear graphs"""
        if self.kind == ScalarGraphKind.LINEAR:
            return -self.slope
        return 0.0

    def resolve(self, c: float, s: np.ndarray) -> np.ndarray:
        """Vectorized (1 + c g)^{-1}(s)"""
        s = np.asarray(s, dtype=float)
        if self.kind == ScalarGraphKind.LINEAR:
            denominator = 1.0 + c * self.slope
            if denominator <= 0.0:
                raise StepSizeError(f"resolvent parameter c={c} too large for slope {self.slope}")
            return s / denominator
        if self.kind == ScalarGraphKind.ABS:
            return np.sign(s) * np.maximum(np.abs(s) - c, 0.0)
        if self.kind == ScalarGraphKind.POWER:
            return _power_resolve(c, s, self.exponent)
        if self.kind == ScalarGraphKind.BOX:
            return np.clip(s, self.lower, self.upper)
        if self.kind == ScalarGraphKind.RELU:
            return np.where(s > 0.0, s / (1.0 + 2.0 * c * self.weight), s)
        if self.kind == ScalarGraphKind.ZERO:
            return np.zeros_like(s)
        raise UnsupportedRelationError(f"no analytic resolvent for scalar graph {self.kind}")

    def potential(self, s: np.ndarray) -> np.ndarray:
        """Potential j evaluated componentwise, +∞ outside its domain"""
        s = np.asarray(s, dtype=float)
        if self.kind == ScalarGraphKind.LINEAR:
            return 0.5 * self.slope * s ** 2
        if self.kind == ScalarGraphKind.ABS:
            return np.abs(s)
        if self.kind == ScalarGraphKind.POWER:
            return np.abs(s) ** self.exponent / self.exponent
        if self.kind == ScalarGraphKind.BOX:
            inside = (s >= self.lower) & (s <= self.upper)
            return np.where(inside, 0.0, np.inf)
        if self.kind == ScalarGraphKind.RELU:
            return self.weight * np.maximum(s, 0.0) ** 2
        if self.kind == ScalarGraphKind.ZERO:
            return np.where(s == 0.0, 0.0, np.inf)
        raise UnsupportedRelationError(f"no potential for scalar graph {self.kind}")

    def inverse(self, t: np.ndarray) -> np.ndarray:
        """g^{-1}(t) for strictly monotone graphs"""
        t = np.asarray(t, dtype=float)
        if self.kind == ScalarGraphKind.LINEAR and self.slope > 0.0:
            return t / self.slope
        if self.kind == ScalarGraphKind.POWER:
            return np.sign(t) * np.abs(t) ** (1.0 / (self.exponent - 1.0))
        raise UnsupportedRelationError(f"inverse of scalar graph {self.kind.value} is not single-valued")

    def to_dict(self) -> dict:
        """Convert graph to its JSON spec"""
        spec: Dict = {'kind': self.kind.value}
        if self.kind == ScalarGraphKind.LINEAR:
            spec['slope'] = self.slope
        elif self.kind == ScalarGraphKind.POWER:
            spec['p'] = self.exponent
        elif self.kind == ScalarGraphKind.BOX:
            spec['lower'] = self.lower
            spec['upper'] = self.upper
        elif self.kind == ScalarGraphKind.RELU:
            spec['b'] = self.weight
        return spec

    @classmethod
    def from_dict(cls, spec: Dict) -> 'ScalarGraph':
        try:
            kind = ScalarGraphKind(spec['kind'])
        except (KeyError, ValueError):
            raise UnsupportedRelationError(f"unknown scalar graph kind: {spec.get('kind')!r}")
        if kind == ScalarGraphKind.LINEAR:
            return cls(kind, slope=float(spec.get('slope', 1.0)))
        if kind == ScalarGraphKind.POWER:
            return cls(kind, exponent=float(spec.get('p', 3.0)))
        if kind == ScalarGraphKind.BOX:
            return cls(kind, lower=float(spec.get('lower', -1.0)), upper=float(spec.get('upper', 1.0)))
        if kind == ScalarGraphKind.RELU:
            return cls(kind, weight=float(spec.get('b', 1.0)))
        return cls(kind)


def _power_resolve(c: float, s: np.ndarray, p: float) -> np.ndarray:
    """Solve z + c|z|^{p−1} sign z = s by Newton from an upper bound of the root"""
    magnitude = np.abs(s)
    result = np.zeros_like(magnitude)
    active = magnitude > 0.0
    if not np.any(active):
        return result
    m = magnitude[active]

    if p == 2.0:
        result[active] = m / (1.0 + c)
        return np.sign(s) * result

    if p > 2.0:
        # convex in z
        def func(z):
            return z + c * z ** (p - 1.0) - m

        def fprime(z):
            return 1.0 + c * (p - 1.0) * z ** (p - 2.0)

        start = np.minimum(m, (m / c) ** (1.0 / (p - 1.0)))
    else:
        # convex in t = z^{p−1}
        q = 1.0 / (p - 1.0)

        def func(t):
            return t ** q + c * t - m

        def fprime(t):
            return q * t ** (q - 1.0) + c

        start = np.minimum(m / c, m ** (p - 1.0))

    tol = 1e-14 * max(1.0, float(np.max(start)))
    if start.size > 1:
        root, converged, _ = optimize.newton(
            func, start, fprime=fprime, tol=tol, maxiter=200, full_output=True
        )
    else:
        root, info = optimize.newton(
            func, start, fprime=fprime, tol=tol, maxiter=200, full_output=True, disp=False
        )
        converged = np.atleast_1d(info.converged)
    if not np.all(converged):
        raise ToleranceError("power-graph resolvent did not converge", 200, float(np.max(np.abs(func(root)))))

    result[active] = root if p > 2.0 else root ** (1.0 / (p - 1.0))
    return np.sign(s) * result
