"""Conditional CDF families and the probability integral transform.

Data arrives as pairs (xi_i, zeta_i) where, under the null, xi_i was
drawn from a known conditional law F(. | zeta_i).  Mapping each pair to
Y_i = F(xi_i | zeta_i) turns the null into "the Y_i are i.i.d. uniform
on [0, 1]" whatever the zeta values were, which is what lets a single
KS table serve every conditioning structure.

Families implement a CDF and a quantile in the conditioning parameter;
three analytic ones are built in (normal location shift, exponential
rate, unit-width uniform window) plus a bilinear-interpolated table for
families known only numerically and a degenerate wrapper around an
unconditional CDF.
"""

from __future__ import annotations

import csv
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .empirical import SortedUnitSample

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Acklam's rational approximation to the standard normal quantile.
_A = (-3.969683028665376e+01,  2.209460984245205e+02, -2.759285104469687e+02,
       1.383577518672690e+02, -3.066479806614716e+01,  2.506628277459239e+00)
_B = (-5.447609879822406e+01,  1.615858368580409e+02, -1.556989798598866e+02,
       6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00,  4.374664141464968e+00,  2.938163982698783e+00)
_D = ( 7.784695709041462e-03,  3.224671290700398e-01,  2.445134137142996e+00,
       3.754408661907416e+00)
_P_LOW = 0.02425


def _norm_cdf_scalar(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


def _norm_quantile_scalar(p: float) -> float:
    """Standard normal quantile: Acklam's approximation plus one Halley
    refinement through erfc, giving absolute error below 1e-9."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile argument must lie in (0, 1), got {p}")
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
            ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    elif p <= 1.0 - _P_LOW:
        q = p - 0.5
        r = q * q
        x = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / \
            (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
    else:
        q = math.sqrt(-2.0 * math.log1p(-p))
        x = -(((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
             ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    e = _norm_cdf_scalar(x) - p
    u = e * _SQRT_2PI * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


_norm_cdf_vec = np.frompyfunc(_norm_cdf_scalar, 1, 1)
_norm_quantile_vec = np.frompyfunc(_norm_quantile_scalar, 1, 1)


def _apply_scalar_fn(fn, arr):
    # frompyfunc returns a bare scalar for 0-d input, an object array else
    out = fn(arr)
    if isinstance(out, np.ndarray):
        return out.astype(float)
    return np.asarray(float(out))


def _norm_cdf(x):
    return _apply_scalar_fn(_norm_cdf_vec, x)


def _norm_quantile(p):
    return _apply_scalar_fn(_norm_quantile_vec, p)


def _broadcast(a, b):
    A = np.asarray(a, dtype=float)
    B = np.asarray(b, dtype=float)
    scalar = A.ndim == 0 and B.ndim == 0
    return A, B, scalar


def _unwrap(out: np.ndarray, scalar: bool):
    return float(out) if scalar else out


@dataclass(frozen=True)
class ObservationPair:
    """One observation xi with its conditioning value zeta."""

    xi: float
    zeta: float


class ConditionalCdfFamily(ABC):
    """A family of CDFs indexed by a real conditioning parameter zeta.

    ``cdf`` and ``quantile`` broadcast over numpy arrays and return a
    plain float for scalar input.
    """

    name: str = "family"

    @abstractmethod
    def cdf(self, x, zeta):
        """F(x | zeta), in [0, 1]."""

    @abstractmethod
    def quantile(self, p, zeta):
        """Smallest x with F(x | zeta) >= p."""

    def zeta_error(self, zeta: float) -> str | None:
        """Reason the given zeta is outside the family's domain, or None."""
        if not math.isfinite(zeta):
            return "zeta must be finite"
        return None

    def validate_zetas(self, zetas) -> None:
        arr = np.atleast_1d(np.asarray(zetas, dtype=float))
        for idx, z in enumerate(arr):
            reason = self.zeta_error(float(z))
            if reason is not None:
                raise ValueError(
                    f"zeta={z} at index {idx} invalid for family "
                    f"'{self.name}': {reason}"
                )


@dataclass(frozen=True)
class NormalLocation(ConditionalCdfFamily):
    """Normal with mean zeta and fixed scale sigma."""

    sigma: float = 1.0
    name = "normal-location"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma}")

    def cdf(self, x, zeta):
        X, Z, scalar = _broadcast(x, zeta)
        return _unwrap(_norm_cdf((X - Z) / self.sigma), scalar)

    def quantile(self, p, zeta):
        P, Z, scalar = _broadcast(p, zeta)
        return _unwrap(Z + self.sigma * _norm_quantile(P), scalar)


@dataclass(frozen=True)
class ExponentialRate(ConditionalCdfFamily):
    """Exponential with rate zeta (zeta > 0), supported on [0, inf)."""

    name = "exponential-rate"

    def cdf(self, x, zeta):
        X, Z, scalar = _broadcast(x, zeta)
        out = -np.expm1(-Z * np.maximum(X, 0.0))
        return _unwrap(out, scalar)

    def quantile(self, p, zeta):
        P, Z, scalar = _broadcast(p, zeta)
        with np.errstate(divide="ignore"):
            out = -np.log1p(-P) / Z
        return _unwrap(out, scalar)

    def zeta_error(self, zeta: float) -> str | None:
        if not math.isfinite(zeta):
            return "zeta must be finite"
        if zeta <= 0.0:
            return "rate zeta must be > 0"
        return None


@dataclass(frozen=True)
class UniformWidth(ConditionalCdfFamily):
    """Uniform on the unit-width window [zeta, zeta + 1]."""

    name = "uniform-width"

    def cdf(self, x, zeta):
        X, Z, scalar = _broadcast(x, zeta)
        return _unwrap(np.clip(X - Z, 0.0, 1.0), scalar)

    def quantile(self, p, zeta):
        P, Z, scalar = _broadcast(p, zeta)
        return _unwrap(Z + P, scalar)


class TabulatedFamily(ConditionalCdfFamily):
    """Family given numerically on a (zeta, x) grid, bilinearly interpolated.

    Outside the grid both coordinates clamp to the nearest edge.  Rows
    must be non-decreasing in x with values in [0, 1]; this is checked
    at construction.
    """

    name = "tabulated"

    def __init__(self, zeta_grid, x_knots, cdf_values) -> None:
        zg = np.asarray(zeta_grid, dtype=float)
        xk = np.asarray(x_knots, dtype=float)
        cv = np.asarray(cdf_values, dtype=float)
        if zg.ndim != 1 or zg.size < 1:
            raise ValueError("zeta grid must be a non-empty 1-d array")
        if xk.ndim != 1 or xk.size < 2:
            raise ValueError("x grid needs at least two knots")
        if np.any(np.diff(zg) <= 0.0) or np.any(np.diff(xk) <= 0.0):
            raise ValueError("grids must be strictly increasing")
        if cv.shape != (zg.size, xk.size):
            raise ValueError(
                f"cdf table shape {cv.shape} does not match grid "
                f"({zg.size}, {xk.size})"
            )
        if not np.all(np.isfinite(cv)):
            raise ValueError("cdf table must be finite")
        if np.any(cv < 0.0) or np.any(cv > 1.0):
            raise ValueError("cdf table values must lie in [0, 1]")
        if np.any(np.diff(cv, axis=1) < 0.0):
            bad = int(np.argwhere(np.diff(cv, axis=1) < 0.0)[0][0])
            raise ValueError(f"cdf row for zeta={zg[bad]} is not non-decreasing")
        self.zeta_grid = zg
        self.x_knots = xk
        self.cdf_values = cv

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TabulatedFamily):
            return NotImplemented
        return (np.array_equal(self.zeta_grid, other.zeta_grid)
                and np.array_equal(self.x_knots, other.x_knots)
                and np.array_equal(self.cdf_values, other.cdf_values))

    def __hash__(self) -> int:
        return hash((self.zeta_grid.tobytes(), self.x_knots.tobytes(),
                     self.cdf_values.tobytes()))

    @classmethod
    def from_csv(cls, path) -> "TabulatedFamily":
        """Load a table from CSV columns ``zeta,x,cdf``.

        Every (zeta, x) combination of the two grids must appear exactly
        once; row order is free.
        """
        entries: dict[tuple[float, float], float] = {}
        with open(path, newline="", encoding="utf-8-sig") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip() for c in header] != ["zeta", "x", "cdf"]:
                raise ValueError(f"{path}: expected header 'zeta,x,cdf', got {header}")
            for row in reader:
                if not row:
                    continue
                if len(row) != 3:
                    raise ValueError(f"{path}: line {reader.line_num}: expected 3 fields")
                try:
                    z, x, c = (float(v) for v in row)
                except ValueError:
                    raise ValueError(
                        f"{path}: line {reader.line_num}: non-numeric value"
                    ) from None
                if not (math.isfinite(z) and math.isfinite(x) and math.isfinite(c)):
                    raise ValueError(f"{path}: line {reader.line_num}: non-finite value")
                if (z, x) in entries:
                    raise ValueError(
                        f"{path}: line {reader.line_num}: duplicate point zeta={z}, x={x}"
                    )
                entries[(z, x)] = c
        if not entries:
            raise ValueError(f"{path}: table has no data rows")
        zg = np.unique([z for z, _ in entries])
        xk = np.unique([x for _, x in entries])
        if len(entries) != zg.size * xk.size:
            raise ValueError(
                f"{path}: incomplete grid, {len(entries)} points for a "
                f"{zg.size} x {xk.size} table"
            )
        cv = np.empty((zg.size, xk.size))
        for (z, x), c in entries.items():
            cv[np.searchsorted(zg, z), np.searchsorted(xk, x)] = c
        return cls(zg, xk, cv)

    def _zeta_brackets(self, Z: np.ndarray):
        zg = self.zeta_grid
        if zg.size == 1:
            zeros = np.zeros(Z.shape, dtype=int)
            return zeros, zeros, np.zeros(Z.shape)
        hi = np.clip(np.searchsorted(zg, Z, side="left"), 1, zg.size - 1)
        lo = hi - 1
        w = np.clip((Z - zg[lo]) / (zg[hi] - zg[lo]), 0.0, 1.0)
        return lo, hi, w

    def cdf(self, x, zeta):
        X, Z, scalar = _broadcast(x, zeta)
        X, Z = np.broadcast_arrays(X, Z)
        xk = self.x_knots
        j = np.clip(np.searchsorted(xk, X, side="left"), 1, xk.size - 1)
        t = np.clip((X - xk[j - 1]) / (xk[j] - xk[j - 1]), 0.0, 1.0)
        lo, hi, w = self._zeta_brackets(Z)
        cv = self.cdf_values
        row_lo = cv[lo, j - 1] * (1.0 - t) + cv[lo, j] * t
        row_hi = cv[hi, j - 1] * (1.0 - t) + cv[hi, j] * t
        return _unwrap(row_lo * (1.0 - w) + row_hi * w, scalar)

    def quantile(self, p, zeta):
        P, Z, scalar = _broadcast(p, zeta)
        P, Z = np.broadcast_arrays(np.atleast_1d(P), np.atleast_1d(Z))
        out = np.empty(P.shape)
        flatP, flatZ, flat = P.ravel(), Z.ravel(), out.ravel()
        for i in range(flatP.size):
            flat[i] = self._quantile_one(flatP[i], flatZ[i])
        return float(out.ravel()[0]) if scalar else out

    def _quantile_one(self, p: float, zeta: float) -> float:
        lo, hi, w = self._zeta_brackets(np.asarray(zeta, dtype=float))
        row = (1.0 - float(w)) * self.cdf_values[int(lo)] + float(w) * self.cdf_values[int(hi)]
        xk = self.x_knots
        if p <= row[0]:
            return float(xk[0])
        if p >= row[-1]:
            # smallest knot where the row first reaches its maximum
            return float(xk[np.searchsorted(row, row[-1], side="left")])
        j = int(np.searchsorted(row, p, side="left"))
        if row[j] == row[j - 1]:
            return float(xk[j - 1])
        t = (p - row[j - 1]) / (row[j] - row[j - 1])
        return float(xk[j - 1] + t * (xk[j] - xk[j - 1]))


class ConstantFamily(ConditionalCdfFamily):
    """Lift an unconditional CDF into the family interface.

    zeta is accepted and ignored, so the conditional test collapses to
    the classic one-sample test against ``cdf_fn``.
    """

    name = "constant"

    def __init__(self, cdf_fn: Callable[[float], float],
                 quantile_fn: Callable[[float], float] | None = None) -> None:
        self._cdf_fn = cdf_fn
        self._quantile_fn = quantile_fn

    def cdf(self, x, zeta):
        X, _, scalar = _broadcast(x, zeta)
        out = _apply_scalar_fn(np.frompyfunc(self._cdf_fn, 1, 1), X)
        return _unwrap(out, scalar)

    def quantile(self, p, zeta):
        if self._quantile_fn is None:
            raise ValueError("this constant family has no quantile function")
        P, _, scalar = _broadcast(p, zeta)
        out = _apply_scalar_fn(np.frompyfunc(self._quantile_fn, 1, 1), P)
        return _unwrap(out, scalar)


def _split_pairs(pairs: Iterable) -> tuple[np.ndarray, np.ndarray]:
    xis: list[float] = []
    zetas: list[float] = []
    for item in pairs:
        if isinstance(item, ObservationPair):
            xis.append(item.xi)
            zetas.append(item.zeta)
        else:
            xi, zeta = item
            xis.append(float(xi))
            zetas.append(float(zeta))
    if not xis:
        raise ValueError("need at least one observation pair")
    return np.asarray(xis), np.asarray(zetas)


def pit_transform(pairs: Iterable, family: ConditionalCdfFamily) -> SortedUnitSample:
    """Map pairs (xi, zeta) to sorted Y = F(xi | zeta).

    Under the conditional null the output is an ordered uniform sample,
    ready for ``ks_statistic_uniform``.  Exact 0 or 1 values (possible
    for families with bounded support) are kept as-is.
    """
    xi, zeta = _split_pairs(pairs)
    if not np.all(np.isfinite(xi)):
        bad = int(np.argwhere(~np.isfinite(xi))[0][0])
        raise ValueError(f"xi={xi[bad]} at index {bad} is not finite")
    family.validate_zetas(zeta)
    y = np.atleast_1d(np.asarray(family.cdf(xi, zeta), dtype=float))
    return SortedUnitSample(np.sort(y))


def sample_conditional(family: ConditionalCdfFamily, zeta: float, u: float) -> float:
    """Draw from F(. | zeta) by inverse transform of the uniform value u."""
    family.validate_zetas([zeta])
    return float(family.quantile(u, zeta))
