"""Laurent expansions and polar parts on annuli around a pole.

On the annulus A(w; lam, r) = {r < |z - w| < lam*r} the monomials
(z - w)**k form an orthogonal basis of the square-integrable holomorphic
functions for the area inner product <f, g> = (1/pi) * integral of f*conj(g).
Their norms have the closed form

    ||phi_k|| = sqrt((lam**(2k+2) - 1)/(k+1)) * r**(k+1)   (k != -1)
    ||phi_-1|| = sqrt(2*log(lam)),

the k = -1 case being the limit of the general formula.  Coefficients are
extracted by spectrally accurate trapezoid quadrature on the mid-circle of
radius sqrt(lam)*r (primary path); the two-dimensional inner-product route
is retained as a cross-check oracle.

The negative-index half of the expansion (the polar part) extends
holomorphically to the exterior of the inflated disc, with the sup there
controlled by s(lam)*r times the annulus sup, where

    s(lam) = sum_{k<0} C(lam, k) * lam**k,
    C(lam, k) = pi*(lam**2 - 1)*sqrt((k+1)/(lam**(2k+2) - 1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DiophantineRequired, NonConvergent, PoleProximity
from .geometry import DiophantineRadius
from .series import SumResult, TermSequence, power_geometric_tail

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class AnnulusSpec:
    """Annulus A(center; lam, r) = {r < |z - center| < lam*r}."""

    center: complex
    r: float
    lam: float

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("inner radius must be positive")
        if self.lam <= 1:
            raise ValueError("ratio lam must exceed 1")

    @property
    def outer(self) -> float:
        return self.lam * self.r

    @property
    def mid_radius(self) -> float:
        # Geometric mean: farthest from both boundary circles in log scale.
        return math.sqrt(self.lam) * self.r


def basis_norm(k: int, r: float, lam: float) -> float:
    """Norm of (z-center)**k in the annulus Hilbert space.

    sqrt((lam**(2k+2)-1)/(k+1)) * r**(k+1) for k != -1; the k = -1 value
    sqrt(2*log(lam)) is the limit of that expression as k -> -1.
    """
    if r <= 0 or lam <= 1:
        raise ValueError("need r > 0 and lam > 1")
    if k == -1:
        return math.sqrt(2.0 * math.log(lam))
    return math.sqrt((lam ** (2 * k + 2) - 1.0) / (k + 1)) * r ** (k + 1)


def c_constant(lam: float, k: int) -> float:
    """Coefficient-bound constant C(lam, k) = pi*(lam**2-1)*sqrt((k+1)/(lam**(2k+2)-1)).

    At k = -1 the ratio under the root degenerates to 0/0 and is replaced by
    its limit 1/(2*log(lam)).  As k -> -infinity, C(lam, k) behaves like
    pi*(lam**2-1)*sqrt(|k|).
    """
    if lam <= 1:
        raise ValueError("lam must exceed 1")
    if k == -1:
        ratio = 1.0 / (2.0 * math.log(lam))
    else:
        ratio = (k + 1) / (lam ** (2 * k + 2) - 1.0)
    return math.pi * (lam**2 - 1.0) * math.sqrt(ratio)


def s_lambda(lam: float, rel_cutoff: float = 1e-16) -> float:
    """sum_{k<0} C(lam, k)*lam**k, summed until terms fall below rel_cutoff."""
    total = 0.0
    k = -1
    while True:
        term = c_constant(lam, k) * lam**k
        total += term
        if term < rel_cutoff * total:
            return total
        k -= 1
        if k < -100_000:
            raise NonConvergent("s(lam) summation failed to settle")


def _eval_on(f: Callable, zs: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(f(zs), dtype=complex)
        if vals.shape != zs.shape:
            raise TypeError
        return vals
    except (TypeError, ValueError):
        return np.array([f(complex(z)) for z in zs], dtype=complex)


@dataclass(frozen=True)
class LaurentExpansion:
    center: complex
    k_min: int
    k_max: int
    coefficients: np.ndarray  # index i holds c_{k_min + i}
    nodes_used: int
    scale: float  # sup of |f| on the quadrature circle

    def coefficient(self, k: int) -> complex:
        if not (self.k_min <= k <= self.k_max):
            raise IndexError(f"k = {k} outside stored window")
        return complex(self.coefficients[k - self.k_min])

    def evaluate(self, z: complex, which: str = "all") -> complex:
        ks = np.arange(self.k_min, self.k_max + 1)
        if which == "polar":
            mask = ks < 0
        elif which == "regular":
            mask = ks >= 0
        else:
            mask = np.ones_like(ks, dtype=bool)
        w = z - self.center
        return complex(np.sum(self.coefficients[mask] * w ** ks[mask].astype(float)))


def laurent_coefficients(
    f: Callable,
    ann: AnnulusSpec,
    k_min: int = -64,
    k_max: int = 64,
    tol: float = 1e-12,
    start_nodes: int = 256,
    max_doublings: int = 6,
    radius: float | None = None,
) -> LaurentExpansion:
    """Laurent coefficients of f on the annulus by circle quadrature.

    c_k = (1/2*pi*i) * contour integral of f(z)*(z-center)**(-k-1) on the
    circle of radius sqrt(lam)*r, evaluated by the M-point trapezoid rule
    (one FFT), M doubled until the window of coefficients moves by less than
    tol times the measured circle sup.  Failure to settle after
    ``max_doublings`` signals a singularity inside the annulus and raises
    NonConvergent.
    """
    if k_min > k_max:
        raise ValueError("k_min must not exceed k_max")
    R = ann.mid_radius if radius is None else radius
    if not (ann.r < R < ann.outer):
        raise ValueError("quadrature radius must lie inside the annulus")

    span = max(abs(k_min), abs(k_max))
    m = max(start_nodes, 1 << (2 * span + 8).bit_length())
    previous = None
    for _ in range(max_doublings + 1):
        theta = TWO_PI * np.arange(m) / m
        zs = ann.center + R * np.exp(1j * theta)
        vals = _eval_on(f, zs)
        scale = float(np.max(np.abs(vals)))
        bins = np.fft.fft(vals) / m
        ks = np.arange(k_min, k_max + 1)
        coeffs = bins[ks % m] * R ** (-ks.astype(float))
        if previous is not None:
            if np.max(np.abs(coeffs - previous)) < tol * max(scale, 1e-300):
                return LaurentExpansion(ann.center, k_min, k_max, coeffs, m, scale)
        previous = coeffs
        m *= 2
    raise NonConvergent(
        "coefficients failed to settle under node doubling "
        "(singularity inside the annulus?)"
    )


def annulus_inner_product(
    f: Callable, g: Callable, ann: AnnulusSpec, n_r: int = 64, n_theta: int = 256
) -> complex:
    """(1/pi) * integral over the annulus of f * conj(g), by tensor quadrature.

    Gauss-Legendre radially, trapezoid in angle.  This is the cross-check
    route for laurent_coefficients and for the basis-norm formulas.
    """
    nodes, weights = np.polynomial.legendre.leggauss(n_r)
    s = 0.5 * (ann.outer - ann.r) * nodes + 0.5 * (ann.outer + ann.r)
    ws = 0.5 * (ann.outer - ann.r) * weights
    theta = TWO_PI * np.arange(n_theta) / n_theta
    zs = ann.center + s[:, None] * np.exp(1j * theta[None, :])
    fv = _eval_on(f, zs.ravel()).reshape(zs.shape)
    gv = _eval_on(g, zs.ravel()).reshape(zs.shape)
    radial = (fv * np.conj(gv)).sum(axis=1) * (TWO_PI / n_theta)
    return complex(np.sum(radial * ws * s) / math.pi)


def laurent_coefficient_l2(
    f: Callable, ann: AnnulusSpec, k: int, n_r: int = 64, n_theta: int = 256
) -> complex:
    """Coefficient via the inner-product formula <f|phi_k>/||phi_k||**2."""
    phi = lambda z: (z - ann.center) ** float(k)
    return annulus_inner_product(f, phi, ann, n_r, n_theta) / basis_norm(
        k, ann.r, ann.lam
    ) ** 2


@dataclass(frozen=True)
class PolarPart:
    """Negative-index half of a Laurent expansion; holomorphic off the disc."""

    center: complex
    ks: np.ndarray  # negative indices, descending from -1
    coefficients: np.ndarray
    r: float
    lam: float

    def evaluate(self, z) -> complex | np.ndarray:
        w = np.asarray(z, dtype=complex) - self.center
        vals = np.zeros_like(w)
        for k, c in zip(self.ks, self.coefficients):
            vals = vals + c * w ** float(k)
        return complex(vals) if np.isscalar(z) or vals.shape == () else vals

    def sup_on_circle(self, radius: float, samples: int = 720) -> float:
        zs = self.center + radius * np.exp(1j * TWO_PI * np.arange(samples) / samples)
        return float(np.max(np.abs(self.evaluate(zs))))


def polar_part(
    f: Callable,
    ann: AnnulusSpec,
    k_depth: int = 64,
    truncate: float = 1e-16,
    **quad_kwargs,
) -> PolarPart:
    """Polar part of f at the annulus center.

    Extracts the negative-index Laurent coefficients and drops those whose
    contribution |c_k|*r**k on the inner circle falls below ``truncate``
    times the largest such contribution.  The result evaluates on the whole
    exterior of the inflated disc and obeys the extension estimate checked
    by extension_bound.
    """
    exp = laurent_coefficients(f, ann, k_min=-k_depth, k_max=0, **quad_kwargs)
    ks = np.arange(-1, -k_depth - 1, -1)
    coeffs = np.array([exp.coefficient(int(k)) for k in ks])
    weights = np.abs(coeffs) * ann.r ** ks.astype(float)
    scale = max(float(weights.max(initial=0.0)), 1e-300)
    keep = weights >= truncate * scale
    return PolarPart(ann.center, ks[keep], coeffs[keep], ann.r, ann.lam)


def annulus_sup(f: Callable, ann: AnnulusSpec, samples: int = 2048) -> float:
    """Measured sup of |f| over the annulus (attained on its boundary circles)."""
    theta = np.exp(1j * TWO_PI * np.arange(samples) / samples)
    zs = np.concatenate(
        [ann.center + ann.r * theta, ann.center + ann.outer * theta]
    )
    return float(np.max(np.abs(_eval_on(f, zs))))


def extension_bound(ann: AnnulusSpec, annulus_sup_value: float) -> float:
    """Exterior sup bound for the polar part: s(lam) * r * (annulus sup)."""
    return s_lambda(ann.lam) * ann.r * annulus_sup_value


def fiber_polar_sum(
    seq: TermSequence,
    omega_proj: complex,
    z: complex,
    tol: float = 1e-10,
    sheet_limit: int = 100_000,
) -> SumResult:
    """Sum of the polar parts of all sheets whose pole set contains omega_proj.

    Every model in this package has simple poles, so the sheet-n polar part
    at the pole is residue/(z - pole).  The tail over unsummed sheets is
    bounded by s(lam) * sum_{n>N} r_n * norm_bound(n) via the decay
    certificate, which also guarantees the summability hypothesis
    sum_n norm_bound(n)*r_n < infinity.
    """
    perf = seq.perforation
    radius = perf.radius
    cert = seq.meander_cert
    if cert is None or not isinstance(radius, DiophantineRadius):
        raise DiophantineRequired(
            "fiber polar sums need a decay certificate over a Diophantine radius"
        )
    fiber = list(perf.poles.sheets_containing(omega_proj, sheet_limit))
    if not fiber:
        raise ValueError(f"{omega_proj} is not a pole projection of this family")
    n0 = fiber[0]
    if abs(z - omega_proj) < radius.lam * radius.value(n0):
        raise PoleProximity(n0, omega_proj)

    s_val = s_lambda(radius.lam)
    acc = 0j
    last = n0
    for n in fiber:
        pole, _ = perf.nearest_pole(n, omega_proj)
        acc += seq.residue(n, pole) / (z - pole)
        last = n
        tail = (
            s_val * cert.A * radius.c * power_geometric_tail(-radius.alpha, cert.rho, n)
        )
        if tail <= tol:
            return SumResult(acc, last, tail)
    if getattr(perf.poles, "finite_fibers", False):
        return SumResult(acc, last, 0.0)  # the fiber is exhausted: no tail at all
    tail = s_val * cert.A * radius.c * power_geometric_tail(-radius.alpha, cert.rho, last)
    if tail <= tol:
        return SumResult(acc, last, tail)
    raise NonConvergent(
        f"fiber tail bound {tail:.3g} still above tol after sheet {last}"
    )
