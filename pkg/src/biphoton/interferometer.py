"""Coincidence rates and interferograms for the unfolded four-path
two-photon interferometer.

The numerical kernel is the overlap integral

    Gamma(dts, dtl) = sum Phi_A * conj(Phi_B) * exp(-i(w1*dts + w2*dtl)) dw1 dw2

evaluated as a midpoint-rule double sum, with the normalized coincidence
rate G = 1 - Re(Gamma) in [0, 2].  Lattice scans reuse the factored form
E1 @ M @ E2^T, which is the same double sum reassociated.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace

import numpy as np

from .core import C, GridMismatchError, SampledAmplitude

_RANGE_TOL = 1e-9


@dataclass(frozen=True)
class DelayConfig:
    """Four path delays; only the per-source differences matter."""

    tau_SA: float
    tau_SB: float
    tau_LA: float
    tau_LB: float

    @property
    def delta_tau_S(self) -> float:
        return self.tau_SA - self.tau_SB

    @property
    def delta_tau_L(self) -> float:
        return self.tau_LA - self.tau_LB

    @classmethod
    def from_path_lengths(cls, delta_x1: float, delta_x2: float) -> "DelayConfig":
        """Path-length convention tau1 = dx1/c -> delta_tau_S and
        tau2 = -dx2/c -> delta_tau_L."""
        return cls(tau_SA=delta_x1 / C, tau_SB=0.0,
                   tau_LA=-delta_x2 / C, tau_LB=0.0)


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    step: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ValueError("axis needs at least 2 points")
        if self.step <= 0:
            raise ValueError("axis step must be positive")

    @property
    def values(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)


@dataclass(frozen=True)
class Interferogram:
    """Lattice of G values over one or two delay axes.

    `counts` optionally carries synthetic detector counts on the same
    lattice (see detector.rate_to_counts); G values are validated against
    the physical range [0, 2].
    """

    axes: tuple[Axis, ...]
    values: np.ndarray
    counts: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = tuple(ax.count for ax in self.axes)
        if self.values.shape != shape:
            raise ValueError(f"values shape {self.values.shape} does not match axes {shape}")
        if self.values.min() < -_RANGE_TOL or self.values.max() > 2.0 + _RANGE_TOL:
            raise ValueError("G values outside [0, 2]")
        object.__setattr__(self, "values", np.clip(self.values, 0.0, 2.0))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    def coords(self, i: int) -> np.ndarray:
        return self.axes[i].values

    def to_csv(self, path) -> None:
        write_interferogram_csv(self, path)


def _check_same_grid(phi_a: SampledAmplitude, phi_b: SampledAmplitude) -> None:
    if phi_a.grid != phi_b.grid:
        raise GridMismatchError("amplitudes sampled on different frequency grids")


def gamma(phi_a: SampledAmplitude, phi_b: SampledAmplitude,
          delta_tau_S: float, delta_tau_L: float) -> complex:
    """Two-source overlap Gamma at a single delay point (direct double sum)."""
    _check_same_grid(phi_a, phi_b)
    g = phi_a.grid
    w1, w2 = g.mesh()
    integrand = (phi_a.values * np.conj(phi_b.values)
                 * np.exp(-1j * (w1 * delta_tau_S + w2 * delta_tau_L)))
    return complex(integrand.sum() * g.measure)


def gamma_lattice(phi_a: SampledAmplitude, phi_b: SampledAmplitude,
                  s_delays: np.ndarray, l_delays: np.ndarray) -> np.ndarray:
    """Gamma on the product lattice s_delays x l_delays.

    Factored evaluation of the same double sum: exp(-i w1 a) and
    exp(-i w2 b) are separable, so the sum is two matrix products.
    """
    _check_same_grid(phi_a, phi_b)
    g = phi_a.grid
    s = np.atleast_1d(np.asarray(s_delays, float))
    l = np.atleast_1d(np.asarray(l_delays, float))
    m = phi_a.values * np.conj(phi_b.values) * g.measure
    e1 = np.exp(-1j * np.outer(s, g.axis1))        # (ns, n1)
    e2 = np.exp(-1j * np.outer(g.axis2, l))        # (n2, nl)
    return e1 @ m @ e2


def coincidence_rate(phi_a: SampledAmplitude, phi_b: SampledAmplitude,
                     delta_tau_S: float, delta_tau_L: float) -> float:
    """Normalized coincidence rate G = 1 - Re(Gamma), in [0, 2]."""
    return 1.0 - gamma(phi_a, phi_b, delta_tau_S, delta_tau_L).real


def symmetrized_gamma(phi: SampledAmplitude, tau1: float, tau2: float) -> complex:
    """Overlap of Phi with its argument-swapped conjugate.

    Requires a square grid with identical axes so Phi(w2, w1) lives on the
    same lattice.  For asymmetric (nondegenerate) amplitudes its magnitude
    at zero delay is below 1, unlike gamma(phi, phi, 0, 0).
    """
    g = phi.grid
    if g.n1 != g.n2 or g.omega1_min != g.omega2_min or g.omega1_max != g.omega2_max:
        raise GridMismatchError("symmetrized overlap needs a square grid with identical axes")
    m = phi.values * np.conj(phi.values.T) * g.measure
    e1 = np.exp(-1j * g.axis1 * tau1)
    e2 = np.exp(-1j * g.axis2 * tau2)
    return complex(e1 @ m @ e2)


def sinc(u):
    """Unnormalized sinc: sin(u)/u with sinc(0) = 1."""
    return np.sinc(np.asarray(u, float) / np.pi)


def hom_fringe_analytic(V: float, sigma_x: float, lam: float, delta_x2) -> np.ndarray:
    """Closed-form phase-sensitive fringe
    P = (1 - V*sinc(dx/sigma_x)*cos(2*pi*dx/lam)) / 2, range [0, 1]."""
    if not 0.0 <= V <= 1.0:
        raise ValueError("V must be in [0, 1]")
    if sigma_x <= 0 or lam <= 0:
        raise ValueError("sigma_x and lam must be positive")
    dx = np.asarray(delta_x2, float)
    return 0.5 * (1.0 - V * sinc(dx / sigma_x) * np.cos(2.0 * np.pi * dx / lam))


def hom_generalized(V: float, envelope, delta_omega: float, delta_t, theta: float) -> np.ndarray:
    """Generalized HOM coincidence probability with beating and phase:
    P = (1 - V * f(dt) * cos(delta_omega*dt) * cos(theta)) / 2."""
    if not 0.0 <= V <= 1.0:
        raise ValueError("V must be in [0, 1]")
    dt = np.asarray(delta_t, float)
    f = np.asarray(envelope(dt), float)
    return 0.5 * (1.0 - V * f * np.cos(delta_omega * dt) * np.cos(theta))


def gaussian_envelope(fwhm: float):
    """Gaussian envelope f(dt) with f(0)=1 and the given FWHM."""
    s = fwhm / (2.0 * np.sqrt(2.0 * np.log(2.0)))
    return lambda dt: np.exp(-0.5 * (np.asarray(dt, float) / s) ** 2)


def sinc_envelope(width: float):
    """sinc envelope f(dt) = sinc(dt/width), f(0)=1."""
    return lambda dt: sinc(np.asarray(dt, float) / width)


def scan_1d(phi_a: SampledAmplitude, phi_b: SampledAmplitude, axis: str,
            fixed_other_delay: float, start: float, step: float, count: int) -> Interferogram:
    """1D coincidence scan along the S or L delay axis."""
    if axis not in ("S", "L"):
        raise ValueError("axis must be 'S' or 'L'")
    delays = start + step * np.arange(count)
    if axis == "L":
        gam = gamma_lattice(phi_a, phi_b, np.array([fixed_other_delay]), delays)[0]
        name = "delta_tau_L"
    else:
        gam = gamma_lattice(phi_a, phi_b, delays, np.array([fixed_other_delay]))[:, 0]
        name = "delta_tau_S"
    g = 1.0 - gam.real
    meta = {"fixed_axis": "S" if axis == "L" else "L",
            "fixed_delay": fixed_other_delay}
    return Interferogram((Axis(name, start, step, count),), g, metadata=meta)


def scan_2d(phi_a: SampledAmplitude, phi_b: SampledAmplitude,
            s_axis: tuple[float, float, int], l_axis: tuple[float, float, int]) -> Interferogram:
    """Full 2D coincidence lattice over (delta_tau_S, delta_tau_L)."""
    ax_s = Axis("delta_tau_S", *s_axis)
    ax_l = Axis("delta_tau_L", *l_axis)
    gam = gamma_lattice(phi_a, phi_b, ax_s.values, ax_l.values)
    return Interferogram((ax_s, ax_l), 1.0 - gam.real)


def write_interferogram_csv(ig: Interferogram, path) -> None:
    """CSV schema: '# axis<i> name,start,step,count' headers, optional
    '# key=value' metadata lines, then 'coord1[,coord2],G[,counts]' rows."""
    buf = io.StringIO()
    for i, ax in enumerate(ig.axes, start=1):
        buf.write(f"# axis{i} {ax.name},{ax.start!r},{ax.step!r},{ax.count}\n")
    for key in sorted(ig.metadata):
        buf.write(f"# {key}={ig.metadata[key]}\n")
    flat = ig.values.reshape(-1)
    counts = None if ig.counts is None else ig.counts.reshape(-1)
    if ig.ndim == 1:
        coords = [(v,) for v in ig.coords(0)]
    else:
        c1, c2 = np.meshgrid(ig.coords(0), ig.coords(1), indexing="ij")
        coords = list(zip(c1.reshape(-1), c2.reshape(-1)))
    for i, cs in enumerate(coords):
        row = ",".join(repr(float(c)) for c in cs) + f",{float(flat[i])!r}"
        if counts is not None:
            row += f",{float(counts[i])!r}"
        buf.write(row + "\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def read_interferogram_csv(path) -> Interferogram:
    axes: list[Axis] = []
    metadata: dict = {}
    rows: list[list[float]] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("axis"):
                    _, spec = body.split(" ", 1)
                    name, start, step, count = spec.split(",")
                    axes.append(Axis(name, float(start), float(step), int(count)))
                elif "=" in body:
                    key, val = body.split("=", 1)
                    metadata[key.strip()] = val.strip()
                continue
            rows.append([float(tok) for tok in line.split(",")])
    if not axes:
        raise ValueError(f"{path}: no axis headers found")
    shape = tuple(ax.count for ax in axes)
    data = np.asarray(rows)
    ncoord = len(axes)
    values = data[:, ncoord].reshape(shape)
    counts = data[:, ncoord + 1].reshape(shape) if data.shape[1] > ncoord + 1 else None
    return Interferogram(tuple(axes), values, counts=counts, metadata=metadata)
