"""Concrete qubit channels: the time evolutions whose steering traces we study.

Three physical models plus random Kraus channels for property tests:

* RabiDecay: coherent drive H = g1 (sigma_+ + sigma_-) with a Markovian
  dissipator at rate gamma1 on sigma_-; a time-homogeneous semigroup.
* Exchange: the qubit swaps excitation with a second (environment) qubit
  through H = J (sigma_+ sigma_- + sigma_- sigma_+), the environment starting
  excited; the system picks up an intrinsic decay gamma2. Tracing out the
  partner yields a strongly non-Markovian reduced evolution.
* LorentzianAD: amplitude damping driven by a Lorentzian reservoir. The
  exact solution is the G(t) map

      rho_ee -> |G|^2 rho_ee,   rho_eg -> G rho_eg,
      rho_gg -> rho_gg + (1 - |G|^2) rho_ee,

  with G(t) = exp(-w t/2) [cosh(bt/2) + (w/b) sinh(bt/2)],
  b = sqrt(w^2 - 2 g w), w the spectral width and g the coupling. The
  time-local rate gamma(t) = -(2/G) d|G|/dt goes negative past the zeros of
  G, which is the memory effect the steering measures pick up.

Master equations are integrated with fixed-step classical RK4 on the
vectorized generator; a closed-form propagator through the eigendecomposition
of the Liouvillian is provided as an independent cross-check. The G(t) map is
applied exactly, never by integrating gamma(t), which is singular at zeros
of G.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import hermat
from .errors import (
    BadParameter,
    NegativeTime,
    NumericalBreakdown,
    ValidationError,
)
from .steering import Assemblage, _from_stack, validate

# Base RK4 step in units of 1/(model rate); halving it moves outputs by
# well under 1e-9 for every model in the suite.
RK4_BASE_STEP = 5e-4


@dataclass(frozen=True)
class RabiDecay:
    g1: float
    gamma1: float = 0.0

    def __post_init__(self):
        if self.g1 < 0 or self.gamma1 < 0:
            raise BadParameter("rates must be non-negative")


@dataclass(frozen=True)
class Exchange:
    j: float
    gamma2: float = 0.0

    def __post_init__(self):
        if self.j < 0 or self.gamma2 < 0:
            raise BadParameter("rates must be non-negative")


@dataclass(frozen=True)
class LorentzianAD:
    g: float
    omega_w: float = 1.0

    def __post_init__(self):
        if self.omega_w <= 0:
            raise BadParameter(f"spectral width must be positive, got {self.omega_w}")
        if self.g < 0:
            raise BadParameter(f"coupling must be non-negative, got {self.g}")


class KrausChannel:
    """A single-shot CPT map given by its Kraus operators (time-independent)."""

    def __init__(self, operators):
        ops = tuple(np.asarray(k, dtype=complex) for k in operators)
        if not ops:
            raise BadParameter("need at least one Kraus operator")
        dim = ops[0].shape[0]
        total = sum(k.conj().T @ k for k in ops)
        if np.abs(total - np.eye(dim)).max() > 1e-10:
            raise BadParameter("Kraus operators do not satisfy sum K^dag K = I")
        self.operators = ops

    def __repr__(self):
        return f"KrausChannel(n={len(self.operators)})"


@dataclass
class Propagator:
    """Bundles a channel with its linear action rho(0) -> rho(t)."""

    channel: object

    def apply(self, t, rho):
        return apply_channel(self.channel, t, rho)


# --- generators and integrators ---------------------------------------------


def liouvillian(h, jumps):
    """Vectorized (row-major) generator of d rho/dt = -i[H,rho] + dissipators.

    jumps is a list of (operator, rate) pairs, each contributing
    rate * (K rho K^dag - {K^dag K, rho}/2).
    """
    h = np.asarray(h, dtype=complex)
    d = h.shape[0]
    idm = np.eye(d, dtype=complex)
    lmat = -1j * (np.kron(h, idm) - np.kron(idm, h.T))
    for op, rate in jumps:
        op = np.asarray(op, dtype=complex)
        kk = op.conj().T @ op
        lmat += rate * (
            np.kron(op, op.conj())
            - 0.5 * (np.kron(kk, idm) + np.kron(idm, kk.T))
        )
    return lmat


def _generator(ch):
    """Hamiltonian and jump list realizing the model on its carrier space."""
    if isinstance(ch, RabiDecay):
        h = ch.g1 * (hermat.SIGMA_PLUS + hermat.SIGMA_MINUS)
        return h, [(hermat.SIGMA_MINUS, ch.gamma1)]
    if isinstance(ch, Exchange):
        h = ch.j * (
            hermat.kron(hermat.SIGMA_PLUS, hermat.SIGMA_MINUS)
            + hermat.kron(hermat.SIGMA_MINUS, hermat.SIGMA_PLUS)
        )
        return h, [(hermat.kron(hermat.SIGMA_MINUS, hermat.IDENTITY), ch.gamma2)]
    raise BadParameter(f"no master-equation generator for {type(ch).__name__}")


def _rate_scale(ch):
    if isinstance(ch, RabiDecay):
        return ch.g1 + ch.gamma1
    if isinstance(ch, Exchange):
        return ch.j + ch.gamma2
    return 1.0


def rk4_evolve(lmat, vecs, t, h_target):
    """Integrate dv/dt = L v for time t with fixed-step RK4."""
    if t == 0.0:
        return vecs.copy()
    n = max(1, math.ceil(t / h_target))
    h = t / n
    v = vecs.copy()
    for _ in range(n):
        k1 = lmat @ v
        k2 = lmat @ (v + 0.5 * h * k1)
        k3 = lmat @ (v + 0.5 * h * k2)
        k4 = lmat @ (v + h * k3)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return v


def eig_propagate(lmat, t, vecs):
    """exp(L t) applied through the eigendecomposition of the Liouvillian.

    Cross-check path; the Liouvillians here are diagonalizable.
    """
    w, v = np.linalg.eig(lmat)
    coeff = np.linalg.solve(v, vecs)
    return v @ (np.exp(w * t)[:, None] * coeff)


def _check_time(t):
    if t < 0:
        raise NegativeTime(f"evolution time must be non-negative, got {t}")


# --- model applications ------------------------------------------------------

_ENV_EXCITED = np.outer(hermat.KET_E, hermat.KET_E.conj())


def rabi_decay_apply(g1, gamma1, t, rho):
    """Solve the driven-decay master equation from rho at time 0 to time t."""
    ch = RabiDecay(g1, gamma1)
    _check_time(t)
    rho = np.asarray(rho, dtype=complex)
    lmat = liouvillian(*_generator(ch))
    h_target = RK4_BASE_STEP / max(1.0, _rate_scale(ch))
    out = rk4_evolve(lmat, rho.reshape(4, 1), t, h_target)
    return out.reshape(2, 2)


def exchange_apply(j, gamma2, t, rho):
    """Couple rho to an initially excited partner qubit, evolve, trace it out."""
    ch = Exchange(j, gamma2)
    _check_time(t)
    rho = np.asarray(rho, dtype=complex)
    joint = hermat.kron(rho, _ENV_EXCITED)
    lmat = liouvillian(*_generator(ch))
    h_target = RK4_BASE_STEP / max(1.0, _rate_scale(ch))
    out = rk4_evolve(lmat, joint.reshape(16, 1), t, h_target).reshape(4, 4)
    return hermat.partial_trace(out, keep=1)


def _sinhc(z):
    """sinh(z)/z, series near the origin so the b -> 0 limit is smooth."""
    z = complex(z)
    if abs(z) < 1e-4:
        z2 = z * z
        return 1.0 + z2 / 6.0 + z2 * z2 / 120.0
    return np.sinh(z) / z


def _lorentzian_b(g, omega_w):
    if omega_w <= 0:
        raise BadParameter(f"spectral width must be positive, got {omega_w}")
    if g < 0:
        raise BadParameter(f"coupling must be non-negative, got {g}")
    return complex(np.sqrt(complex(omega_w * omega_w - 2.0 * g * omega_w)))


def _as_real(value, what):
    if abs(value.imag) > 1e-12:
        raise NumericalBreakdown(f"{what} acquired imaginary part {value.imag:.3e}")
    return float(value.real)


def lorentzian_G(g, omega_w, t):
    """Memory amplitude G(t) of the Lorentzian-reservoir damping channel.

    b is evaluated in complex arithmetic throughout, so the underdamped
    regime (2 g > omega_w, b imaginary) needs no case split; the result is
    real either way.
    """
    _check_time(t)
    b = _lorentzian_b(g, omega_w)
    half = 0.5 * t
    val = np.exp(-omega_w * half) * (np.cosh(b * half) + omega_w * half * _sinhc(b * half))
    return _as_real(complex(val), "G(t)")


def lorentzian_G_derivative(g, omega_w, t):
    """dG/dt in closed form: -(g w t / 2) sinhc(b t / 2) exp(-w t / 2)."""
    _check_time(t)
    b = _lorentzian_b(g, omega_w)
    half = 0.5 * t
    val = -g * omega_w * half * _sinhc(b * half) * np.exp(-omega_w * half)
    return _as_real(complex(val), "dG/dt")


def lorentzian_gamma(g, omega_w, t):
    """Time-local decay rate gamma(t) = -2 d log|G|/dt = -2 G'/G.

    This is the rate for which rho_ee(t) = |G|^2 rho_ee(0) solves
    d rho_ee/dt = -gamma(t) rho_ee at all times; it turns negative exactly
    while |G| grows (information backflow), e.g. just past a zero of G.
    Undefined at zeros of G.
    """
    from .errors import SingularAtZeroOfG

    gval = lorentzian_G(g, omega_w, t)
    if abs(gval) < 1e-12:
        raise SingularAtZeroOfG(f"G({t}) = {gval:.3e}")
    dg = lorentzian_G_derivative(g, omega_w, t)
    return -2.0 * dg / gval


def lorentzian_apply(g, omega_w, t, rho):
    """Exact amplitude-damping map with memory amplitude G(t)."""
    LorentzianAD(g, omega_w)
    _check_time(t)
    rho = np.asarray(rho, dtype=complex)
    gval = lorentzian_G(g, omega_w, t)
    return _g_map(gval, rho)


def _g_map(gval, rho):
    out = np.empty_like(rho, dtype=complex)
    a2 = gval * np.conj(gval)
    out[0, 0] = a2 * rho[0, 0]
    out[0, 1] = gval * rho[0, 1]
    out[1, 0] = np.conj(gval) * rho[1, 0]
    out[1, 1] = rho[1, 1] + (1.0 - a2) * rho[0, 0]
    return out


def kraus_apply(ops, rho):
    rho = np.asarray(rho, dtype=complex)
    return sum(k @ rho @ k.conj().T for k in ops)


def random_kraus_channel(seed, n_kraus):
    """Seeded random CPT channel built from a Haar-like isometry."""
    if n_kraus < 1:
        raise BadParameter(f"need n_kraus >= 1, got {n_kraus}")
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(2 * n_kraus, 2)) + 1j * rng.normal(size=(2 * n_kraus, 2))
    q, r = np.linalg.qr(raw)
    # Fix the phase convention so the map is a deterministic function of seed.
    q = q * np.sign(np.diag(r))[None, :]
    return KrausChannel(tuple(q[2 * i: 2 * i + 2, :] for i in range(n_kraus)))


def apply_channel(ch, t, rho):
    """Dispatch rho(0) -> rho(t) for any channel variant."""
    _check_time(t)
    rho = np.asarray(rho, dtype=complex)
    if isinstance(ch, RabiDecay):
        return rabi_decay_apply(ch.g1, ch.gamma1, t, rho)
    if isinstance(ch, Exchange):
        return exchange_apply(ch.j, ch.gamma2, t, rho)
    if isinstance(ch, LorentzianAD):
        return lorentzian_apply(ch.g, ch.omega_w, t, rho)
    if isinstance(ch, KrausChannel):
        return kraus_apply(ch.operators, rho)
    raise BadParameter(f"unknown channel {ch!r}")


def choi_matrix(ch, t):
    """Unnormalized Choi matrix sum_ij |i><j| (x) Lambda(|i><j|); PSD iff CP."""
    blocks = []
    for i in range(2):
        row = []
        for jj in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, jj] = 1.0
            row.append(apply_channel(ch, t, e))
        blocks.append(row)
    return np.block(blocks)


def propagate_assemblage(ch, t, asm: Assemblage) -> Assemblage:
    """Evolve every member of an assemblage independently to time t.

    Positivity, Hermiticity, and total trace of the output are enforced at
    1e-8. Setting-dependent reduced states are tolerated: premeasuring any
    state other than I/2 dephases differently in different bases, so only
    maximally-mixed inputs produce non-signaling families in the first place.
    """
    _check_time(t)
    stack = asm.stacked()
    out = np.array([apply_channel(ch, t, m) for m in stack])
    new = _from_stack(asm.labels, out, time_tag=t)
    hard = [v for v in validate(new, 1e-8) if v.kind != "non-signaling"]
    if hard:
        raise ValidationError(hard)
    return new


def evolve_grid(ch, mats, times):
    """Evolve a stack of matrices across an increasing time grid.

    Returns an array of shape (len(times), len(mats), 2, 2). Master-equation
    models step incrementally between grid points (embedding happens once at
    t=0 for the Exchange model); closed-form models evaluate each point
    exactly.
    """
    times = np.asarray(times, dtype=float)
    if times.size and times[0] < 0:
        raise NegativeTime("grid must start at a non-negative time")
    if np.any(np.diff(times) < 0):
        raise BadParameter("time grid must be non-decreasing")
    mats = np.asarray(mats, dtype=complex)
    n = mats.shape[0]

    if isinstance(ch, (LorentzianAD, KrausChannel)):
        out = np.empty((times.size, n, 2, 2), dtype=complex)
        for i, t in enumerate(times):
            for k in range(n):
                out[i, k] = apply_channel(ch, t, mats[k])
        return out

    lmat = liouvillian(*_generator(ch))
    h_target = RK4_BASE_STEP / max(1.0, _rate_scale(ch))
    if isinstance(ch, Exchange):
        carrier = np.stack([hermat.kron(m, _ENV_EXCITED).reshape(16) for m in mats], axis=1)
        read = lambda v: hermat.partial_trace(v.reshape(4, 4), keep=1)
    else:
        carrier = np.stack([m.reshape(4) for m in mats], axis=1)
        read = lambda v: v.reshape(2, 2)

    out = np.empty((times.size, n, 2, 2), dtype=complex)
    t_prev = 0.0
    for i, t in enumerate(times):
        carrier = rk4_evolve(lmat, carrier, t - t_prev, h_target)
        t_prev = t
        for k in range(n):
            out[i, k] = read(carrier[:, k])
    return out
