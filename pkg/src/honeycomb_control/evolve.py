"""Heisenberg-picture propagation of the c-Majoranas under ramp pulses.

For a constant ramp value the Majoranas evolve as ``c -> expm(dt * A(f)) c``.
Exponentials go through ``eigh`` of the Hermitian matrix ``i A(f)`` so every
step is orthogonal to machine precision and the same eigenbasis gives exact
derivatives.  The frozen b-Majorana block is the identity and is accounted
for analytically in :func:`heisenberg_fidelity`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fermion import CouplingModel

_CHUNK = 1 << 14


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class Pulse:
    duration: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.atleast_1d(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "values", vals)
        if self.duration < 0 or not math.isfinite(self.duration):
            raise ValueError("pulse duration must be finite and non-negative")
        if vals.size < 1:
            raise ValueError("a pulse needs at least one segment")
        if not np.all(np.isfinite(vals)):
            raise ValueError("pulse values must be finite")

    @property
    def n_segments(self) -> int:
        return self.values.size

    @property
    def dt(self) -> float:
        return self.duration / self.n_segments

    @classmethod
    def linear_ramp(cls, duration: float, n_segments: int) -> "Pulse":
        """``f(t) = t / T`` sampled at segment midpoints."""
        return cls(duration, (np.arange(n_segments) + 0.5) / n_segments)

    def repeated(self, factor: int) -> "Pulse":
        """Same control with every segment split into ``factor`` equal pieces."""
        return Pulse(self.duration, np.repeat(self.values, factor))

    def to_dict(self) -> dict:
        return {"duration": self.duration, "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Pulse":
        return cls(float(d["duration"]), np.asarray(d["values"], dtype=float))


@dataclass
class Propagator:
    matrix: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def save(self, path) -> None:
        if str(path).endswith(".csv"):
            np.savetxt(path, self.matrix, delimiter=",", fmt="%.17g")
        else:
            np.save(path, self.matrix)


def _as_array(p) -> np.ndarray:
    return p.matrix if isinstance(p, Propagator) else np.asarray(p)


def step_eigensystem(model: CouplingModel, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of ``i A(f_k)`` for every ramp value (batched)."""
    values = np.asarray(values, dtype=float)
    h = 1j * (model.A0[None, :, :] + values[:, None, None] * model.Ac[None, :, :])
    return np.linalg.eigh(h)


def steps_from_eigensystem(lam: np.ndarray, V: np.ndarray, dt: float) -> np.ndarray:
    phases = np.exp(-1j * dt * lam)
    return np.real(np.einsum("kij,kj,klj->kil", V, phases, V.conj()))


def divided_differences(lam: np.ndarray, dt: float) -> np.ndarray:
    """Kernel ``G_ab`` of the derivative of ``exp(-i dt h)`` in the eigenbasis of ``h``.

    ``G_ab = (e^{-i dt l_a} - e^{-i dt l_b}) / (l_a - l_b)``, written through
    ``sinc`` so coincident eigenvalues give the confluent limit
    ``-i dt e^{-i dt l_a}`` without branching.
    """
    la = lam[..., :, None]
    lb = lam[..., None, :]
    return -1j * dt * np.exp(-0.5j * dt * (la + lb)) * np.sinc(dt * (la - lb) / (2 * np.pi))


def _chain_product(mats: np.ndarray) -> np.ndarray:
    """``mats[-1] @ ... @ mats[0]`` by pairwise (tree) reduction."""
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            last = mats[-1]
            mats = mats[:-1]
            mats = np.matmul(mats[1::2], mats[0::2])
            mats[-1] = last @ mats[-1]
        else:
            mats = np.matmul(mats[1::2], mats[0::2])
    return mats[0]


def segment_step(model: CouplingModel, f: float, dt: float) -> Propagator:
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt == 0:
        return Propagator(np.eye(model.n), {"f": f, "dt": dt})
    lam, V = step_eigensystem(model, np.array([f]))
    return Propagator(steps_from_eigensystem(lam, V, dt)[0], {"f": f, "dt": dt})


def propagate(model: CouplingModel, pulse: Pulse) -> Propagator:
    """Time-ordered product ``O_n ... O_1`` (later segments on the left)."""
    O = np.eye(model.n)
    if pulse.duration > 0:
        for start in range(0, pulse.n_segments, _CHUNK):
            vals = pulse.values[start:start + _CHUNK]
            lam, V = step_eigensystem(model, vals)
            O = _chain_product(steps_from_eigensystem(lam, V, pulse.dt)) @ O
    return Propagator(O, {"duration": pulse.duration, "n_segments": pulse.n_segments})


def _magnus4_linear_ramp(model: CouplingModel, T: float, n: int) -> np.ndarray:
    """Fourth-order Magnus integration of the exact linear ramp ``f = t/T``."""
    dt = T / n
    gauss = np.array([0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6])
    comm = model.Ac @ model.A0 - model.A0 @ model.Ac
    O = np.eye(model.n)
    for start in range(0, n, _CHUNK):
        k = np.arange(start, min(n, start + _CHUNK))
        f1 = (k + gauss[0]) / n
        f2 = (k + gauss[1]) / n
        fm = 0.5 * (f1 + f2)
        omega = dt * (model.A0[None] + fm[:, None, None] * model.Ac[None])
        omega = omega + (math.sqrt(3) / 12) * dt**2 * (f2 - f1)[:, None, None] * comm[None]
        lam, V = np.linalg.eigh(1j * omega)
        O = _chain_product(steps_from_eigensystem(lam, V, 1.0)) @ O
    return O


def linear_ramp_propagator(model: CouplingModel, T: float, n: int, method: str = "magnus4") -> np.ndarray:
    if method == "magnus4":
        return _magnus4_linear_ramp(model, T, n)
    if method == "midpoint":
        return propagate(model, Pulse.linear_ramp(T, n)).matrix
    raise ValueError(f"unknown ramp integrator {method!r}")


_TARGET_CACHE: dict[tuple, Propagator] = {}


def adiabatic_target(
    model: CouplingModel,
    T_ad: float,
    n_ad: int | None = None,
    *,
    method: str = "magnus4",
    tol: float = 1e-10,
    max_segments: int = 1 << 22,
    use_cache: bool = True,
) -> Propagator:
    """Propagator of the linear ramp over ``T_ad``.

    With ``n_ad`` given the ramp is integrated once with that many segments.
    Otherwise the segment count doubles until two successive results differ by
    less than ``tol`` in Frobenius norm.
    """
    if T_ad <= 0:
        raise ValueError("T_ad must be positive")
    key = (model.key(), float(T_ad), n_ad, method, tol)
    if use_cache and key in _TARGET_CACHE:
        return _TARGET_CACHE[key]
    if n_ad is not None:
        O = linear_ramp_propagator(model, T_ad, n_ad, method)
        meta = {"T_ad": T_ad, "n_ad": n_ad, "method": method}
    else:
        scale = max(1.0, np.linalg.norm(model.A0, 2) + np.linalg.norm(model.Ac, 2))
        n = max(16, int(2 ** math.ceil(math.log2(T_ad * scale))))
        prev = linear_ramp_propagator(model, T_ad, n, method)
        history = []
        while True:
            n *= 2
            if n > max_segments:
                raise ConvergenceError(
                    f"adiabatic target did not converge to {tol:g} within {max_segments} segments; "
                    f"last changes {history[-4:]}"
                )
            cur = linear_ramp_propagator(model, T_ad, n, method)
            change = float(np.linalg.norm(cur - prev))
            history.append((n, change))
            prev = cur
            if change < tol:
                break
        # the exact propagator is orthogonal: drop the accumulated rounding via the polar factor
        u, _, vt = np.linalg.svd(cur)
        O = u @ vt
        meta = {"T_ad": T_ad, "n_ad": n, "method": method, "last_change": change, "history": history}
    result = Propagator(O, meta)
    if use_cache:
        _TARGET_CACHE[key] = result
    return result


def clear_target_cache() -> None:
    _TARGET_CACHE.clear()


def trace_overlap(target, actual) -> float:
    """``N + Tr(O_target^T O_actual)``: the overlap of the full 2N-dimensional propagators."""
    Ot, Oa = _as_array(target), _as_array(actual)
    if Ot.shape != Oa.shape:
        raise ValueError(f"dimension mismatch: {Ot.shape} vs {Oa.shape}")
    return Ot.shape[0] + float(np.sum(Ot * Oa))


def heisenberg_fidelity(target, actual) -> float:
    n = _as_array(target).shape[0]
    return abs(trace_overlap(target, actual)) / (2 * n)


def heisenberg_infidelity(target, actual) -> float:
    return 1.0 - heisenberg_fidelity(target, actual)


def orthogonality_defect(O) -> float:
    O = _as_array(O)
    return float(np.linalg.norm(O.T @ O - np.eye(O.shape[0])))
