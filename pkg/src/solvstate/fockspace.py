"""Truncated Fock-basis ladder algebra and the displacement-operator oracle.

The raising/lowering operators of a solvable spectrum act on eigenstates as

    a- |psi_n> = sqrt(E_n)     e^{+i alpha (E_n - E_{n-1})} |psi_{n-1}>
    a+ |psi_n> = sqrt(E_{n+1}) e^{-i alpha (E_{n+1} - E_n)} |psi_{n+1}>

so a+ a- = diag(E_n) and [a-, a+] acts as E_{n+1} - E_n. Matrices here are
dense despite the bidiagonal structure: truncation orders stay in the
hundreds and clarity wins; `apply` exploits nothing either, it is a matvec.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .spectrum import Spectrum

__all__ = ["LadderRep", "FockState", "build_ladder", "displace_ground", "apply",
           "max_truncation"]


def max_truncation(default: int = 2048) -> int:
    """Truncation cap, overridable through SOLVSTATE_MAX_N."""
    raw = os.environ.get("SOLVSTATE_MAX_N")
    if raw is None:
        return default
    try:
        return max(4, int(raw))
    except ValueError:
        raise DomainError(f"SOLVSTATE_MAX_N must be an integer, got {raw!r}")


@dataclass(frozen=True)
class LadderRep:
    """Dense matrices of a-, a+ and a0 on levels 0..N (shape (N+1, N+1))."""

    N: int
    alpha: float
    a_minus: np.ndarray
    a_plus: np.ndarray
    a_zero: np.ndarray


@dataclass(frozen=True)
class FockState:
    """Coefficient vector over the shifted basis {|psi_{n+offset}>}.

    coefficients[n] multiplies |psi_{n+offset}>. tail_bound estimates the
    squared-norm mass that truncation discarded beyond the last coefficient;
    a state built under a tail budget eps is "converged" iff
    tail_bound <= eps.
    """

    offset: int
    coefficients: np.ndarray
    alpha: float
    tail_bound: float

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def size(self) -> int:
        return len(self.coefficients)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def normalized(self) -> "FockState":
        n = self.norm()
        if n == 0.0:
            raise DomainError("cannot normalize the zero state")
        return FockState(self.offset, self.coefficients / n, self.alpha, self.tail_bound)

    def embed(self, dim: int) -> np.ndarray:
        """Coefficients on the absolute basis |psi_0..psi_{dim-1}>."""
        if self.offset + self.size > dim:
            raise DomainError(
                f"state occupies levels up to {self.offset + self.size - 1}, "
                f"embedding dimension {dim} is too small"
            )
        v = np.zeros(dim, dtype=complex)
        v[self.offset:self.offset + self.size] = self.coefficients
        return v

    def inner(self, other: "FockState") -> complex:
        """<self|other>, aligning the two offsets on the absolute basis."""
        dim = max(self.offset + self.size, other.offset + other.size)
        return complex(np.vdot(self.embed(dim), other.embed(dim)))

    def to_json_dict(self) -> dict:
        return {
            "offset": self.offset,
            "alpha": self.alpha,
            "coefficients": [[float(c.real), float(c.imag)] for c in self.coefficients],
            "tail_bound": float(self.tail_bound),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "FockState":
        coeffs = np.array([complex(re, im) for re, im in obj["coefficients"]])
        return cls(int(obj["offset"]), coeffs, float(obj["alpha"]),
                   float(obj["tail_bound"]))

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, text: str) -> "FockState":
        return cls.from_json_dict(json.loads(text))


def build_ladder(spec: Spectrum, alpha: float, N: int) -> LadderRep:
    """Ladder matrices on levels 0..N; requires N >= 2.

    a+ is constructed as the exact conjugate transpose of a-, so adjointness
    holds to the bit. The last row/column carries the unavoidable truncation
    edge; identities should be checked on the leading block only.
    """
    if N < 2:
        raise DomainError(f"build_ladder needs N >= 2, got {N}")
    dim = N + 1
    energies = np.array([spec.energy(n) for n in range(dim)])
    a_minus = np.zeros((dim, dim), dtype=complex)
    for n in range(1, dim):
        a_minus[n - 1, n] = math.sqrt(energies[n]) * np.exp(
            1j * alpha * (energies[n] - energies[n - 1])
        )
    a_plus = a_minus.conj().T.copy()
    a_zero = np.zeros((dim, dim), dtype=complex)
    diffs = np.diff(energies)
    a_zero[np.arange(dim - 1), np.arange(dim - 1)] = diffs
    # the top diagonal entry needs E_{N+1}; a finite table may not have it,
    # and that entry is truncation edge anyway
    try:
        a_zero[dim - 1, dim - 1] = spec.energy(dim) - energies[-1]
    except DomainError:
        a_zero[dim - 1, dim - 1] = diffs[-1]
    return LadderRep(N, float(alpha), a_minus, a_plus, a_zero)


def apply(op: np.ndarray, state: FockState) -> FockState:
    """Matrix-vector action of `op` (absolute-basis matrix) on `state`.

    The returned state lives on offset 0. The tail bound is propagated
    conservatively, amplified by the largest squared column norm of `op`.
    """
    dim = op.shape[0]
    if op.shape[0] != op.shape[1]:
        raise DomainError(f"operator must be square, got {op.shape}")
    v = state.embed(dim)
    w = op @ v
    col_gain = float(np.max(np.sum(np.abs(op) ** 2, axis=0))) if dim else 0.0
    return FockState(0, w, state.alpha, state.tail_bound * max(col_gain, 1.0))


def _taylor_displace(spec, Z, alpha, N, max_steps=4000):
    """Truncated Taylor action of exp(Z a+ - conj(Z) a-) on |psi_0>.

    The generator is split into substeps of spectral norm <= ~5 and each
    substep is applied as a plain Taylor series on the evolving vector, so
    no partial sum ever grows past ~e^5 and the alternating-series
    cancellation stays harmless (still vector-only: no matrix exponential,
    no squaring). Returns (vector, tail estimate); tail is +inf when a
    series exhausted its term budget, went non-finite, or the step count
    needed exceeds max_steps.
    """
    rep = build_ladder(spec, alpha, N)
    gen = Z * rep.a_plus - np.conj(Z) * rep.a_minus
    gen_norm = 2.0 * np.max(np.abs(gen))
    steps = max(1, math.ceil(gen_norm / 5.0))
    if steps > max_steps:
        return np.zeros(N + 1, dtype=complex), math.inf
    step_gen = gen / steps
    v = np.zeros(N + 1, dtype=complex)
    v[0] = 1.0
    for _ in range(steps):
        term = v.copy()
        acc = v.copy()
        small = 0
        done = False
        for j in range(1, 120):
            term = step_gen @ term / j
            acc = acc + term
            tn = np.linalg.norm(term)
            if not math.isfinite(tn):
                return acc, math.inf
            if tn < 1e-16 * np.linalg.norm(acc):
                small += 1
                if small >= 5:
                    done = True
                    break
            else:
                small = 0
        if not done:
            return acc, math.inf
        v = acc
    edge = float(np.sum(np.abs(v[-3:]) ** 2))
    norm2 = float(np.vdot(v, v).real)
    return v, abs(1.0 - norm2) + edge


def displace_ground(spec: Spectrum, Z: complex, alpha: float = 0.0,
                    N: int = 64, tail_eps: float = 1e-12,
                    cap: int | None = None) -> FockState:
    """exp(Z a+ - conj(Z) a-) |psi_0> by direct Taylor action on the vector.

    The generator is anti-Hermitian, so the exact result is unit norm; the
    measured norm deficit plus the mass parked in the top rows estimates the
    truncation tail. N doubles until the estimate drops below `tail_eps`,
    stops improving (the rounding floor of the alternating Taylor sum), or
    hits the cap; the best attempt is returned and its tail_bound tells the
    truth either way (callers decide whether missing the budget is fatal).
    """
    cap = cap or max_truncation()
    N = max(8, N)
    Z = complex(Z)
    best_v, best_tail = None, math.inf
    while True:
        v, tail = _taylor_displace(spec, Z, alpha, N)
        improved = tail < 0.5 * best_tail
        if tail < best_tail or best_v is None:
            best_v, best_tail = v, min(tail, 1.0)
        if best_tail <= tail_eps or not improved or 2 * N > cap:
            break
        N *= 2
    nrm = float(np.linalg.norm(best_v))
    if not math.isfinite(nrm) or nrm == 0.0:
        raise ConvergenceError(
            f"displacement Taylor sum produced no usable digits for "
            f"|Z| = {abs(Z):.3g}"
        )
    return FockState(0, best_v / nrm, float(alpha), best_tail)
