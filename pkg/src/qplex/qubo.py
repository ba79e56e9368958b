"""Model -> QUBO conversion (binary encoding, slack variables, quadratic penalties),
QUBO <-> Ising mapping, and decoding of bitstrings back to model variables.

Bit convention: bit ``i`` of a bitstring is character ``i`` of the string and
QUBO variable ``i``. Spin convention: ``x = (1 - z) / 2`` so bit 0 <-> spin +1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import ConversionError
from .model import Model, check_feasible

Bits = str | Sequence[int]


@dataclass(frozen=True)
class Qubo:
    """Minimization-form QUBO: offset + sum linear_i b_i + sum_{i<j} q_ij b_i b_j."""

    n: int
    linear: tuple[float, ...]
    quadratic: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self):
        if len(self.linear) != self.n:
            raise ConversionError(f"linear vector has length {len(self.linear)}, expected {self.n}")
        for i, j in self.quadratic:
            if not 0 <= i < j < self.n:
                raise ConversionError(f"invalid quadratic index ({i}, {j}) for n={self.n}")

    def matrix(self) -> np.ndarray:
        """Upper-triangular matrix with the linear terms on the diagonal."""
        m = np.diag(np.asarray(self.linear, dtype=float)) if self.n else np.zeros((0, 0))
        for (i, j), c in self.quadratic.items():
            m[i, j] = c
        return m

    def energies(self, bits: np.ndarray) -> np.ndarray:
        """Energies for a (rows, n) 0/1 array."""
        b = np.asarray(bits, dtype=float)
        lin = b @ np.asarray(self.linear, dtype=float) if self.n else np.zeros(len(b))
        out = self.offset + lin
        for (i, j), c in self.quadratic.items():
            out = out + c * b[:, i] * b[:, j]
        return out


@dataclass(frozen=True)
class BitEncoding:
    name: str
    terms: tuple[tuple[int, float], ...]
    base: float
    slack: bool = False

    def value(self, bits: Sequence[int]) -> float:
        return self.base + sum(c * bits[k] for k, c in self.terms)


@dataclass(frozen=True)
class ConversionResult:
    qubo: Qubo
    encodings: tuple[BitEncoding, ...]
    penalty: float
    objective_sign: int
    objective_offset_correction: float
    model: Model
    # each penalized equality g(bits) = const + sum coef*bit, one per constraint
    residuals: tuple[tuple[float, dict[int, float]], ...] = ()

    @property
    def num_original(self) -> int:
        return sum(1 for e in self.encodings if not e.slack)

    def residual_values(self, bits: Bits) -> list[float]:
        b = _bits(bits, self.qubo.n)
        return [const + sum(c * b[k] for k, c in coefs.items()) for const, coefs in self.residuals]

    def satisfies_penalties(self, bits: Bits, tol: float = 1e-9) -> bool:
        """True when every penalized equality (slacks included) is exactly met."""
        return all(abs(r) <= tol for r in self.residual_values(bits))

    def to_dict(self) -> dict[str, Any]:
        d = qubo_to_dict(self.qubo)
        d["penalty"] = self.penalty
        d["objective_sign"] = self.objective_sign
        d["encodings"] = [
            {"name": e.name, "base": e.base, "terms": [[k, c] for k, c in e.terms], "slack": e.slack}
            for e in self.encodings
        ]
        return d


@dataclass(frozen=True)
class IsingModel:
    """offset + sum h_i z_i + sum_{i<j} J_ij z_i z_j with z in {+1, -1}."""

    n: int
    h: tuple[float, ...]
    J: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0


def _bits(bits: Bits, n: int) -> list[int]:
    if isinstance(bits, str):
        if any(ch not in "01" for ch in bits):
            raise ValueError(f"bitstring may only contain 0 and 1: {bits!r}")
        out = [1 if ch == "1" else 0 for ch in bits]
    else:
        out = [int(b) for b in bits]
        if any(b not in (0, 1) for b in out):
            raise ValueError("bits must be 0 or 1")
    if len(out) != n:
        raise ValueError(f"bitstring length {len(out)} does not match {n} variables")
    return out


def bits_to_str(bits: Sequence[int]) -> str:
    return "".join("1" if b else "0" for b in bits)


def range_coefficients(span: float) -> list[float]:
    """Bit weights covering exactly [0, span]: 1, 2, ..., 2^(k-2), then the remainder."""
    if span <= 0:
        return []
    k = int(math.ceil(span)).bit_length()
    coefs = [float(2**i) for i in range(k - 1)]
    coefs.append(float(span - (2 ** (k - 1) - 1)))
    return coefs


class _Poly:
    """Quadratic pseudo-boolean polynomial accumulator over bit indices."""

    def __init__(self, n: int):
        self.const = 0.0
        self.lin = [0.0] * n
        self.quad: dict[tuple[int, int], float] = {}

    def add_affine(self, aff, scale: float) -> None:
        const, terms = aff
        self.const += scale * const
        for k, c in terms.items():
            self.lin[k] += scale * c

    def add_product(self, a, b, scale: float) -> None:
        ca, ta = a
        cb, tb = b
        self.const += scale * ca * cb
        for k, c in tb.items():
            self.lin[k] += scale * ca * c
        for k, c in ta.items():
            self.lin[k] += scale * cb * c
        for k, c1 in ta.items():
            for m, c2 in tb.items():
                w = scale * c1 * c2
                if k == m:
                    self.lin[k] += w  # b*b == b
                else:
                    key = (k, m) if k < m else (m, k)
                    self.quad[key] = self.quad.get(key, 0.0) + w

    def to_qubo(self) -> Qubo:
        quad = {k: self.quad[k] for k in sorted(self.quad) if self.quad[k] != 0.0}
        return Qubo(len(self.lin), tuple(float(c) for c in self.lin), quad, float(self.const))


def default_penalty(model: Model) -> float:
    expr = model.objective.expr
    return 1.0 + abs(expr.constant) + sum(abs(c) for c in expr.linear.values()) + sum(
        abs(c) for c in expr.quadratic.values()
    )


def to_qubo(model: Model, penalty: float | None = None) -> ConversionResult:
    """Convert a discrete model into a minimization QUBO.

    Integer variables are binary-encoded over their bounds, inequalities get an
    integer slack turning them into equalities, and every equality ``g = 0`` is
    added to the (minimization-sense) objective as ``penalty * g**2``.
    """
    for v in model.variables:
        if not v.is_discrete:
            raise ConversionError(f"continuous variable {v.name!r} cannot be mapped to a QUBO")
        if not (math.isfinite(v.lower) and math.isfinite(v.upper)):
            raise ConversionError(f"variable {v.name!r} has a non-finite bound")
    lam = default_penalty(model) if penalty is None else float(penalty)
    if not math.isfinite(lam) or lam < 0:
        raise ConversionError(f"penalty must be a finite nonnegative number, got {penalty!r}")

    encodings: list[BitEncoding] = []
    nbits = 0
    for v in model.variables:
        coefs = range_coefficients(v.upper - v.lower)
        terms = tuple((nbits + k, c) for k, c in enumerate(coefs))
        nbits += len(coefs)
        encodings.append(BitEncoding(v.name, terms, v.lower))
    var_aff = [(e.base, dict(e.terms)) for e in encodings]

    # normalized equalities: (affine in original variables, slack span or None)
    rows = []
    for con in model.constraints:
        coefs = dict(con.lhs.linear)
        rhs = con.rhs
        if con.sense == ">=":
            coefs = {i: -a for i, a in coefs.items()}
            rhs = -rhs
        low = sum(min(a * model.variables[i].lower, a * model.variables[i].upper) for i, a in coefs.items())
        high = sum(max(a * model.variables[i].lower, a * model.variables[i].upper) for i, a in coefs.items())
        if con.sense == "==":
            if rhs < low - 1e-9 or rhs > high + 1e-9:
                raise ConversionError(f"constraint {con.name!r} cannot be satisfied within the variable bounds")
            rows.append((con.name, coefs, rhs, None))
            continue
        if all(a == round(a) for a in coefs.values()):
            # integral left-hand side: tighten so the slack stays integral
            rhs = math.floor(rhs + 1e-9)
        if rhs < low - 1e-9:
            raise ConversionError(f"constraint {con.name!r} cannot be satisfied within the variable bounds")
        rows.append((con.name, coefs, rhs, max(0.0, rhs - low)))

    residual_forms = []
    for name, coefs, rhs, span in rows:
        const = -rhs
        terms: dict[int, float] = {}
        for i, a in coefs.items():
            base, bits = var_aff[i]
            const += a * base
            for k, c in bits.items():
                terms[k] = terms.get(k, 0.0) + a * c
        if span is not None:
            scoefs = range_coefficients(span)
            sterms = tuple((nbits + k, c) for k, c in enumerate(scoefs))
            nbits += len(scoefs)
            encodings.append(BitEncoding(f"slack[{name}]", sterms, 0.0, slack=True))
            for k, c in sterms:
                terms[k] = c
        residual_forms.append((const, terms))

    sign = -1 if model.maximize else 1
    poly = _Poly(nbits)
    expr = model.objective.expr
    poly.const += sign * expr.constant
    for i, c in expr.linear.items():
        poly.add_affine(var_aff[i], sign * c)
    for (i, j), c in expr.quadratic.items():
        poly.add_product(var_aff[i], var_aff[j], sign * c)
    for form in residual_forms:
        poly.add_product(form, form, lam)

    return ConversionResult(
        qubo=poly.to_qubo(),
        encodings=tuple(encodings),
        penalty=lam,
        objective_sign=sign,
        objective_offset_correction=0.0,
        model=model,
        residuals=tuple(residual_forms),
    )


def decode(result: ConversionResult, bits: Bits, include_slack: bool = False) -> dict[str, float]:
    b = _bits(bits, result.qubo.n)
    return {e.name: e.value(b) for e in result.encodings if include_slack or not e.slack}


def is_feasible_bits(result: ConversionResult, bits: Bits) -> bool:
    """Decoded assignment satisfies the original model."""
    return check_feasible(result.model, decode(result, bits))


def qubo_energy(q: Qubo, bits: Bits) -> float:
    b = _bits(bits, q.n)
    total = q.offset
    for i, c in enumerate(q.linear):
        if b[i]:
            total += c
    for (i, j), c in q.quadratic.items():
        if b[i] and b[j]:
            total += c
    return total


def to_ising(q: Qubo) -> IsingModel:
    h = [-c / 2.0 for c in q.linear]
    J: dict[tuple[int, int], float] = {}
    offset = q.offset + sum(q.linear) / 2.0
    for (i, j), c in q.quadratic.items():
        J[(i, j)] = c / 4.0
        h[i] -= c / 4.0
        h[j] -= c / 4.0
        offset += c / 4.0
    J = {k: v for k, v in J.items() if v != 0.0}
    return IsingModel(q.n, tuple(h), J, offset)


def ising_energy(m: IsingModel, spins: Sequence[int]) -> float:
    z = list(spins)
    if len(z) != m.n:
        raise ValueError(f"expected {m.n} spins, got {len(z)}")
    if any(s not in (1, -1) for s in z):
        raise ValueError("spins must be +1 or -1")
    total = m.offset + sum(hi * zi for hi, zi in zip(m.h, z))
    for (i, j), c in m.J.items():
        total += c * z[i] * z[j]
    return total


def bits_to_spins(bits: Bits) -> list[int]:
    b = bits if not isinstance(bits, str) else [1 if ch == "1" else 0 for ch in bits]
    return [1 - 2 * int(x) for x in b]


def qubo_to_dict(q: Qubo) -> dict[str, Any]:
    return {
        "n": q.n,
        "linear": list(q.linear),
        "quadratic": [[i, j, c] for (i, j), c in q.quadratic.items()],
        "offset": q.offset,
    }


def qubo_from_dict(doc: Mapping[str, Any]) -> Qubo:
    try:
        n = int(doc["n"])
        linear = tuple(float(c) for c in doc["linear"])
        quad: dict[tuple[int, int], float] = {}
        for i, j, c in doc.get("quadratic", []):
            i, j = int(i), int(j)
            if i > j:
                i, j = j, i
            if i == j:
                raise ConversionError("diagonal entries belong in 'linear'")
            quad[(i, j)] = quad.get((i, j), 0.0) + float(c)
        offset = float(doc.get("offset", 0.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConversionError(f"malformed QUBO document: {exc}") from None
    return Qubo(n, linear, {k: v for k, v in sorted(quad.items()) if v != 0.0}, offset)


def all_bitstrings(n: int) -> np.ndarray:
    """(2^n, n) array; row k holds the bits of k with bit i = (k >> i) & 1."""
    idx = np.arange(2**n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(np.int8)
