"""Declarative optimization models, their JSON file format, and evaluation helpers.

The semantics defined here (objective value, feasibility) are the ground truth
that every solver is checked against.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .errors import ModelError

VARIABLE_KINDS = ("binary", "integer", "continuous")
FEASIBILITY_TOL = 1e-9

_SENSE_ALIASES = {
    "<=": "<=", "=<": "<=", "le": "<=", "leq": "<=",
    ">=": ">=", "=>": ">=", "ge": ">=", "geq": ">=",
    "==": "==", "=": "==", "eq": "==",
}
_OBJ_ALIASES = {"min": "min", "minimize": "min", "max": "max", "maximize": "max"}


@dataclass(frozen=True)
class Variable:
    id: int
    name: str
    kind: str
    lower: float
    upper: float

    @property
    def is_discrete(self) -> bool:
        return self.kind in ("binary", "integer")


@dataclass(frozen=True)
class Expression:
    """constant + sum(linear[i] x_i) + sum(quadratic[i, j] x_i x_j), keys are variable ids."""

    constant: float = 0.0
    linear: dict[int, float] = field(default_factory=dict)
    quadratic: dict[tuple[int, int], float] = field(default_factory=dict)

    def value(self, x: list[float]) -> float:
        total = self.constant
        for i, c in self.linear.items():
            total += c * x[i]
        for (i, j), c in self.quadratic.items():
            total += c * x[i] * x[j]
        return total

    @property
    def is_linear(self) -> bool:
        return not self.quadratic


@dataclass(frozen=True)
class Constraint:
    name: str
    lhs: Expression
    sense: str
    rhs: float

    def violation(self, x: list[float]) -> float:
        """Amount by which the constraint is violated (0 when satisfied)."""
        lhs = self.lhs.value(x)
        if self.sense == "<=":
            return max(0.0, lhs - self.rhs)
        if self.sense == ">=":
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass(frozen=True)
class Objective:
    sense: str
    expr: Expression


@dataclass(frozen=True)
class Model:
    name: str
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    objective: Objective

    def __post_init__(self):
        if not self.variables:
            raise ModelError("model needs at least one variable")

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    @property
    def maximize(self) -> bool:
        return self.objective.sense == "max"

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise ModelError(f"unknown variable {name!r}")

    def vector(self, assignment: Mapping[str, float]) -> list[float]:
        """Assignment map -> list ordered by variable id."""
        try:
            return [float(assignment[v.name]) for v in self.variables]
        except KeyError as exc:
            raise ModelError(f"assignment is missing variable {exc.args[0]!r}") from None


@dataclass(frozen=True)
class Solution:
    status: str
    assignment: dict[str, float]
    objective_value: float | None
    backend_name: str
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status in ("optimal", "feasible")

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "assignment": dict(self.assignment),
            "objective_value": self.objective_value,
            "backend": self.backend_name,
            "metadata": dict(self.metadata),
        }


def _canonical_expression(
    variables: tuple[Variable, ...],
    constant: float,
    linear: Mapping[int, float],
    quadratic: Iterable[tuple[int, int, float]],
) -> Expression:
    lin: dict[int, float] = {}
    for i, c in linear.items():
        lin[i] = lin.get(i, 0.0) + float(c)
    quad: dict[tuple[int, int], float] = {}
    for i, j, c in quadratic:
        if i > j:
            i, j = j, i
        if i == j and variables[i].kind == "binary":
            # x*x == x on binaries
            lin[i] = lin.get(i, 0.0) + float(c)
            continue
        quad[(i, j)] = quad.get((i, j), 0.0) + float(c)
    lin = {i: lin[i] for i in sorted(lin) if lin[i] != 0.0}
    quad = {k: quad[k] for k in sorted(quad) if quad[k] != 0.0}
    return Expression(float(constant), lin, quad)


def _make_variable(idx: int, name: str, kind: str, lower=None, upper=None) -> Variable:
    if not isinstance(name, str) or not name:
        raise ModelError("variable name must be a nonempty string")
    if kind not in VARIABLE_KINDS:
        raise ModelError(f"variable {name!r}: unknown kind {kind!r}")
    if kind == "binary":
        if (lower is not None and float(lower) != 0.0) or (upper is not None and float(upper) != 1.0):
            raise ModelError(f"binary variable {name!r} must have bounds 0 and 1")
        return Variable(idx, name, kind, 0.0, 1.0)
    if lower is None or upper is None:
        raise ModelError(f"{kind} variable {name!r} requires lower and upper bounds")
    lower, upper = float(lower), float(upper)
    if math.isnan(lower) or math.isnan(upper) or lower > upper:
        raise ModelError(f"variable {name!r}: invalid bounds [{lower}, {upper}]")
    if kind == "integer" and not all(math.isinf(b) or b == round(b) for b in (lower, upper)):
        raise ModelError(f"integer variable {name!r} needs integral bounds")
    return Variable(idx, name, kind, lower, upper)


class ModelBuilder:
    """Incremental construction of a :class:`Model`.

    >>> b = ModelBuilder("knapsack")
    >>> x0, x1 = b.binary("x0"), b.binary("x1")
    >>> b.constraint({"x0": 2, "x1": 3}, "<=", 4, name="cap")
    >>> b.maximize(linear={"x0": 3, "x1": 4})
    >>> b.build().num_variables
    2
    """

    def __init__(self, name: str = "model"):
        self.name = name
        self._vars: list[Variable] = []
        self._index: dict[str, int] = {}
        self._constraints: list[tuple[str, dict, str, float, float]] = []
        self._objective: tuple[str, float, dict, list] = ("min", 0.0, {}, [])

    def _add(self, name, kind, lower=None, upper=None) -> str:
        if name in self._index:
            raise ModelError(f"duplicate variable name {name!r}")
        var = _make_variable(len(self._vars), name, kind, lower, upper)
        self._index[name] = var.id
        self._vars.append(var)
        return name

    def binary(self, name: str) -> str:
        return self._add(name, "binary")

    def integer(self, name: str, lower: int, upper: int) -> str:
        return self._add(name, "integer", lower, upper)

    def continuous(self, name: str, lower: float, upper: float) -> str:
        return self._add(name, "continuous", lower, upper)

    def constraint(self, linear: Mapping[str, float], sense: str, rhs: float,
                   name: str | None = None, constant: float = 0.0) -> None:
        if sense not in _SENSE_ALIASES:
            raise ModelError(f"unknown constraint sense {sense!r}")
        cname = name if name is not None else f"c{len(self._constraints)}"
        self._constraints.append((cname, dict(linear), _SENSE_ALIASES[sense], float(rhs), float(constant)))

    def minimize(self, linear=None, quadratic=None, constant: float = 0.0) -> None:
        self._objective = ("min", float(constant), dict(linear or {}), list(quadratic or []))

    def maximize(self, linear=None, quadratic=None, constant: float = 0.0) -> None:
        self._objective = ("max", float(constant), dict(linear or {}), list(quadratic or []))

    def _id(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ModelError(f"unknown variable {name!r}") from None

    def build(self) -> Model:
        variables = tuple(self._vars)
        if not variables:
            raise ModelError("model needs at least one variable")
        constraints = []
        seen = set()
        for cname, linear, sense, rhs, constant in self._constraints:
            if cname in seen:
                raise ModelError(f"duplicate constraint name {cname!r}")
            seen.add(cname)
            lin = {self._id(k): v for k, v in linear.items()}
            # constant folded into the right-hand side
            lhs = _canonical_expression(variables, 0.0, lin, ())
            constraints.append(Constraint(cname, lhs, sense, rhs - constant))
        sense, constant, linear, quadratic = self._objective
        expr = _canonical_expression(
            variables,
            constant,
            {self._id(k): v for k, v in linear.items()},
            [(self._id(a), self._id(b), c) for a, b, c in quadratic],
        )
        return Model(self.name, variables, tuple(constraints), Objective(sense, expr))


def parse_model(text: str | bytes) -> Model:
    """Parse the JSON model format into a canonical :class:`Model`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed JSON: {exc}") from None
    return model_from_dict(doc)


def model_from_dict(doc: Any) -> Model:
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    b = ModelBuilder(str(doc.get("name", "model")))
    variables = doc.get("variables")
    if not isinstance(variables, list) or not variables:
        raise ModelError("'variables' must be a nonempty list")
    for v in variables:
        if not isinstance(v, dict) or "name" not in v or "kind" not in v:
            raise ModelError("each variable needs 'name' and 'kind'")
        b._add(v["name"], v["kind"], v.get("lower"), v.get("upper"))

    for c in doc.get("constraints", []) or []:
        if not isinstance(c, dict):
            raise ModelError("each constraint must be an object")
        if c.get("quadratic"):
            raise ModelError(f"constraint {c.get('name')!r}: nonlinear constraint unsupported")
        if "sense" not in c or "rhs" not in c:
            raise ModelError(f"constraint {c.get('name')!r} needs 'sense' and 'rhs'")
        b.constraint(_number_map(c.get("linear", {})), c["sense"], _number(c["rhs"]), name=c.get("name"))

    obj = doc.get("objective", {}) or {}
    sense = _OBJ_ALIASES.get(str(obj.get("sense", "min")).lower())
    if sense is None:
        raise ModelError(f"unknown objective sense {obj.get('sense')!r}")
    quadratic = []
    for term in obj.get("quadratic", []) or []:
        if not isinstance(term, (list, tuple)) or len(term) != 3:
            raise ModelError("quadratic terms must be [name, name, coefficient]")
        quadratic.append((term[0], term[1], _number(term[2])))
    setter = b.maximize if sense == "max" else b.minimize
    setter(_number_map(obj.get("linear", {})), quadratic, _number(obj.get("constant", 0.0)))
    return b.build()


def _number(value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelError(f"expected a number, got {value!r}")
    return float(value)


def _number_map(value) -> dict[str, float]:
    if not isinstance(value, dict):
        raise ModelError("'linear' must map variable names to numbers")
    return {k: _number(v) for k, v in value.items()}


def _num_out(x: float):
    return int(x) if x == round(x) and abs(x) < 2**53 else x


def model_to_dict(model: Model) -> dict[str, Any]:
    names = [v.name for v in model.variables]
    variables = []
    for v in model.variables:
        entry: dict[str, Any] = {"name": v.name, "kind": v.kind}
        if v.kind != "binary":
            entry["lower"] = _num_out(v.lower) if v.kind == "integer" else v.lower
            entry["upper"] = _num_out(v.upper) if v.kind == "integer" else v.upper
        variables.append(entry)
    expr = model.objective.expr
    objective: dict[str, Any] = {
        "sense": model.objective.sense,
        "constant": expr.constant,
        "linear": {names[i]: c for i, c in expr.linear.items()},
    }
    if expr.quadratic:
        objective["quadratic"] = [[names[i], names[j], c] for (i, j), c in expr.quadratic.items()]
    constraints = [
        {"name": c.name, "linear": {names[i]: a for i, a in c.lhs.linear.items()},
         "sense": c.sense, "rhs": c.rhs}
        for c in model.constraints
    ]
    return {"name": model.name, "variables": variables, "objective": objective, "constraints": constraints}


def serialize_model(model: Model) -> str:
    return json.dumps(model_to_dict(model), indent=2)


def load_model(path) -> Model:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def evaluate(model: Model, assignment: Mapping[str, float]) -> float:
    """Objective value in the model's own sense (no sign flip)."""
    return model.objective.expr.value(model.vector(assignment))


def check_feasible(model: Model, assignment: Mapping[str, float], tol: float = FEASIBILITY_TOL) -> bool:
    x = model.vector(assignment)
    for v, xi in zip(model.variables, x):
        if xi < v.lower - tol or xi > v.upper + tol:
            return False
        if v.is_discrete and abs(xi - round(xi)) > tol:
            return False
    return all(c.violation(x) <= tol for c in model.constraints)
