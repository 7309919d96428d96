"""
Expression trees for holomorphic maps.

JSON form: constants {"c": [re, im]}, variables {"var": j} (0-based) and
operators {"op": name, "args": [...]}; "pow" also carries an integer "n".
The logarithm is the principal branch (cut along the negative real axis).
"""
import cmath
import math
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Optional, Sequence, Tuple

from .errors import MapEvaluationError, MapSpecError

# name -> (min args, max args); None means unbounded
ARITY: Dict[str, Tuple[int, Optional[int]]] = {
    "add": (1, None),
    "mul": (1, None),
    "sub": (2, 2),
    "div": (2, 2),
    "neg": (1, 1),
    "exp": (1, 1),
    "log": (1, 1),
    "pow": (1, 1),
}


class MapExpr:
    """Base class of expression nodes."""

    def evaluate(self, point: Sequence[complex]) -> complex:
        raise NotImplementedError

    def variables(self) -> FrozenSet[int]:
        raise NotImplementedError

    def to_json(self) -> Dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class Const(MapExpr):
    value: complex

    def evaluate(self, point):
        return self.value

    def variables(self):
        return frozenset()

    def to_json(self):
        return {"c": [self.value.real, self.value.imag]}


@dataclass(frozen=True)
class Var(MapExpr):
    index: int

    def evaluate(self, point):
        return complex(point[self.index])

    def variables(self):
        return frozenset({self.index})

    def to_json(self):
        return {"var": self.index}


def _checked(value: complex) -> complex:
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise OverflowError("expression value is not finite")
    return value


@dataclass(frozen=True)
class Op(MapExpr):
    op: str
    args: Tuple[MapExpr, ...]
    n: Optional[int] = None

    def evaluate(self, point):
        vals = [a.evaluate(point) for a in self.args]
        op = self.op
        if op == "add":
            return _checked(sum(vals, 0j))
        if op == "mul":
            out = 1 + 0j
            for v in vals:
                out *= v
            return _checked(out)
        if op == "sub":
            return _checked(vals[0] - vals[1])
        if op == "neg":
            return -vals[0]
        if op == "div":
            if vals[1] == 0:
                raise MapEvaluationError("division by zero")
            return _checked(vals[0] / vals[1])
        if op == "exp":
            # cmath raises OverflowError for huge real parts
            return _checked(cmath.exp(vals[0]))
        if op == "log":
            if vals[0] == 0:
                raise MapEvaluationError("logarithm of zero")
            return cmath.log(vals[0])
        if op == "pow":
            if vals[0] == 0 and self.n < 0:
                raise MapEvaluationError("negative power of zero")
            return _checked(vals[0] ** self.n)
        raise MapSpecError(f"unknown operator '{op}'")

    def variables(self):
        out = frozenset()
        for a in self.args:
            out |= a.variables()
        return out

    def to_json(self):
        node = {"op": self.op, "args": [a.to_json() for a in self.args]}
        if self.n is not None:
            node["n"] = self.n
        return node


def parse_expr(node: Any, path: str = "expr") -> MapExpr:
    """
    Build an expression tree from its JSON form.

    Args:
        node: Parsed JSON value
        path: Location used in error messages

    Returns:
        MapExpr

    Raises:
        MapSpecError: If the node is ill-formed
    """
    if not isinstance(node, dict):
        raise MapSpecError(f"{path}: expected an object, got {type(node).__name__}")
    if "c" in node:
        c = node["c"]
        if not (isinstance(c, (list, tuple)) and len(c) == 2):
            raise MapSpecError(f"{path}.c: expected [re, im]")
        try:
            value = complex(float(c[0]), float(c[1]))
        except (TypeError, ValueError) as e:
            raise MapSpecError(f"{path}.c: {e}") from e
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise MapSpecError(f"{path}.c: constant must be finite")
        return Const(value)
    if "var" in node:
        j = node["var"]
        if not isinstance(j, int) or isinstance(j, bool) or j < 0:
            raise MapSpecError(f"{path}.var: expected a non-negative integer")
        return Var(j)
    if "op" in node:
        op = node["op"]
        if op not in ARITY:
            raise MapSpecError(f"{path}.op: unknown operator '{op}'")
        args = node.get("args")
        if not isinstance(args, list):
            raise MapSpecError(f"{path}.args: expected a list")
        lo, hi = ARITY[op]
        if len(args) < lo or (hi is not None and len(args) > hi):
            raise MapSpecError(f"{path}.args: '{op}' takes {lo}..{hi or 'any'} arguments, got {len(args)}")
        n = None
        if op == "pow":
            n = node.get("n")
            if not isinstance(n, int) or isinstance(n, bool):
                raise MapSpecError(f"{path}.n: 'pow' needs an integer exponent")
        parsed = tuple(parse_expr(a, f"{path}.args[{i}]") for i, a in enumerate(args))
        return Op(op, parsed, n)
    raise MapSpecError(f"{path}: expected one of 'c', 'var', 'op'")


def const(value: complex) -> Const:
    return Const(complex(value))


def var(index: int) -> Var:
    return Var(index)


def add(*args: MapExpr) -> Op:
    return Op("add", tuple(args))


def mul(*args: MapExpr) -> Op:
    return Op("mul", tuple(args))


def div(a: MapExpr, b: MapExpr) -> Op:
    return Op("div", (a, b))


def exp(a: MapExpr) -> Op:
    return Op("exp", (a,))
