"""Small Boolean circuits from n input bits to m output bits.

Nodes 0..n-1 are the inputs; gate k is node n+k and may only read nodes with
smaller indices, so every circuit is acyclic by construction. JSON form::

    {"inputs": 2,
     "gates": [{"op": "XOR", "args": [0, 1]}, {"op": "NOT", "args": [2]}],
     "outputs": [2, 3, 0]}

Supported ops: AND, OR, XOR (two arguments), NOT (one argument).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .formula import And, Formula, Not, Or, Var, conj, disj

ARITY = {"AND": 2, "OR": 2, "XOR": 2, "NOT": 1}


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    op: str
    args: tuple[int, ...]


@dataclass(frozen=True)
class ToyFunctionSpec:
    inputs: int
    gates: tuple[Gate, ...]
    outputs: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        if self.inputs < 1:
            raise CircuitError("a circuit needs at least one input")
        for k, g in enumerate(self.gates):
            if g.op not in ARITY:
                raise CircuitError(f"gate {k}: unknown op {g.op!r}")
            if len(g.args) != ARITY[g.op]:
                raise CircuitError(f"gate {k}: {g.op} takes {ARITY[g.op]} arguments")
            for a in g.args:
                if not 0 <= a < self.inputs + k:
                    raise CircuitError(f"gate {k}: argument {a} is not an earlier node")
        nodes = self.inputs + len(self.gates)
        if not self.outputs or any(not 0 <= o < nodes for o in self.outputs):
            raise CircuitError("outputs must name existing nodes")

    @property
    def out_len(self) -> int:
        return len(self.outputs)

    def evaluate(self, x: str) -> str:
        if len(x) != self.inputs:
            raise CircuitError(f"expected {self.inputs} input bits")
        vals = [int(c) for c in x]
        for g in self.gates:
            a = [vals[i] for i in g.args]
            if g.op == "AND":
                vals.append(a[0] & a[1])
            elif g.op == "OR":
                vals.append(a[0] | a[1])
            elif g.op == "XOR":
                vals.append(a[0] ^ a[1])
            else:
                vals.append(1 - a[0])
        return "".join(str(vals[o]) for o in self.outputs)

    def table(self) -> dict[str, str]:
        return {x: self.evaluate(x) for x in _all_strings(self.inputs)}

    def image(self) -> dict[str, str]:
        """Output -> least preimage, over all inputs."""
        img: dict[str, str] = {}
        for x, y in self.table().items():
            img.setdefault(y, x)
        return img

    def used_inputs(self) -> set[int]:
        used = {o for o in self.outputs if o < self.inputs}
        for g in self.gates:
            used.update(a for a in g.args if a < self.inputs)
        return used

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "gates": [{"op": g.op, "args": list(g.args)} for g in self.gates],
            "outputs": list(self.outputs),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ToyFunctionSpec":
        try:
            gates = tuple(Gate(g["op"], tuple(g["args"])) for g in obj["gates"])
            return cls(int(obj["inputs"]), gates, tuple(obj["outputs"]), obj.get("name", ""))
        except (KeyError, TypeError) as exc:
            raise CircuitError(f"malformed circuit description: {exc}") from None


def _all_strings(n: int):
    return ("".join(p) for p in itertools.product("01", repeat=n))


def is_bijective(spec: ToyFunctionSpec) -> bool:
    return spec.out_len == spec.inputs and len(spec.image()) == 1 << spec.inputs


# -- a few fixed circuits --------------------------------------------------------

def identity(n: int) -> ToyFunctionSpec:
    return ToyFunctionSpec(n, (), tuple(range(n)), f"identity{n}")


def duplicate_bits(n: int) -> ToyFunctionSpec:
    """x1..xn -> x1 x1 x2 x2 ... xn xn."""
    return ToyFunctionSpec(n, (), tuple(i for i in range(n) for _ in range(2)), f"duplicate{n}")


def rotate_left(n: int) -> ToyFunctionSpec:
    return ToyFunctionSpec(n, (), tuple(list(range(1, n)) + [0]), f"rotl{n}")


def first_bit(n: int) -> ToyFunctionSpec:
    return ToyFunctionSpec(n, (), (0,), f"first{n}")


def xor_extend(n: int) -> ToyFunctionSpec:
    """x -> x followed by the parity of x; stretches n bits to n+1."""
    if n == 1:
        return ToyFunctionSpec(1, (), (0, 0), "xorext1")
    gates = [Gate("XOR", (0, 1))]
    for i in range(2, n):
        gates.append(Gate("XOR", (n + len(gates) - 1, i)))
    return ToyFunctionSpec(n, tuple(gates), tuple(range(n)) + (n + len(gates) - 1,), f"xorext{n}")


def mix_permutation(n: int) -> ToyFunctionSpec:
    """x -> (x1 xor x2, x2, ..., xn) rotated left: a bijection with a gate in it."""
    if n < 2:
        return identity(n)
    gates = (Gate("XOR", (0, 1)),)
    outs = tuple(list(range(1, n)) + [n])
    return ToyFunctionSpec(n, gates, outs, f"mix{n}")


# -- formulas -------------------------------------------------------------------------

def _gate_formula(op: str, a: list[Formula]) -> Formula:
    if op == "AND":
        return And((a[0], a[1]))
    if op == "OR":
        return Or((a[0], a[1]))
    if op == "NOT":
        return Not(a[0])
    return Or((And((a[0], Not(a[1]))), And((Not(a[0]), a[1]))))


def definitions(spec: ToyFunctionSpec, first_aux: int, inputs: list[int] | None = None
                ) -> tuple[list[Formula], list[int], int]:
    """Definitional formulas aux_k <-> gate_k, with gate k on variable first_aux + k.

    ``inputs`` maps input i to its variable (default i+1). Returns the
    definitions, the variable of every output node and the next free variable.
    """
    node_var = list(inputs) if inputs is not None else [i + 1 for i in range(spec.inputs)]
    defs: list[Formula] = []
    v = first_aux
    for g in spec.gates:
        body = _gate_formula(g.op, [Var(node_var[i]) for i in g.args])
        defs.append(disj([Not(Var(v)), body]))
        defs.append(disj([Var(v), Not(body)]))
        node_var.append(v)
        v += 1
    return defs, [node_var[o] for o in spec.outputs], v


def equals_bits(variables: list[int], b: str) -> list[Formula]:
    return [Var(v) if c == "1" else Not(Var(v)) for v, c in zip(variables, b)]


def not_all(parts: list[Formula]) -> Formula:
    return Not(conj(parts))
