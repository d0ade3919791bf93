"""SSA IR node classes: value types, values, operations, blocks, functions, programs.

Operation layouts (operands in order):
    - const:       ()                                     attrs: value
    - arith:       (lhs, rhs)                             attrs: op
    - setup:       (*field values, [input state])         attrs: accel, fields
    - launch:      (state, *field values, [ops value])    attrs: accel, fields, ops (int or None)
    - await:       (token,)
    - for:         (*iter inits)                          attrs: lower, upper, step, iv_width
                   region 0 arguments: (iv, *iter args)
    - if:          (condition,)                           regions: then, else
    - yield:       (*values)
    - extern-call: (*args)                                attrs: callee, cycles; effects
    - host-work:   ()                                     attrs: cycles
"""
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple, Union
from accel_config_toolkit.errors import IRTypeError

# arithmetic op names, all two's-complement wrap-around
ARITH_KINDS = ("add", "sub", "mul", "and", "or", "xor", "shl", "shr")

# every operation kind of the IR
OP_KINDS = (
    "const", "arith", "setup", "launch", "await",
    "for", "if", "yield", "extern-call", "host-work")

# allowed effects annotation values
EFFECTS_VALUES = ("all", "none")


@dataclass(frozen=True)
class IntegerType:
    """Fixed-width integer, 1..64 bits."""
    width: int

    def __post_init__(self):
        if not isinstance(self.width, int) or not 1 <= self.width <= 64:
            raise IRTypeError(f"integer width must be within 1..64, got {self.width}")

    def __str__(self):
        return f"i{self.width}"


@dataclass(frozen=True)
class StateType:
    """Register-file contents of one accelerator after a setup."""
    accel: str

    def __post_init__(self):
        if not self.accel:
            raise IRTypeError("state type needs a non-empty accelerator name")

    def __str__(self):
        return f'state<"{self.accel}">'


@dataclass(frozen=True)
class TokenType:
    """Handle of one launched accelerator job."""
    accel: str

    def __post_init__(self):
        if not self.accel:
            raise IRTypeError("token type needs a non-empty accelerator name")

    def __str__(self):
        return f'token<"{self.accel}">'


ValueType = Union[IntegerType, StateType, TokenType]


class Value:
    """An SSA value. Equality is object identity."""

    __slots__ = ("type", "owner", "index")

    def __init__(self, value_type: ValueType, owner=None, index: int = 0):
        self.type = value_type
        # defining Operation (result) or Block (argument)
        self.owner = owner
        self.index = index

    @property
    def defining_op(self) -> Optional["Operation"]:
        return self.owner if isinstance(self.owner, Operation) else None

    @property
    def is_block_argument(self) -> bool:
        return isinstance(self.owner, Block)

    @property
    def defining_block(self) -> Optional["Block"]:
        """Block in which the value becomes visible."""
        if isinstance(self.owner, Block):
            return self.owner
        if isinstance(self.owner, Operation):
            return self.owner.parent
        return None

    def __repr__(self):
        return f"<Value {self.type} #{id(self) % 100000}>"


class Operation:
    """One IR operation; region-holding kinds are `for` and `if`."""

    def __init__(
            self,
            kind: str,
            operands=(),
            result_types=(),
            attributes: Optional[Dict] = None,
            regions=(),
            effects: Optional[str] = None):
        if kind not in OP_KINDS:
            raise IRTypeError(f"unknown operation kind '{kind}'")
        self.kind = kind
        self.operands: List[Value] = list(operands)
        self.results: List[Value] = [Value(t, self, i) for i, t in enumerate(result_types)]
        self.attributes: Dict = dict(attributes or {})
        self.regions: List[Block] = []
        for region in regions:
            self.add_region(region)
        self.effects = effects
        # enclosing block, set when inserted
        self.parent: Optional[Block] = None

    # --- structure -------------------------------------------------------
    def add_region(self, block: "Block") -> "Block":
        block.parent_op = self
        self.regions.append(block)
        return block

    def add_result(self, value_type: ValueType) -> Value:
        value = Value(value_type, self, len(self.results))
        self.results.append(value)
        return value

    @property
    def result(self) -> Value:
        return self.results[0]

    def erase(self):
        """Detach the operation from its block."""
        if self.parent is not None:
            self.parent.remove(self)

    def walk(self) -> Iterator["Operation"]:
        """Pre-order walk over the operation and everything nested in it."""
        yield self
        for region in self.regions:
            yield from region.walk()

    def ancestors(self) -> Iterator["Operation"]:
        """Enclosing region-holding operations, innermost first."""
        block = self.parent
        while block is not None and block.parent_op is not None:
            yield block.parent_op
            block = block.parent_op.parent

    @property
    def accel(self) -> Optional[str]:
        return self.attributes.get("accel")

    # --- setup -----------------------------------------------------------
    @property
    def field_names(self) -> List[str]:
        return list(self.attributes.get("fields", []))

    def setup_fields(self) -> List[Tuple[str, Value]]:
        names = self.field_names
        return list(zip(names, self.operands[:len(names)]))

    def setup_input(self) -> Optional[Value]:
        names = self.field_names
        return self.operands[len(names)] if len(self.operands) > len(names) else None

    def set_setup(self, pairs, input_state: Optional[Value]):
        """Replace the field list and input state of a setup."""
        pairs = list(pairs)
        self.attributes["fields"] = [name for name, _ in pairs]
        self.operands = [value for _, value in pairs]
        if input_state is not None:
            self.operands.append(input_state)

    # --- launch ----------------------------------------------------------
    def launch_state(self) -> Value:
        return self.operands[0]

    def launch_fields(self) -> List[Tuple[str, Value]]:
        names = self.field_names
        return list(zip(names, self.operands[1:1 + len(names)]))

    def launch_ops(self) -> Union[int, Value]:
        if self.attributes.get("ops") is not None:
            return self.attributes["ops"]
        return self.operands[-1]

    # --- for -------------------------------------------------------------
    @property
    def body(self) -> "Block":
        return self.regions[0]

    @property
    def induction_var(self) -> Value:
        return self.body.arguments[0]

    @property
    def iter_args(self) -> List[Value]:
        return self.body.arguments[1:]

    def trip_count(self) -> int:
        lower, upper, step = (self.attributes[k] for k in ("lower", "upper", "step"))
        if upper <= lower:
            return 0
        return (upper - lower + step - 1) // step

    # --- if --------------------------------------------------------------
    @property
    def then_block(self) -> "Block":
        return self.regions[0]

    @property
    def else_block(self) -> "Block":
        return self.regions[1]

    def __repr__(self):
        return f"<Operation {self.kind} {self.attributes}>"


class Block:
    """Ordered list of operations with typed block arguments."""

    def __init__(self, arg_types=()):
        self.arguments: List[Value] = [Value(t, self, i) for i, t in enumerate(arg_types)]
        self.ops: List[Operation] = []
        self.parent_op: Optional[Operation] = None

    def add_argument(self, value_type: ValueType) -> Value:
        value = Value(value_type, self, len(self.arguments))
        self.arguments.append(value)
        return value

    def append(self, op: Operation) -> Operation:
        op.parent = self
        self.ops.append(op)
        return op

    def insert(self, index: int, op: Operation) -> Operation:
        op.parent = self
        self.ops.insert(index, op)
        return op

    def insert_before(self, anchor: Operation, op: Operation) -> Operation:
        return self.insert(self.ops.index(anchor), op)

    def insert_after(self, anchor: Operation, op: Operation) -> Operation:
        return self.insert(self.ops.index(anchor) + 1, op)

    def remove(self, op: Operation):
        self.ops.remove(op)
        op.parent = None

    def index(self, op: Operation) -> int:
        return self.ops.index(op)

    @property
    def terminator(self) -> Optional[Operation]:
        if self.ops and self.ops[-1].kind == "yield":
            return self.ops[-1]
        return None

    def walk(self) -> Iterator[Operation]:
        for op in list(self.ops):
            yield from op.walk()


@dataclass
class Function:
    """A named function with a single body block."""
    name: str
    body: Block = field(default_factory=Block)

    def walk(self) -> Iterator[Operation]:
        return self.body.walk()


@dataclass
class Program:
    """Accelerator declarations plus an ordered list of functions."""
    accelerators: List[str] = field(default_factory=list)
    functions: List[Function] = field(default_factory=list)

    def walk(self) -> Iterator[Operation]:
        for function in self.functions:
            yield from function.walk()
