"""Bounded verification and counterexample-guided synthesis.

Verification unrolls the scan cycle a bounded number of times, conjoins
the negated spec obligations and hands the circuit to the SAT backend;
counterexamples always replay on the reference simulator.

Synthesis searches straight-line candidate programs described by a slot
template (operator and operand selector variables) with iterative
deepening on the slot count, so the first verified candidate is minimal.
Repair and extension reuse the same template seeded with the original
program plus an edit budget; simplification synthesizes against the
block's own behavior.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .blocks import (
    And, Block, BlockInterface, BoolExpr, Const, Direction, Lang, Not, Or,
    Statement, TypeCheckError, UnboundVariable, Var, Xor, eval_expr,
    expr_vars, simulate,
)
from .constraints import (
    AssertionClause, ConstraintList, ObligationClause, SpecFormula,
    compile_spec,
)
from .sat import CdclSolver, CnfFormula, TseitinEncoder, solve

FALSE = Const(False)
TRUE = Const(True)


class Unsatisfiable(Exception):
    """No program of any size can satisfy the spec (contradiction on a
    concrete input pattern)."""

    def __init__(self, message: str, witness: Optional[dict[str, bool]] = None):
        super().__init__(message)
        self.witness = witness


class SizeBoundExceeded(Exception):
    def __init__(self, max_slots: int):
        super().__init__(f"no candidate within {max_slots} slots")
        self.max_slots = max_slots


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    max_slots: int = 31
    per_output: bool = True
    unwind_cycles: int = 1
    symbolic_init: bool = False
    edit_penalty: bool = True

    def __post_init__(self):
        if self.max_slots < 1:
            raise ValueError("max_slots must be >= 1")
        if self.unwind_cycles < 1:
            raise ValueError("unwind_cycles must be >= 1")


@dataclass(frozen=True)
class Counterexample:
    init_state: dict[str, bool]
    input_cycles: tuple[dict, ...]
    violated: str
    cycle_index: int


@dataclass(frozen=True)
class Verified:
    bound: int


@dataclass(frozen=True)
class Violated:
    counterexample: Counterexample


VerifyResult = Verified | Violated


@dataclass(frozen=True)
class OutputSynthesis:
    output: str
    slots_used: int
    iterations: int
    counterexamples_used: int
    wall_time: float


@dataclass(frozen=True)
class SynthesisResult:
    block: Block
    iterations: int
    counterexamples_used: int
    slots_used: int
    wall_time: float
    per_output: tuple[OutputSynthesis, ...] = ()


# --------------------------------------------------------------------------
# Folding expression constructors (keep symbolic circuits small)


def _not(x: BoolExpr) -> BoolExpr:
    if isinstance(x, Const):
        return Const(not x.value)
    if isinstance(x, Not):
        return x.operand
    return Not(x)


def _and(a: BoolExpr, b: BoolExpr) -> BoolExpr:
    if isinstance(a, Const):
        return b if a.value else FALSE
    if isinstance(b, Const):
        return a if b.value else FALSE
    return And(a, b)


def _or(a: BoolExpr, b: BoolExpr) -> BoolExpr:
    if isinstance(a, Const):
        return TRUE if a.value else b
    if isinstance(b, Const):
        return TRUE if b.value else a
    return Or(a, b)


def _xor(a: BoolExpr, b: BoolExpr) -> BoolExpr:
    if isinstance(a, Const):
        return _not(b) if a.value else b
    if isinstance(b, Const):
        return _not(a) if b.value else a
    return Xor(a, b)


def _iff(a: BoolExpr, b: BoolExpr) -> BoolExpr:
    return _not(_xor(a, b))


def _fold(items: Sequence[BoolExpr], op, unit: BoolExpr) -> BoolExpr:
    work = list(items)
    if not work:
        return unit
    while len(work) > 1:
        merged = [op(work[i], work[i + 1]) for i in range(0, len(work) - 1, 2)]
        if len(work) % 2:
            merged.append(work[-1])
        work = merged
    return work[0]


def _conj(items: Sequence[BoolExpr]) -> BoolExpr:
    return _fold(items, _and, TRUE)


def _disj(items: Sequence[BoolExpr]) -> BoolExpr:
    return _fold(items, _or, FALSE)


def _subst(expr: BoolExpr, env: Mapping[str, BoolExpr]) -> BoolExpr:
    """Replace variables by expressions, folding constants; memoized so
    shared subtrees stay shared."""
    memo: dict[int, BoolExpr] = {}

    def walk(node: BoolExpr) -> BoolExpr:
        hit = memo.get(id(node))
        if hit is not None:
            return hit
        if isinstance(node, Const):
            result = node
        elif isinstance(node, Var):
            try:
                result = env[node.name]
            except KeyError:
                raise UnboundVariable(node.name) from None
        elif isinstance(node, Not):
            result = _not(walk(node.operand))
        elif isinstance(node, And):
            result = _and(walk(node.left), walk(node.right))
        elif isinstance(node, Or):
            result = _or(walk(node.left), walk(node.right))
        else:
            result = _xor(walk(node.left), walk(node.right))
        memo[id(node)] = result
        return result

    return walk(expr)


def _symbolic_cycle(block: Block, state: Mapping[str, BoolExpr],
                    inputs: Mapping[str, BoolExpr]) -> dict[str, BoolExpr]:
    """One scan cycle over expressions instead of booleans."""
    env: dict[str, BoolExpr] = dict(inputs)
    env.update(state)
    for name in block.interface.outputs:
        env[name] = FALSE
    for stmt in block.body:
        env[stmt.target] = _subst(stmt.rhs, env)
    return env


def _collect_var_names(expr: BoolExpr) -> list[str]:
    """Variable names in first-visit DFS order (deterministic)."""
    names: list[str] = []
    seen_ids: set[int] = set()
    seen_names: set[str] = set()
    stack = [expr]
    while stack:
        node = stack.pop()
        if id(node) in seen_ids:
            continue
        seen_ids.add(id(node))
        if isinstance(node, Var):
            if node.name not in seen_names:
                seen_names.add(node.name)
                names.append(node.name)
        elif isinstance(node, Not):
            stack.append(node.operand)
        elif isinstance(node, (And, Or, Xor)):
            stack.append(node.right)
            stack.append(node.left)
    return names


# --------------------------------------------------------------------------
# Interface checks


def _non_temp_decls(interface: BlockInterface) -> set[tuple[str, Direction]]:
    return {(d.name, d.direction) for d in interface.decls
            if d.direction is not Direction.TEMP}


def _check_same_interface(block: Block, spec: SpecFormula) -> None:
    if _non_temp_decls(block.interface) != _non_temp_decls(spec.interface):
        raise TypeCheckError("block and spec interfaces do not match")


def _require_combinational(interface: BlockInterface, what: str) -> None:
    if interface.state_vars:
        raise TypeCheckError(f"{what} supports combinational blocks only "
                             f"(state vars: {', '.join(interface.state_vars)})")


# --------------------------------------------------------------------------
# Bounded verification


def _violation_exprs(spec: SpecFormula, env: Mapping[str, BoolExpr]) -> list[BoolExpr]:
    out: list[BoolExpr] = []
    for output, clauses in spec.obligations.items():
        out_expr = env[output]
        for clause in clauses:
            guard = _subst(clause.guard, env)
            wrong = _not(out_expr) if clause.value else out_expr
            out.append(_and(guard, wrong))
    for clause in spec.assertions:
        out.append(_not(_subst(clause.expr, env)))
    return out


def _first_violation(spec: SpecFormula, env: Mapping[str, bool]) -> Optional[str]:
    for output, clauses in spec.obligations.items():
        for clause in clauses:
            if eval_expr(clause.guard, env) and env[output] != clause.value:
                return spec.describe_obligation(output, clause)
    for clause in spec.assertions:
        if not eval_expr(clause.expr, env):
            return spec.describe_assertion(clause)
    return None


def _replay(block: Block, spec: SpecFormula, init_state: dict[str, bool],
            input_cycles: Sequence[dict]) -> Counterexample:
    from .blocks import cycle_environment

    state = dict(init_state)
    for index, inputs in enumerate(input_cycles):
        env = cycle_environment(block, state, inputs)
        violated = _first_violation(spec, env)
        if violated is not None:
            return Counterexample(init_state, tuple(dict(c) for c in input_cycles),
                                  violated, index)
        state = {s: env[s] for s in block.interface.state_vars}
    raise AssertionError("solver counterexample does not replay")


def _verify_at_bound(block: Block, spec: SpecFormula, cfg: SynthConfig,
                     cycles: int) -> Optional[Counterexample]:
    iface = block.interface
    var_order: list[str] = []

    def fresh(name: str) -> BoolExpr:
        var_order.append(name)
        return Var(name)

    if cfg.symbolic_init:
        state: dict[str, BoolExpr] = {s: fresh(f"{s}@init") for s in iface.state_vars}
    else:
        state = {s: FALSE for s in iface.state_vars}
    violations: list[BoolExpr] = []
    for t in range(cycles):
        inputs = {n: fresh(f"{n}@{t}") for n in iface.inputs}
        env = _symbolic_cycle(block, state, inputs)
        if t == cycles - 1:
            violations.extend(_violation_exprs(spec, env))
        state = {s: env[s] for s in iface.state_vars}
    violation = _disj(violations)
    if violation == FALSE:
        return None
    var_map = {name: i + 1 for i, name in enumerate(var_order)}
    enc = TseitinEncoder(var_map)
    root = enc.encode(violation)
    result = solve(enc.formula(), assumptions=[root], seed=cfg.seed)
    if not result.satisfiable:
        return None
    model = result.model
    if cfg.symbolic_init:
        init_state = {s: model[var_map[f"{s}@init"]] for s in iface.state_vars}
    else:
        init_state = {s: False for s in iface.state_vars}
    input_cycles = [{n: model[var_map[f"{n}@{t}"]] for n in iface.inputs}
                    for t in range(cycles)]
    return _replay(block, spec, init_state, input_cycles)


def verify(block: Block, spec: SpecFormula,
           cfg: SynthConfig = SynthConfig()) -> VerifyResult:
    """Bounded model check of the block against the compiled spec.

    Unrolls the scan cycle (initial state all false unless symbolic_init),
    conjoins the negated obligations and solves, checking depth 1 first so
    a Violated result carries a shortest counterexample, which provably
    replays on the simulator.
    """
    _check_same_interface(block, spec)
    for bound in range(1, cfg.unwind_cycles + 1):
        cex = _verify_at_bound(block, spec, cfg, bound)
        if cex is not None:
            return Violated(cex)
    return Verified(cfg.unwind_cycles)


def _equivalent_at_bound(a: Block, b: Block, cfg: SynthConfig,
                         cycles: int) -> Optional[Counterexample]:
    iface = a.interface
    var_order: list[str] = []

    def fresh(name: str) -> BoolExpr:
        var_order.append(name)
        return Var(name)

    state_a: dict[str, BoolExpr] = {s: fresh(f"{s}@init") for s in iface.state_vars}
    state_b = dict(state_a)
    differences: list[BoolExpr] = []
    for t in range(cycles):
        inputs = {n: fresh(f"{n}@{t}") for n in iface.inputs}
        env_a = _symbolic_cycle(a, state_a, inputs)
        env_b = _symbolic_cycle(b, state_b, inputs)
        if t == cycles - 1:
            for output in iface.outputs:
                differences.append(_xor(env_a[output], env_b[output]))
        state_a = {s: env_a[s] for s in iface.state_vars}
        state_b = {s: env_b[s] for s in iface.state_vars}
    diff = _disj(differences)
    if diff == FALSE:
        return None
    var_map = {name: i + 1 for i, name in enumerate(var_order)}
    enc = TseitinEncoder(var_map)
    root = enc.encode(diff)
    result = solve(enc.formula(), assumptions=[root], seed=cfg.seed)
    if not result.satisfiable:
        return None
    model = result.model
    init_state = {s: model[var_map[f"{s}@init"]] for s in iface.state_vars}
    input_cycles = [{n: model[var_map[f"{n}@{t}"]] for n in iface.inputs}
                    for t in range(cycles)]
    trace_a = simulate(a, input_cycles, init_state)
    trace_b = simulate(b, input_cycles, init_state)
    for index, (ca, cb) in enumerate(zip(trace_a.cycles, trace_b.cycles)):
        for output in iface.outputs:
            if ca.outputs[output] != cb.outputs[output]:
                return Counterexample(
                    init_state, tuple(dict(c) for c in input_cycles),
                    f"outputs differ: {output}", index)
    raise AssertionError("solver difference witness does not replay")


def equivalent(a: Block, b: Block,
               cfg: SynthConfig = SynthConfig()) -> VerifyResult:
    """Verified iff outputs agree on every input and initial-state pattern
    across `unwind_cycles` cycles; otherwise a shortest distinguishing
    counterexample is returned."""
    if _non_temp_decls(a.interface) != _non_temp_decls(b.interface):
        raise TypeCheckError("blocks have different interfaces")
    for bound in range(1, cfg.unwind_cycles + 1):
        cex = _equivalent_at_bound(a, b, cfg, bound)
        if cex is not None:
            return Violated(cex)
    return Verified(cfg.unwind_cycles)


# --------------------------------------------------------------------------
# Point specs: what synthesis must achieve at each concrete input point


def _guard_pattern(guard: BoolExpr) -> Optional[dict[str, bool]]:
    """Literal-conjunction guards as {name: value}; None when more general.
    Contradictory guards also yield None (they never fire, so they cannot
    clash with anything)."""
    pattern: dict[str, bool] = {}
    stack = [guard]
    while stack:
        node = stack.pop()
        if isinstance(node, Const):
            if node.value:
                continue
            return None
        if isinstance(node, Var):
            if pattern.get(node.name) is False:
                return None
            pattern[node.name] = True
        elif isinstance(node, Not) and isinstance(node.operand, Var):
            if pattern.get(node.operand.name) is True:
                return None
            pattern[node.operand.name] = False
        elif isinstance(node, And):
            stack.append(node.left)
            stack.append(node.right)
        else:
            return None
    return pattern


class _PointSpec:
    """Per-point satisfaction predicate over candidate output values.

    Combines obligation clauses, assertions and optional pins to the
    original block's behavior (used by simplify/extend).  A pin for output
    o applies at point x unless one of its release guards fires at x.
    """

    def __init__(self, input_names: Sequence[str], outputs: Sequence[str],
                 obligations: Mapping[str, Sequence[ObligationClause]],
                 assertions: Sequence[AssertionClause] = (),
                 pin_block: Optional[Block] = None,
                 pin_outputs: Sequence[str] = (),
                 pin_release: Optional[Mapping[str, Sequence[BoolExpr]]] = None):
        self.input_names = list(input_names)
        self.outputs = list(outputs)
        self.obligations = {o: tuple(obligations.get(o, ())) for o in outputs}
        self.assertions = tuple(assertions)
        self.pin_block = pin_block
        self.pin_outputs = [o for o in pin_outputs if o in self.outputs]
        self.pin_release = {o: tuple((pin_release or {}).get(o, ()))
                            for o in self.pin_outputs}
        self._pin_cache: dict[tuple[bool, ...], dict[str, bool]] = {}
        self._fired_cache: dict[tuple[bool, ...], list] = {}
        self._allowed_cache: dict[tuple, set[bool]] = {}

    def as_env(self, point: tuple[bool, ...]) -> dict[str, bool]:
        return dict(zip(self.input_names, point))

    def _pin_values(self, point: tuple[bool, ...]) -> dict[str, bool]:
        cached = self._pin_cache.get(point)
        if cached is None:
            trace = simulate(self.pin_block, [self.as_env(point)])
            cached = trace.cycles[0].outputs
            self._pin_cache[point] = cached
        return cached

    def _fired(self, point: tuple[bool, ...]) -> list:
        """Cached (output, clause) pairs whose guards fire at the point."""
        hit = self._fired_cache.get(point)
        if hit is None:
            env = self.as_env(point)
            hit = [(output, clause)
                   for output, clauses in self.obligations.items()
                   for clause in clauses if eval_expr(clause.guard, env)]
            self._fired_cache[point] = hit
        return hit

    def constrained(self, point: tuple[bool, ...]) -> bool:
        if self.assertions or self.pin_outputs:
            return True
        return bool(self._fired(point))

    def holds(self, point: tuple[bool, ...], outs: Mapping[str, bool]) -> bool:
        for output, clause in self._fired(point):
            if outs[output] != clause.value:
                return False
        env = self.as_env(point)
        if self.assertions:
            full = dict(env)
            full.update(outs)
            for clause in self.assertions:
                if not eval_expr(clause.expr, full):
                    return False
        for output in self.pin_outputs:
            if any(eval_expr(g, env) for g in self.pin_release[output]):
                continue
            if outs[output] != self._pin_values(point)[output]:
                return False
        return True

    def satisfiable_at(self, point: tuple[bool, ...]) -> Optional[dict[str, bool]]:
        """Some output valuation satisfying the point, or None."""
        for bits in itertools.product((False, True), repeat=len(self.outputs)):
            outs = dict(zip(self.outputs, bits))
            if self.holds(point, outs):
                return outs
        return None

    def allowed_values(self, output: str, point: tuple[bool, ...]) -> set[bool]:
        """Projection of the allowed output tuples onto one output."""
        key = (output, point)
        hit = self._allowed_cache.get(key)
        if hit is not None:
            return hit
        others = [o for o in self.outputs if o != output]
        allowed: set[bool] = set()
        for value in (False, True):
            for bits in itertools.product((False, True), repeat=len(others)):
                outs = dict(zip(others, bits))
                outs[output] = value
                if self.holds(point, outs):
                    allowed.add(value)
                    break
        self._allowed_cache[key] = allowed
        return allowed

    def min_slot_bound(self) -> int:
        """Sound lower bound on the slot count of any satisfying program.

        Stripping dead code leaves every non-output slot feeding another
        slot, which caps the number of distinct input references at
        (#binary slots) + (#outputs); a spec that forces the outputs to
        react to r distinct inputs therefore needs >= r - (#outputs) slots.
        """
        n = len(self.input_names)
        if n == 0 or n > 12 or len(self.outputs) > 4:
            return 1
        required = 0
        for i in range(n):
            dependent = False
            for point in itertools.product((False, True), repeat=n):
                if point[i]:
                    continue
                flipped = point[:i] + (True,) + point[i + 1:]
                for output in self.outputs:
                    a = self.allowed_values(output, point)
                    b = self.allowed_values(output, flipped)
                    if a and b and not (a & b):
                        dependent = True
                        break
                if dependent:
                    break
            if dependent:
                required += 1
        return max(1, required - len(self.outputs))

    def holds_expr(self, point: tuple[bool, ...],
                   outs: Mapping[str, BoolExpr]) -> BoolExpr:
        """The satisfaction predicate at a concrete point, symbolic in the
        candidate output values."""
        env = self.as_env(point)
        parts: list[BoolExpr] = []
        for output, clause in self._fired(point):
            parts.append(outs[output] if clause.value else _not(outs[output]))
        if self.assertions:
            full: dict[str, BoolExpr] = {n: Const(v) for n, v in env.items()}
            full.update(outs)
            for clause in self.assertions:
                parts.append(_subst(clause.expr, full))
        for output in self.pin_outputs:
            if any(eval_expr(g, env) for g in self.pin_release[output]):
                continue
            want = self._pin_values(point)[output]
            parts.append(outs[output] if want else _not(outs[output]))
        return _conj(parts)

    def violation_expr(self, input_vars: Mapping[str, BoolExpr],
                       outs: Mapping[str, BoolExpr]) -> BoolExpr:
        """Fully symbolic violation predicate (for SAT-based verification)."""
        parts: list[BoolExpr] = []
        for output, clauses in self.obligations.items():
            for clause in clauses:
                guard = _subst(clause.guard, input_vars)
                wrong = _not(outs[output]) if clause.value else outs[output]
                parts.append(_and(guard, wrong))
        if self.assertions:
            full = dict(input_vars)
            full.update(outs)
            for clause in self.assertions:
                parts.append(_not(_subst(clause.expr, full)))
        if self.pin_outputs:
            orig_env = _symbolic_cycle(self.pin_block,
                                       {}, dict(input_vars))
            for output in self.pin_outputs:
                released = _disj([_subst(g, input_vars)
                                  for g in self.pin_release[output]])
                parts.append(_and(_not(released),
                                  _xor(outs[output], orig_env[output])))
        return _disj(parts)

    def static_contradiction(self) -> Optional[tuple[str, dict[str, bool]]]:
        """Pairwise row-style contradiction: two literal-pattern guards that
        unify yet demand different values for the same output."""
        for output, clauses in self.obligations.items():
            patterns = []
            for clause in clauses:
                pattern = _guard_pattern(clause.guard)
                if pattern is not None:
                    patterns.append((pattern, clause.value))
            for i, (pa, va) in enumerate(patterns):
                for pb, vb in patterns[i + 1:]:
                    if va == vb:
                        continue
                    if all(pa[n] == pb[n] for n in pa.keys() & pb.keys()):
                        witness = dict(pb)
                        witness.update(pa)
                        return output, witness
        return None


# --------------------------------------------------------------------------
# Slot templates


@dataclass(frozen=True)
class _SlotShape:
    """Decoded slot: operator tag, operand indices, constant value."""
    op: tuple
    args: tuple[int, int] = (0, 0)
    const: bool = False


class _SlotTemplate:
    """Selector-variable encoding of straight-line candidate programs.

    Slot j computes one of: an input, a constant, NOT, AND, OR, XOR of
    operands drawn from the inputs and earlier slots.  Selectors are
    one-hot variables, so per-point semantics turn into short implication
    clauses that propagate well.
    """

    def __init__(self, input_names: Sequence[str], n_slots: int,
                 outputs: Sequence[str], prune: bool = True,
                 originals: Optional[list[_SlotShape]] = None,
                 edit_budget: Optional[int] = None):
        self.inputs = list(input_names)
        self.n = len(self.inputs)
        self.k = n_slots
        self.outputs = list(outputs)
        self.ops: list[tuple] = [("input", i) for i in range(self.n)]
        self.ops += [("const",), ("not",), ("and",), ("or",), ("xor",)]
        self.prune = prune
        self.originals = originals
        self.edit_budget = edit_budget
        self._vars: dict[str, Var] = {}
        self._idx = {op: i for i, op in enumerate(self.ops)}
        self._binary_ids = [self._idx[op] for op in (("and",), ("or",), ("xor",))]
        self._leaf_ids = [i for i, op in enumerate(self.ops)
                          if op[0] in ("input", "const")]

    # -- selector variables

    def _var(self, name: str) -> Var:
        v = self._vars.get(name)
        if v is None:
            v = Var(name)
            self._vars[name] = v
        return v

    def domain(self, j: int) -> int:
        return self.n + j

    def op_is(self, j: int, idx: int) -> Var:
        return self._var(f"op{j}_{idx}")

    def arg_is(self, j: int, which: int, d: int) -> Var:
        return self._var(f"a{j}_{which}_{d}")

    def out_is(self, o: int, d: int) -> Var:
        return self._var(f"os{o}_{d}")

    def const_var(self, j: int) -> Var:
        return self._var(f"cv{j}")

    def _op_uses(self, op: tuple) -> int:
        return {"input": 0, "const": 0, "not": 1}.get(op[0], 2)

    def _exactly_one(self, vars_: list[Var]) -> list[BoolExpr]:
        parts: list[BoolExpr] = [_disj(list(vars_))]
        for i in range(len(vars_)):
            for j in range(i + 1, len(vars_)):
                parts.append(_or(_not(vars_[i]), _not(vars_[j])))
        return parts

    # -- well-formedness and pruning constraints

    def wellformed(self) -> list[BoolExpr]:
        parts: list[BoolExpr] = []
        for j in range(self.k):
            dom = self.domain(j)
            op_vars = [self.op_is(j, idx) for idx in range(len(self.ops))]
            parts += self._exactly_one(op_vars)
            for which in (0, 1):
                if dom:
                    parts += self._exactly_one(
                        [self.arg_is(j, which, d) for d in range(dom)])
            for idx, op in enumerate(self.ops):
                uses = self._op_uses(op)
                if dom == 0 and uses > 0:
                    parts.append(_not(self.op_is(j, idx)))
                    continue
                # pin unused operand selectors and the constant bit
                for which in range(uses, 2):
                    if dom:
                        parts.append(_or(_not(self.op_is(j, idx)),
                                         self.arg_is(j, which, 0)))
                if op[0] != "const":
                    parts.append(_or(_not(self.op_is(j, idx)),
                                     _not(self.const_var(j))))
        if len(self.outputs) > 1:
            for o in range(len(self.outputs)):
                parts += self._exactly_one(
                    [self.out_is(o, d) for d in range(self.k)])
        if self.originals is not None:
            parts += self._edit_constraints()
        if self.prune:
            parts += self._pruning_constraints()
        return parts

    def _output_selects(self, j: int) -> BoolExpr:
        if len(self.outputs) == 1:
            return TRUE if j == self.k - 1 else FALSE
        return _disj([self.out_is(o, j) for o in range(len(self.outputs))])

    def _is_binary(self, j: int) -> BoolExpr:
        return _disj([self.op_is(j, idx) for idx in self._binary_ids])

    def _is_leafish(self, j: int) -> BoolExpr:
        return _disj([self.op_is(j, idx) for idx in self._leaf_ids])

    def _pruning_constraints(self) -> list[BoolExpr]:
        parts: list[BoolExpr] = []
        not_id = self._idx[("not",)]
        for j in range(self.k):
            taps = self._output_selects(j)
            # inputs/constants are only useful where an output taps the slot
            for idx in self._leaf_ids:
                parts.append(_or(_not(self.op_is(j, idx)), taps))
            # commutative operators take strictly ordered operands
            for idx in self._binary_ids:
                opv = self.op_is(j, idx)
                for d0 in range(self.domain(j)):
                    for d1 in range(d0 + 1):
                        parts.append(_or(_not(opv),
                                         _or(_not(self.arg_is(j, 0, d0)),
                                             _not(self.arg_is(j, 1, d1)))))
            # double negation is always reducible
            for d in range(self.n, self.domain(j)):
                parts.append(_or(_not(self.op_is(j, not_id)),
                                 _or(_not(self.arg_is(j, 0, d)),
                                     _not(self.op_is(d - self.n, not_id)))))
            # every slot must feed a later slot or an output
            used = [taps]
            for later in range(j + 1, self.k):
                ref0 = _and(self.arg_is(later, 0, self.n + j),
                            _not(self._is_leafish(later)))
                ref1 = _and(self.arg_is(later, 1, self.n + j),
                            self._is_binary(later))
                used.append(_or(ref0, ref1))
            parts.append(_disj(used))
        # no two slots compute the same thing
        for i in range(self.k):
            for j in range(i + 1, self.k):
                parts.append(_not(self._same_slot(i, j)))
        return parts

    def _same_slot(self, i: int, j: int) -> BoolExpr:
        """Slots agree on operator, operands and constant value."""
        same_op = _disj([_and(self.op_is(i, idx), self.op_is(j, idx))
                         for idx in range(len(self.ops))])
        same_args = []
        for which in (0, 1):
            if self.domain(i) and self.domain(j):
                same_args.append(_disj(
                    [_and(self.arg_is(i, which, d), self.arg_is(j, which, d))
                     for d in range(min(self.domain(i), self.domain(j)))]))
        same_cv = _iff(self.const_var(i), self.const_var(j))
        return _conj([same_op] + same_args + [same_cv])

    # -- repair: distance to the original encoding

    def _matches_original(self, j: int) -> BoolExpr:
        shape = self.originals[j]
        parts: list[BoolExpr] = [self.op_is(j, self._idx[shape.op])]
        uses = self._op_uses(shape.op)
        for which in range(2):
            if self.domain(j):
                want = shape.args[which] if which < uses else 0
                parts.append(self.arg_is(j, which, want))
        cv = self.const_var(j)
        parts.append(cv if (shape.op[0] == "const" and shape.const) else _not(cv))
        return _conj(parts)

    def _edit_constraints(self) -> list[BoolExpr]:
        n_orig = len(self.originals)
        extra = self.k - n_orig
        budget = self.edit_budget - extra
        if budget < 0:
            return [FALSE]
        changed = [_not(self._matches_original(j)) for j in range(n_orig)]
        return _at_most(changed, budget, self._var)

    # -- per-point evaluation

    def point_constraint(self, index: int, point: tuple[bool, ...],
                         pspec: _PointSpec) -> BoolExpr:
        """Implication clauses defining the candidate's value vars at one
        concrete input point, conjoined with the spec predicate there."""
        vals = [self._var(f"v{index}_{j}") for j in range(self.k)]
        parts: list[BoolExpr] = []
        for j in range(self.k):
            val = vals[j]
            argvals = []
            for which in (0, 1):
                av = self._var(f"av{index}_{j}_{which}")
                argvals.append(av)
                for d in range(self.domain(j)):
                    sel = self.arg_is(j, which, d)
                    if d < self.n:
                        # operand is an input: its value at this point is fixed
                        parts.append(_or(_not(sel), av if point[d] else _not(av)))
                    else:
                        ref = vals[d - self.n]
                        parts.append(_or(_not(sel), _or(_not(av), ref)))
                        parts.append(_or(_not(sel), _or(av, _not(ref))))
            for idx, op in enumerate(self.ops):
                opv = self.op_is(j, idx)
                kind = op[0]
                if kind == "input":
                    parts.append(_or(_not(opv), val if point[op[1]] else _not(val)))
                elif kind == "const":
                    cv = self.const_var(j)
                    parts.append(_or(_not(opv), _or(_not(val), cv)))
                    parts.append(_or(_not(opv), _or(val, _not(cv))))
                elif kind == "not":
                    a = argvals[0]
                    parts.append(_or(_not(opv), _or(_not(val), _not(a))))
                    parts.append(_or(_not(opv), _or(val, a)))
                elif kind == "and":
                    a, b = argvals
                    parts.append(_or(_not(opv), _or(_not(val), a)))
                    parts.append(_or(_not(opv), _or(_not(val), b)))
                    parts.append(_or(_not(opv), _or(val, _or(_not(a), _not(b)))))
                elif kind == "or":
                    a, b = argvals
                    parts.append(_or(_not(opv), _or(val, _not(a))))
                    parts.append(_or(_not(opv), _or(val, _not(b))))
                    parts.append(_or(_not(opv), _or(_not(val), _or(a, b))))
                else:  # xor
                    a, b = argvals
                    parts.append(_or(_not(opv), _or(_not(val), _or(a, b))))
                    parts.append(_or(_not(opv),
                                     _or(_not(val), _or(_not(a), _not(b)))))
                    parts.append(_or(_not(opv), _or(val, _or(_not(a), b))))
                    parts.append(_or(_not(opv), _or(val, _or(a, _not(b)))))
        outs = {name: self.output_value(o, vals, index)
                for o, name in enumerate(self.outputs)}
        return _conj(parts + [pspec.holds_expr(point, outs)])

    def output_value(self, o: int, vals: Sequence[BoolExpr],
                     index: int) -> BoolExpr:
        if len(self.outputs) == 1:
            return vals[self.k - 1]
        return _disj([_and(self.out_is(o, d), vals[d]) for d in range(self.k)])

    # -- decoding

    def decode(self, value_of: Callable[[str], bool]) -> dict[str, BoolExpr]:
        def one_hot(prefix: str, count: int) -> int:
            for idx in range(count):
                if value_of(f"{prefix}{idx}"):
                    return idx
            return 0

        memo: dict[int, BoolExpr] = {}

        def operand(d: int) -> BoolExpr:
            if d < self.n:
                return Var(self.inputs[d])
            return slot_expr(d - self.n)

        def slot_expr(j: int) -> BoolExpr:
            if j in memo:
                return memo[j]
            op = self.ops[one_hot(f"op{j}_", len(self.ops))]
            kind = op[0]
            if kind == "input":
                expr: BoolExpr = Var(self.inputs[op[1]])
            elif kind == "const":
                expr = Const(value_of(f"cv{j}"))
            else:
                a = operand(one_hot(f"a{j}_0_", self.domain(j)))
                if kind == "not":
                    expr = Not(a)
                else:
                    b = operand(one_hot(f"a{j}_1_", self.domain(j)))
                    expr = {"and": And, "or": Or, "xor": Xor}[kind](a, b)
            memo[j] = expr
            return expr

        result = {}
        for o, name in enumerate(self.outputs):
            if len(self.outputs) == 1:
                d = self.k - 1
            else:
                d = one_hot(f"os{o}_", self.k)
            result[name] = slot_expr(d)
        return result


def _at_most(exprs: Sequence[BoolExpr], bound: int,
             make_var: Callable[[str], Var]) -> list[BoolExpr]:
    """Sequential-counter cardinality constraint over arbitrary expressions."""
    n = len(exprs)
    if bound >= n:
        return []
    if bound == 0:
        return [_not(x) for x in exprs]
    regs = [[make_var(f"amc{i}_{j}") for j in range(bound)] for i in range(n - 1)]
    parts: list[BoolExpr] = []
    parts.append(_or(_not(exprs[0]), regs[0][0]))
    for j in range(1, bound):
        parts.append(_not(regs[0][j]))
    for i in range(1, n - 1):
        parts.append(_or(_not(exprs[i]), regs[i][0]))
        parts.append(_or(_not(regs[i - 1][0]), regs[i][0]))
        for j in range(1, bound):
            parts.append(_or(_not(exprs[i]), _or(_not(regs[i - 1][j - 1]), regs[i][j])))
            parts.append(_or(_not(regs[i - 1][j]), regs[i][j]))
        parts.append(_or(_not(exprs[i]), _not(regs[i - 1][bound - 1])))
    parts.append(_or(_not(exprs[n - 1]), _not(regs[n - 2][bound - 1])))
    return parts


# --------------------------------------------------------------------------
# Original program encoding (for repair templates)


def _encode_original(expr: BoolExpr, template_inputs: Sequence[str]) -> list[_SlotShape]:
    """Post-order slot encoding; Var/Const leaves inline as operands where
    possible, the root always lands in the last slot."""
    input_index = {name: i for i, name in enumerate(template_inputs)}
    n = len(template_inputs)
    slots: list[_SlotShape] = []

    def emit(shape: _SlotShape) -> int:
        slots.append(shape)
        return n + len(slots) - 1

    def operand(node: BoolExpr) -> int:
        if isinstance(node, Var):
            return input_index[node.name]
        return walk(node)

    def walk(node: BoolExpr) -> int:
        if isinstance(node, Var):
            return emit(_SlotShape(("input", input_index[node.name])))
        if isinstance(node, Const):
            return emit(_SlotShape(("const",), const=node.value))
        if isinstance(node, Not):
            a = operand(node.operand)
            return emit(_SlotShape(("not",), (a, 0)))
        a = operand(node.left)
        b = operand(node.right)
        kind = {And: "and", Or: "or", Xor: "xor"}[type(node)]
        return emit(_SlotShape((kind,), (a, b)))

    walk(expr)
    return slots


# --------------------------------------------------------------------------
# The CEGIS loop


@dataclass
class _RunStats:
    iterations: int = 0
    counterexamples: int = 0


class _GrowingSolver:
    """Builds one CNF from asserted expressions and solves it.

    Fresh per CEGIS iteration: carrying solver state across iterations was
    measurably slower than re-solving (stale activities and learned
    clauses poison later searches)."""

    def __init__(self, seed: int):
        self.seed = seed
        self.var_map: dict[str, int] = {}
        self.next_free = 1
        self.solver: Optional[CdclSolver] = None
        self.unsat = False

    def add(self, constraint: BoolExpr) -> None:
        if constraint == FALSE:
            self.unsat = True
            return
        for name in _collect_var_names(constraint):
            if name not in self.var_map:
                self.var_map[name] = self.next_free
                self.next_free += 1
        enc = TseitinEncoder(self.var_map, first_fresh=self.next_free)
        enc.assert_true(constraint)
        self.next_free = max(self.next_free, enc.num_vars + 1)
        if self.solver is None:
            self.solver = CdclSolver(CnfFormula(0, ()), seed=self.seed)
        self.solver.extend(self.next_free - 1, enc.clauses)

    def solve(self) -> Optional[Callable[[str], bool]]:
        if self.unsat or self.solver is None:
            return None
        result = self.solver.solve()
        if not result.satisfiable:
            return None
        model = result.model
        var_map = self.var_map

        def value_of(name: str) -> bool:
            index = var_map.get(name)
            return False if index is None else model[index]

        return value_of


def _find_violation(out_exprs: Mapping[str, BoolExpr], pspec: _PointSpec,
                    seed: int) -> Optional[tuple[bool, ...]]:
    n = len(pspec.input_names)
    if n <= 12:
        for point in itertools.product((False, True), repeat=n):
            env = pspec.as_env(point)
            outs = {o: eval_expr(expr, env) for o, expr in out_exprs.items()}
            if not pspec.holds(point, outs):
                return point
        return None
    input_vars = {name: Var(name) for name in pspec.input_names}
    violation = pspec.violation_expr(input_vars, out_exprs)
    if violation == FALSE:
        return None
    var_map = {name: i + 1 for i, name in enumerate(pspec.input_names)}
    enc = TseitinEncoder(var_map)
    root = enc.encode(violation)
    result = solve(enc.formula(), assumptions=[root], seed=seed)
    if not result.satisfiable:
        return None
    return tuple(result.model[var_map[name]] for name in pspec.input_names)


def _seed_points(pspec: _PointSpec) -> list[tuple[bool, ...]]:
    n = len(pspec.input_names)
    candidates = [tuple(False for _ in range(n))]
    for i in range(n):
        candidates.append(tuple(j == i for j in range(n)))
    candidates.append(tuple(True for _ in range(n)))
    points: list[tuple[bool, ...]] = []
    for point in candidates:
        if point not in points and pspec.constrained(point):
            points.append(point)
    return points


def _check_point(pspec: _PointSpec, point: tuple[bool, ...]) -> None:
    if pspec.satisfiable_at(point) is None:
        env = pspec.as_env(point)
        pattern = " ".join(f"{n}={int(v)}" for n, v in env.items())
        raise Unsatisfiable(f"spec is contradictory at input pattern: {pattern}",
                            witness=env)


def _run_cegis(rounds: Iterable[_SlotTemplate], pspec: _PointSpec,
               cfg: SynthConfig, stats: _RunStats) -> Optional[tuple[dict[str, BoolExpr], _SlotTemplate]]:
    static = pspec.static_contradiction()
    if static is not None:
        output, witness = static
        pattern = " ".join(f"{n}={int(v)}" for n, v in witness.items())
        raise Unsatisfiable(
            f"conflicting requirements for {output} at {pattern}", witness=witness)
    points = _seed_points(pspec)
    for point in points:
        _check_point(pspec, point)
    for template in rounds:
        wellformed = _conj(template.wellformed())
        constraints = [template.point_constraint(i, point, pspec)
                       for i, point in enumerate(points)]
        while True:
            stats.iterations += 1
            solver = _GrowingSolver(cfg.seed)
            solver.add(wellformed)
            for constraint in constraints:
                solver.add(constraint)
            value_of = solver.solve()
            if value_of is None:
                break
            candidate = template.decode(value_of)
            violation = _find_violation(candidate, pspec, cfg.seed)
            if violation is None:
                return candidate, template
            assert violation not in points, "counterexample repeated"
            _check_point(pspec, violation)
            constraints.append(template.point_constraint(len(points), violation, pspec))
            points.append(violation)
            stats.counterexamples += 1
    return None


# --------------------------------------------------------------------------
# Public operations


def _split_assertions(spec: SpecFormula, outputs: Sequence[str]):
    """Assertions grouped by the single output they mention; input-only
    assertions go everywhere; returns (per_output, coupling)."""
    output_set = set(outputs)
    per_output: dict[str, list[AssertionClause]] = {o: [] for o in outputs}
    coupling: list[AssertionClause] = []
    for clause in spec.assertions:
        mentioned = sorted(expr_vars(clause.expr) & output_set)
        if len(mentioned) > 1:
            coupling.append(clause)
        elif len(mentioned) == 1:
            per_output[mentioned[0]].append(clause)
        else:
            for o in outputs:
                per_output[o].append(clause)
    return per_output, coupling


def _build_body(interface: BlockInterface,
                exprs: Mapping[str, BoolExpr]) -> tuple[Statement, ...]:
    return tuple(Statement(name, exprs[name])
                 for name in interface.outputs if name in exprs)


def synthesize(interface: BlockInterface, spec: SpecFormula,
               cfg: SynthConfig = SynthConfig(), *,
               name: str = "generated") -> SynthesisResult:
    """CEGIS over slot templates with iterative deepening on the slot count.

    With per_output on, every output gets an independent run (assertions
    that couple several outputs force a joint run instead).  The returned
    block is minimal in slot count and verified against the spec.
    """
    start = time.perf_counter()
    if _non_temp_decls(interface) != _non_temp_decls(spec.interface):
        raise TypeCheckError("interface does not match the spec")
    _require_combinational(interface, "synthesize")
    inputs = interface.inputs
    outputs = interface.outputs
    if not outputs:
        raise TypeCheckError("synthesizable blocks need at least one output")
    per_assertions, coupling = _split_assertions(spec, outputs)
    use_per_output = cfg.per_output and not coupling and len(outputs) > 1

    runs: list[OutputSynthesis] = []
    exprs: dict[str, BoolExpr] = {}
    total = _RunStats()
    if use_per_output or len(outputs) == 1:
        for output in outputs:
            pspec = _PointSpec(inputs, [output], spec.obligations,
                               per_assertions[output])
            run_stats = _RunStats()
            run_start = time.perf_counter()
            lowest = pspec.min_slot_bound()
            found = _run_cegis(
                (_SlotTemplate(inputs, k, [output])
                 for k in range(lowest, cfg.max_slots + 1)),
                pspec, cfg, run_stats)
            if found is None:
                raise SizeBoundExceeded(cfg.max_slots)
            candidate, template = found
            exprs[output] = candidate[output]
            runs.append(OutputSynthesis(output, template.k, run_stats.iterations,
                                        run_stats.counterexamples,
                                        time.perf_counter() - run_start))
            total.iterations += run_stats.iterations
            total.counterexamples += run_stats.counterexamples
    else:
        pspec = _PointSpec(inputs, outputs, spec.obligations, spec.assertions)
        run_start = time.perf_counter()
        lowest = pspec.min_slot_bound()
        found = _run_cegis(
            (_SlotTemplate(inputs, k, outputs)
             for k in range(lowest, cfg.max_slots + 1)),
            pspec, cfg, total)
        if found is None:
            raise SizeBoundExceeded(cfg.max_slots)
        candidate, template = found
        exprs.update(candidate)
        runs = [OutputSynthesis("*", template.k, total.iterations,
                                total.counterexamples,
                                time.perf_counter() - run_start)]
    block = Block(name, interface, _build_body(interface, exprs), Lang.ST)
    full_pspec = _PointSpec(inputs, outputs, spec.obligations, spec.assertions)
    final_outs = {o: exprs[o] for o in outputs}
    assert _find_violation(final_outs, full_pspec, cfg.seed) is None, \
        "synthesized block fails its spec"
    slots = sum(r.slots_used for r in runs)
    return SynthesisResult(block, total.iterations, total.counterexamples,
                           slots, time.perf_counter() - start, tuple(runs))


def _original_exprs(block: Block) -> dict[str, BoolExpr]:
    """Per-output expressions of the block with temps inlined."""
    inputs = {name: Var(name) for name in block.interface.inputs}
    env = _symbolic_cycle(block, {}, inputs)
    return {o: env[o] for o in block.interface.outputs}


def _repair_rounds(originals: list[_SlotShape], inputs: Sequence[str],
                   output: str, cfg: SynthConfig):
    n_orig = len(originals)
    max_extra = max(0, cfg.max_slots - n_orig)
    for edits in range(0, n_orig + max_extra + 1):
        for extra in range(0, min(edits, max_extra) + 1):
            yield _SlotTemplate(inputs, n_orig + extra, [output], prune=False,
                                originals=originals, edit_budget=edits)


def _minimal_edit_synthesis(block: Block, make_pspec, cfg: SynthConfig,
                            what: str = "repair") -> SynthesisResult:
    """Shared core of repair and extend: per output, find the candidate
    with the fewest changed slots (then fewest slots) meeting its spec."""
    start = time.perf_counter()
    _require_combinational(block.interface, what)
    inputs = block.interface.inputs
    originals = _original_exprs(block)
    exprs: dict[str, BoolExpr] = {}
    runs: list[OutputSynthesis] = []
    total = _RunStats()
    changed_any = False
    for output in block.interface.outputs:
        pspec = make_pspec(output)
        run_start = time.perf_counter()
        if _find_violation({output: originals[output]}, pspec, cfg.seed) is None:
            exprs[output] = originals[output]
            runs.append(OutputSynthesis(output, 0, 0, 0,
                                        time.perf_counter() - run_start))
            continue
        changed_any = True
        if not cfg.edit_penalty:
            run_stats = _RunStats()
            found = _run_cegis(
                (_SlotTemplate(inputs, k, [output]) for k in range(1, cfg.max_slots + 1)),
                pspec, cfg, run_stats)
        else:
            shapes = _encode_original(originals[output], inputs)
            run_stats = _RunStats()
            found = _run_cegis(_repair_rounds(shapes, inputs, output, cfg),
                               pspec, cfg, run_stats)
        if found is None:
            raise SizeBoundExceeded(cfg.max_slots)
        candidate, template = found
        exprs[output] = candidate[output]
        runs.append(OutputSynthesis(output, template.k, run_stats.iterations,
                                    run_stats.counterexamples,
                                    time.perf_counter() - run_start))
        total.iterations += run_stats.iterations
        total.counterexamples += run_stats.counterexamples
    if not changed_any:
        return SynthesisResult(block, 0, 0, 0, time.perf_counter() - start, tuple(runs))
    assigned = {s.target for s in block.body}
    body = tuple(Statement(o, exprs[o]) for o in block.interface.outputs
                 if o in assigned or exprs[o] != FALSE)
    repaired = Block(block.name, block.interface, body, block.lang)
    slots = sum(r.slots_used for r in runs)
    return SynthesisResult(repaired, total.iterations, total.counterexamples,
                           slots, time.perf_counter() - start, tuple(runs))


def repair(block: Block, spec: SpecFormula,
           cfg: SynthConfig = SynthConfig()) -> SynthesisResult:
    """Make the block satisfy the spec by changing as few of its expression
    nodes as possible (then as few slots as possible).  A block that
    already verifies is returned unchanged with zero iterations."""
    _check_same_interface(block, spec)
    outputs = block.interface.outputs
    per_assertions, coupling = _split_assertions(spec, outputs)
    if coupling:
        raise TypeCheckError("assertions couple several outputs; "
                             "repair handles per-output specs only")

    def make_pspec(output: str) -> _PointSpec:
        return _PointSpec(block.interface.inputs, [output], spec.obligations,
                          per_assertions[output])

    return _minimal_edit_synthesis(block, make_pspec, cfg)


def simplify(block: Block, cfg: SynthConfig = SynthConfig()) -> SynthesisResult:
    """Slot-minimal block with behavior exhaustively equal to the input;
    the result never uses more slots than the original encoding."""
    _require_combinational(block.interface, "simplify")
    start = time.perf_counter()
    inputs = block.interface.inputs
    originals = _original_exprs(block)
    assigned = {s.target for s in block.body}
    exprs: dict[str, BoolExpr] = {}
    runs: list[OutputSynthesis] = []
    total = _RunStats()
    for output in block.interface.outputs:
        if output not in assigned:
            continue
        pspec = _PointSpec(inputs, [output], {}, (), pin_block=block,
                           pin_outputs=[output], pin_release={})
        orig_size = len(_encode_original(originals[output], inputs))
        run_stats = _RunStats()
        run_start = time.perf_counter()
        bound = min(cfg.max_slots, orig_size)
        lowest = pspec.min_slot_bound()
        found = _run_cegis(
            (_SlotTemplate(inputs, k, [output]) for k in range(lowest, bound + 1)),
            pspec, cfg, run_stats)
        if found is None:
            # the original does not fit max_slots and nothing smaller works
            exprs[output] = originals[output]
            slots_used = orig_size
        else:
            candidate, template = found
            exprs[output] = candidate[output]
            slots_used = template.k
        runs.append(OutputSynthesis(output, slots_used, run_stats.iterations,
                                    run_stats.counterexamples,
                                    time.perf_counter() - run_start))
        total.iterations += run_stats.iterations
        total.counterexamples += run_stats.counterexamples
    body = tuple(Statement(o, exprs[o]) for o in block.interface.outputs
                 if o in exprs)
    result = Block(block.name, block.interface, body, block.lang)
    slots = sum(r.slots_used for r in runs)
    return SynthesisResult(result, total.iterations, total.counterexamples,
                           slots, time.perf_counter() - start, tuple(runs))


def extend(block: Block, extra: ConstraintList,
           cfg: SynthConfig = SynthConfig()) -> SynthesisResult:
    """Add the extra constraints' behavior with minimal edits; where the
    extra constraints say nothing, the original behavior is preserved
    (new constraints win on overlap)."""
    extra_spec = compile_spec(extra)
    _check_same_interface(block, extra_spec)
    outputs = block.interface.outputs
    per_assertions, coupling = _split_assertions(extra_spec, outputs)
    if coupling:
        raise TypeCheckError("assertions couple several outputs; "
                             "extend handles per-output specs only")
    mentioned_in_assertions = {o for o in outputs
                               if any(o in expr_vars(c.expr)
                                      for c in extra_spec.assertions)}

    def make_pspec(output: str) -> _PointSpec:
        release = {output: tuple(c.guard for c in
                                 extra_spec.obligations.get(output, ()))}
        pin_outputs = [] if output in mentioned_in_assertions else [output]
        return _PointSpec(block.interface.inputs, [output],
                          extra_spec.obligations, per_assertions[output],
                          pin_block=block, pin_outputs=pin_outputs,
                          pin_release=release)

    return _minimal_edit_synthesis(block, make_pspec, cfg, what="extend")
