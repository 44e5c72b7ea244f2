"""Concrete syntax for the two textual block dialects.

Structured Text (ST) is the Pascal-like assignment language; Instruction
List (IL) is the accumulator language with LD/ST and deferred operator
groups.  Both share the VAR section syntax for the interface.  Emission is
canonical and byte-deterministic, and parsing an emitted block yields the
same interface and expression trees back.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .blocks import (
    MAX_EXPR_DEPTH, And, Block, BlockInterface, BoolExpr, Const, Direction,
    Lang, Not, Or, Statement, TypeCheckError, Var, VarDecl, Xor, expr_depth,
)

_SECTION_KEYWORDS = {
    "VAR_INPUT": Direction.INPUT,
    "VAR_OUTPUT": Direction.OUTPUT,
    "VAR": Direction.STATE,
    "VAR_TEMP": Direction.TEMP,
}

_SECTION_FOR_DIRECTION = {d: kw for kw, d in _SECTION_KEYWORDS.items()}

_KEYWORDS = frozenset(_SECTION_KEYWORDS) | {
    "FUNCTION_BLOCK", "END_FUNCTION_BLOCK", "END_VAR", "BEGIN",
    "NOT", "AND", "OR", "XOR", "TRUE", "FALSE", "BOOL",
}


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError("source positions are 1-based")


class ParseError(Exception):
    def __init__(self, span: SourceSpan, message: str, expected: tuple[str, ...] = ()):
        hint = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{span.line}:{span.column}: {message}{hint}")
        self.span = span
        self.message = message
        self.expected = tuple(expected)


class AccumulatorUndefined(ParseError):
    """A combining or store instruction ran before any load."""


class UnbalancedParen(ParseError):
    """A deferred operator group was closed without being open, or left open."""


# --------------------------------------------------------------------------
# Tokenizer (shared by ST and the IL interface sections)


@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT, KEYWORD, SYMBOL, EOF
    text: str
    line: int
    column: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column, max(1, len(self.text)))


_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|:=|[():;]")


def _tokenize(text: str, first_line: int = 1) -> list[_Token]:
    tokens: list[_Token] = []
    lines = text.splitlines()
    for offset, raw_line in enumerate(lines):
        line_no = first_line + offset
        line = raw_line.split("//", 1)[0]
        pos = 0
        while pos < len(line):
            ch = line[pos]
            if ch.isspace():
                pos += 1
                continue
            match = _TOKEN_RE.match(line, pos)
            if not match:
                raise ParseError(SourceSpan(line_no, pos + 1, 1),
                                 f"unexpected character {ch!r}")
            word = match.group(0)
            kind = "KEYWORD" if word in _KEYWORDS else (
                "IDENT" if word[0].isalpha() or word[0] == "_" else "SYMBOL")
            tokens.append(_Token(kind, word, line_no, pos + 1))
            pos = match.end()
    last_line = first_line + max(0, len(lines) - 1)
    last_col = len(lines[-1]) + 1 if lines else 1
    tokens.append(_Token("EOF", "", last_line, last_col))
    return tokens


class _TokenStream:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def accept(self, text: str) -> Optional[_Token]:
        tok = self.peek()
        if tok.text == text and tok.kind != "EOF":
            return self.next()
        return None

    def expect(self, text: str, what: Optional[str] = None) -> _Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "EOF":
            shown = tok.text if tok.kind != "EOF" else "end of input"
            raise ParseError(tok.span, f"unexpected {shown!r}",
                             expected=(what or repr(text),))
        return self.next()

    def expect_ident(self, what: str = "identifier") -> _Token:
        tok = self.peek()
        if tok.kind != "IDENT":
            shown = tok.text if tok.kind != "EOF" else "end of input"
            raise ParseError(tok.span, f"unexpected {shown!r}", expected=(what,))
        return self.next()


# --------------------------------------------------------------------------
# Expression grammar: expr := xorterm (OR xorterm)*
#                     xorterm := andterm (XOR andterm)*
#                     andterm := unary (AND unary)*
#                     unary := NOT unary | ( expr ) | TRUE | FALSE | ident


def _parse_expr(ts: _TokenStream) -> BoolExpr:
    expr = _parse_xorterm(ts)
    while ts.accept("OR"):
        expr = Or(expr, _parse_xorterm(ts))
    return expr


def _parse_xorterm(ts: _TokenStream) -> BoolExpr:
    expr = _parse_andterm(ts)
    while ts.accept("XOR"):
        expr = Xor(expr, _parse_andterm(ts))
    return expr


def _parse_andterm(ts: _TokenStream) -> BoolExpr:
    expr = _parse_unary(ts)
    while ts.accept("AND"):
        expr = And(expr, _parse_unary(ts))
    return expr


def _parse_unary(ts: _TokenStream) -> BoolExpr:
    if ts.accept("NOT"):
        return Not(_parse_unary(ts))
    if ts.accept("("):
        expr = _parse_expr(ts)
        ts.expect(")")
        return expr
    if ts.accept("TRUE"):
        return Const(True)
    if ts.accept("FALSE"):
        return Const(False)
    tok = ts.peek()
    if tok.kind == "IDENT":
        ts.next()
        return Var(tok.text)
    shown = tok.text if tok.kind != "EOF" else "end of input"
    raise ParseError(tok.span, f"unexpected {shown!r}",
                     expected=("NOT", "(", "TRUE", "FALSE", "identifier"))


def parse_expression(text: str, interface: Optional[BlockInterface] = None) -> BoolExpr:
    """Parse a standalone ST expression; type-check it when an interface is given."""
    ts = _TokenStream(_tokenize(text))
    expr = _parse_expr(ts)
    tok = ts.peek()
    if tok.kind != "EOF":
        raise ParseError(tok.span, f"unexpected {tok.text!r} after expression")
    if expr_depth(expr) > MAX_EXPR_DEPTH:
        raise ParseError(SourceSpan(1, 1, 1), "expression too deep")
    if interface is not None:
        from .blocks import expr_vars
        for name in expr_vars(expr):
            if name not in interface:
                raise TypeCheckError(f"undeclared variable '{name}'")
    return expr


# --------------------------------------------------------------------------
# Interface sections


def _parse_sections(ts: _TokenStream) -> list[VarDecl]:
    decls: list[VarDecl] = []
    while ts.peek().text in _SECTION_KEYWORDS:
        direction = _SECTION_KEYWORDS[ts.next().text]
        while not ts.accept("END_VAR"):
            name_tok = ts.expect_ident("variable name or END_VAR")
            ts.expect(":")
            ts.expect("BOOL", "'BOOL'")
            ts.expect(";")
            try:
                decls.append(VarDecl(name_tok.text, direction))
            except TypeCheckError as exc:
                raise ParseError(name_tok.span, str(exc)) from None
    return decls


# --------------------------------------------------------------------------
# Structured Text


def parse_st(text: str) -> Block:
    """Parse a FUNCTION_BLOCK in the ST subset into a type-checked Block."""
    ts = _TokenStream(_tokenize(text))
    ts.expect("FUNCTION_BLOCK", "'FUNCTION_BLOCK'")
    name = ts.expect_ident("block name").text
    decls = _parse_sections(ts)
    interface = _build_interface(decls, ts)
    ts.expect("BEGIN", "'BEGIN'")
    body: list[Statement] = []
    while not ts.accept("END_FUNCTION_BLOCK"):
        target = ts.expect_ident("assignment target or END_FUNCTION_BLOCK")
        ts.expect(":=")
        rhs = _parse_expr(ts)
        semi = ts.expect(";")
        if expr_depth(rhs) > MAX_EXPR_DEPTH:
            raise ParseError(semi.span, "expression too deep")
        body.append(Statement(target.text, rhs))
    trailing = ts.peek()
    if trailing.kind != "EOF":
        raise ParseError(trailing.span, f"unexpected {trailing.text!r} after block")
    return Block(name, interface, tuple(body), Lang.ST)


def _build_interface(decls: list[VarDecl], ts: _TokenStream) -> BlockInterface:
    try:
        return BlockInterface(tuple(decls))
    except TypeCheckError as exc:
        raise ParseError(ts.peek().span, str(exc)) from None


# --------------------------------------------------------------------------
# Instruction List

_IL_PLAIN = {"LD": None, "LDN": None, "AND": And, "ANDN": And, "OR": Or,
             "ORN": Or, "XOR": Xor, "XORN": Xor}
_IL_DEFERRED = {"AND(": (And, False), "ANDN(": (And, True), "OR(": (Or, False),
                "ORN(": (Or, True), "XOR(": (Xor, False), "XORN(": (Xor, True)}

_IL_LINE_RE = re.compile(r"^([A-Z]+\(?|\))(?:\s+(\S+))?\s*$")


def parse_il(text: str) -> Block:
    """Parse an IL block: VAR sections, then one instruction per line."""
    lines = text.splitlines()
    index = 0

    def skip_blank(i: int) -> int:
        while i < len(lines) and not lines[i].split("//", 1)[0].strip():
            i += 1
        return i

    index = skip_blank(index)
    if index >= len(lines):
        raise ParseError(SourceSpan(1, 1, 1), "empty input",
                         expected=("'FUNCTION_BLOCK'",))
    header = lines[index].split("//", 1)[0].strip()
    match = re.match(r"^FUNCTION_BLOCK\s+([A-Za-z_][A-Za-z0-9_]*)$", header)
    if not match:
        raise ParseError(SourceSpan(index + 1, 1, max(1, len(header))),
                         "malformed header", expected=("'FUNCTION_BLOCK <name>'",))
    name = match.group(1)
    index += 1

    # interface sections: collect lines until the last END_VAR
    section_start = skip_blank(index)
    section_end = section_start
    scan = section_start
    while scan < len(lines):
        stripped = lines[scan].split("//", 1)[0].strip()
        first_word = stripped.split(" ", 1)[0] if stripped else ""
        if first_word in _SECTION_KEYWORDS:
            while scan < len(lines):
                if "END_VAR" in lines[scan].split("//", 1)[0]:
                    scan += 1
                    break
                scan += 1
            else:
                raise ParseError(SourceSpan(len(lines), 1, 1), "unterminated VAR section",
                                 expected=("'END_VAR'",))
            section_end = scan
            scan = skip_blank(scan)
        else:
            break
    section_text = "\n".join(lines[section_start:section_end])
    ts = _TokenStream(_tokenize(section_text, first_line=section_start + 1))
    decls = _parse_sections(ts)
    leftover = ts.peek()
    if leftover.kind != "EOF":
        raise ParseError(leftover.span, f"unexpected {leftover.text!r} in VAR sections")
    interface = _build_interface(decls, ts)

    body: list[Statement] = []
    acc: Optional[BoolExpr] = None
    stack: list[tuple[type, bool, Optional[BoolExpr], SourceSpan]] = []
    ended = False
    for i in range(max(section_end, index), len(lines)):
        stripped = lines[i].split("//", 1)[0].strip()
        if not stripped:
            continue
        span = SourceSpan(i + 1, 1, len(stripped))
        if ended:
            raise ParseError(span, f"unexpected {stripped!r} after block")
        if stripped == "END_FUNCTION_BLOCK":
            ended = True
            continue
        match = _IL_LINE_RE.match(stripped)
        if not match:
            raise ParseError(span, f"malformed instruction {stripped!r}")
        mnemonic, operand = match.group(1), match.group(2)
        acc = _il_step(mnemonic, operand, acc, stack, body, span)
    if not ended:
        raise ParseError(SourceSpan(max(1, len(lines)), 1, 1),
                         "missing END_FUNCTION_BLOCK")
    if stack:
        raise UnbalancedParen(stack[-1][3], "unclosed deferred operator group")
    return Block(name, interface, tuple(body), Lang.IL)


def _operand_expr(operand: Optional[str], span: SourceSpan) -> BoolExpr:
    if operand is None:
        raise ParseError(span, "missing operand")
    if operand == "TRUE":
        return Const(True)
    if operand == "FALSE":
        return Const(False)
    if not re.match(r"^[A-Za-z_][A-Za-z0-9_]*$", operand):
        raise ParseError(span, f"bad operand {operand!r}")
    return Var(operand)


def _il_step(mnemonic: str, operand: Optional[str], acc: Optional[BoolExpr],
             stack: list, body: list[Statement], span: SourceSpan) -> Optional[BoolExpr]:
    if mnemonic == "LD" or mnemonic == "LDN":
        value = _operand_expr(operand, span)
        return Not(value) if mnemonic == "LDN" else value
    if mnemonic in _IL_DEFERRED:
        op, negate = _IL_DEFERRED[mnemonic]
        if acc is None:
            raise AccumulatorUndefined(span, f"{mnemonic} before any load")
        inner = _operand_expr(operand, span) if operand is not None else None
        stack.append((op, negate, acc, span))
        return inner
    if mnemonic == ")":
        if operand is not None:
            raise ParseError(span, "')' takes no operand")
        if not stack:
            raise UnbalancedParen(span, "')' without open group")
        op, negate, saved, _ = stack.pop()
        if acc is None:
            raise AccumulatorUndefined(span, "empty deferred operator group")
        return op(saved, Not(acc) if negate else acc)
    if mnemonic == "NOT":
        if operand is not None:
            raise ParseError(span, "NOT takes no operand")
        if acc is None:
            raise AccumulatorUndefined(span, "NOT before any load")
        return Not(acc)
    if mnemonic == "ST":
        if acc is None:
            raise AccumulatorUndefined(span, "ST before any load")
        target = _operand_expr(operand, span)
        if not isinstance(target, Var):
            raise ParseError(span, "ST needs a variable operand")
        body.append(Statement(target.name, acc))
        return acc
    if mnemonic in _IL_PLAIN:
        if acc is None:
            raise AccumulatorUndefined(span, f"{mnemonic} before any load")
        value = _operand_expr(operand, span)
        if mnemonic.endswith("N"):
            value = Not(value)
        op = _IL_PLAIN[mnemonic]
        return op(acc, value)
    raise ParseError(span, f"unknown mnemonic {mnemonic!r}")


# --------------------------------------------------------------------------
# Emission

_PRECEDENCE = {Or: 1, Xor: 2, And: 3, Not: 4}
_BINARY_NAMES = {And: "AND", Or: "OR", Xor: "XOR"}


def format_expression(expr: BoolExpr) -> str:
    """Canonical ST rendering: single spaces, parentheses only where needed."""
    return _format(expr, 0, False)


def _format(expr: BoolExpr, parent_prec: int, is_right: bool) -> str:
    if isinstance(expr, Const):
        return "TRUE" if expr.value else "FALSE"
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Not):
        return "NOT " + _format(expr.operand, _PRECEDENCE[Not], False)
    prec = _PRECEDENCE[type(expr)]
    text = (_format(expr.left, prec, False) + f" {_BINARY_NAMES[type(expr)]} "
            + _format(expr.right, prec, True))
    if prec < parent_prec or (prec == parent_prec and is_right):
        return "(" + text + ")"
    return text


def _emit_sections(interface: BlockInterface) -> list[str]:
    lines: list[str] = []
    current: Optional[Direction] = None
    for decl in interface.decls:
        if decl.direction is not current:
            if current is not None:
                lines.append("END_VAR")
            lines.append(_SECTION_FOR_DIRECTION[decl.direction])
            current = decl.direction
        lines.append(f"  {decl.name} : BOOL;")
    if current is not None:
        lines.append("END_VAR")
    return lines


def _emit_st(block: Block) -> str:
    lines = [f"FUNCTION_BLOCK {block.name}"]
    lines += _emit_sections(block.interface)
    lines.append("BEGIN")
    for stmt in block.body:
        lines.append(f"  {stmt.target} := {format_expression(stmt.rhs)};")
    lines.append("END_FUNCTION_BLOCK")
    return "\n".join(lines) + "\n"


def _compile_il_expr(expr: BoolExpr) -> list[str]:
    """Accumulator instruction sequence whose final value is `expr`.

    The sequence always starts with LD or LDN; non-leaf right operands use
    deferred operator groups, which reproduces the tree exactly on re-parse.
    """
    if isinstance(expr, Var):
        return [f"LD {expr.name}"]
    if isinstance(expr, Const):
        return [f"LD {'TRUE' if expr.value else 'FALSE'}"]
    if isinstance(expr, Not):
        if isinstance(expr.operand, Var):
            return [f"LDN {expr.operand.name}"]
        return _compile_il_expr(expr.operand) + ["NOT"]
    mnemonic = _BINARY_NAMES[type(expr)]
    code = _compile_il_expr(expr.left)
    right = expr.right
    if isinstance(right, Var):
        code.append(f"{mnemonic} {right.name}")
    elif isinstance(right, Const):
        code.append(f"{mnemonic} {'TRUE' if right.value else 'FALSE'}")
    elif isinstance(right, Not) and isinstance(right.operand, Var):
        code.append(f"{mnemonic}N {right.operand.name}")
    else:
        sub = _compile_il_expr(right)
        first = sub[0]
        if first.startswith("LD "):
            code.append(f"{mnemonic}( {first[3:]}")
            code.extend(sub[1:])
        else:
            code.append(f"{mnemonic}(")
            code.extend(sub)
        code.append(")")
    return code


def _emit_il(block: Block) -> str:
    lines = [f"FUNCTION_BLOCK {block.name}"]
    lines += _emit_sections(block.interface)
    for stmt in block.body:
        lines += _compile_il_expr(stmt.rhs)
        lines.append(f"ST {stmt.target}")
    lines.append("END_FUNCTION_BLOCK")
    return "\n".join(lines) + "\n"


def emit(block: Block, target_lang: Lang) -> str:
    """Deterministic canonical source text for the block in the target dialect."""
    target_lang = Lang(target_lang)
    if target_lang is Lang.ST:
        return _emit_st(block)
    return _emit_il(block)


def parse(text: str, lang: Lang) -> Block:
    return parse_st(text) if Lang(lang) is Lang.ST else parse_il(text)


def translate(block: Block, target_lang: Lang) -> Block:
    """Re-express the block in the target dialect; externally visible
    behavior is unchanged (the body is re-derived from the emitted text)."""
    target_lang = Lang(target_lang)
    return parse(emit(block, target_lang), target_lang)
