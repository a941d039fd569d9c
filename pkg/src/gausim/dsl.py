"""Text format for circuits: hand-written lexer + recursive descent parser.

The format is line-oriented only by convention; statements end with ``;``
and ``#`` starts a comment.  See docs/GRAMMAR.md for the grammar.  The
serializer emits one canonical statement per line with floats printed via
``repr`` (shortest exact round-trip), so parse(serialize(c)) reproduces an
equivalent circuit.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np

from . import circuit as ir
from . import jsonio
from .errors import CircuitSemanticError, CircuitSyntaxError

_NUMBER_RE = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | symbol | eof
    value: str
    line: int
    col: int


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _skip_ws(self, pos, line, col):
        text = self.text
        while pos < len(text):
            ch = text[pos]
            if ch == "#":
                while pos < len(text) and text[pos] != "\n":
                    pos += 1
            elif ch == "\n":
                pos += 1
                line += 1
                col = 1
            elif ch in " \t\r":
                pos += 1
                col += 1
            else:
                break
        return pos, line, col

    def _scan(self):
        pos, line, col = self._skip_ws(self.pos, self.line, self.col)
        text = self.text
        if pos >= len(text):
            return _Token("eof", "", line, col), pos, line, col
        ch = text[pos]
        if text.startswith("->", pos):
            return _Token("symbol", "->", line, col), pos + 2, line, col + 2
        if ch in ";=()+-*{}[],":
            return _Token("symbol", ch, line, col), pos + 1, line, col + 1
        m = _NUMBER_RE.match(text, pos)
        if m:
            return _Token("number", m.group(0), line, col), m.end(), line, col + len(m.group(0))
        m = _IDENT_RE.match(text, pos)
        if m:
            return _Token("ident", m.group(0), line, col), m.end(), line, col + len(m.group(0))
        return _Token("symbol", ch, line, col), pos + 1, line, col + 1

    def peek(self) -> _Token:
        tok, _, _, _ = self._scan()
        return tok

    def next(self) -> _Token:
        tok, self.pos, self.line, self.col = self._scan()
        return tok

    def read_json_blob(self) -> str:
        """Consume a balanced {...} object from the current position."""
        pos, line, col = self._skip_ws(self.pos, self.line, self.col)
        text = self.text
        if pos >= len(text) or text[pos] != "{":
            found = text[pos] if pos < len(text) else "end of input"
            raise CircuitSyntaxError(line, col, "'{' starting a JSON object", found)
        depth = 0
        i = pos
        in_string = False
        while i < len(text):
            ch = text[i]
            if in_string:
                if ch == "\\":
                    i += 1
                elif ch == '"':
                    in_string = False
            elif ch == '"':
                in_string = True
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    blob = text[pos : i + 1]
                    consumed = text[self.pos : i + 1]
                    self.line += consumed.count("\n")
                    last_nl = consumed.rfind("\n")
                    if last_nl >= 0:
                        self.col = len(consumed) - last_nl
                    else:
                        self.col += len(consumed)
                    self.pos = i + 1
                    return blob
            i += 1
        raise CircuitSyntaxError(line, col, "matching '}'", "end of input")


class _Parser:
    def __init__(self, text: str):
        self.lex = _Lexer(text)

    def _fail(self, expected, tok=None):
        tok = tok or self.lex.peek()
        found = tok.value if tok.kind != "eof" else "end of input"
        raise CircuitSyntaxError(tok.line, tok.col, expected, found)

    def _expect_symbol(self, sym):
        tok = self.lex.next()
        if tok.kind != "symbol" or tok.value != sym:
            self._fail(f"'{sym}'", tok)
        return tok

    def _expect_ident(self, what="identifier"):
        tok = self.lex.next()
        if tok.kind != "ident":
            self._fail(what, tok)
        return tok

    def _expect_int(self):
        tok = self.lex.next()
        if tok.kind != "number" or not tok.value.isdigit():
            self._fail("integer", tok)
        return int(tok.value)

    def _number(self):
        sign = 1.0
        tok = self.lex.peek()
        if tok.kind == "symbol" and tok.value in "+-":
            self.lex.next()
            sign = -1.0 if tok.value == "-" else 1.0
            tok = self.lex.peek()
        if tok.kind != "number":
            self._fail("number", tok)
        self.lex.next()
        value = sign * float(tok.value)
        if not np.isfinite(value):
            raise CircuitSemanticError(f"non-finite literal {tok.value}", line=tok.line)
        return value

    def _affine_term(self):
        """[sign] (NUMBER ['*' IDENT] | IDENT ['*' NUMBER])."""
        sign = 1.0
        tok = self.lex.peek()
        if tok.kind == "symbol" and tok.value in "+-":
            self.lex.next()
            sign = -1.0 if tok.value == "-" else 1.0
            tok = self.lex.peek()
        if tok.kind == "number":
            self.lex.next()
            coeff = sign * float(tok.value)
            nxt = self.lex.peek()
            if nxt.kind == "symbol" and nxt.value == "*":
                self.lex.next()
                reg = self._expect_ident("register name")
                return 0.0, [(reg.value, coeff)]
            return coeff, []
        if tok.kind == "ident":
            self.lex.next()
            nxt = self.lex.peek()
            if nxt.kind == "symbol" and nxt.value == "*":
                self.lex.next()
                num = self.lex.next()
                if num.kind != "number":
                    self._fail("number", num)
                return 0.0, [(tok.value, sign * float(num.value))]
            return 0.0, [(tok.value, sign)]
        self._fail("number or register name", tok)

    def _affine(self) -> ir.AffineExpr:
        const, terms = self._affine_term()
        while True:
            tok = self.lex.peek()
            if tok.kind == "symbol" and tok.value in "+-":
                c, t = self._affine_term()
                const += c
                terms.extend(t)
            else:
                break
        return ir.AffineExpr(const, tuple(terms))

    def _value(self):
        """Parameter value: signed number, or parenthesized affine expression."""
        tok = self.lex.peek()
        if tok.kind == "symbol" and tok.value == "(":
            self.lex.next()
            expr = self._affine()
            self._expect_symbol(")")
            return expr
        return self._number()

    def _args_until(self, stop_symbols):
        """Mix of positional mode ints and key=value pairs."""
        modes, params = [], {}
        while True:
            tok = self.lex.peek()
            if tok.kind == "symbol" and tok.value in stop_symbols:
                return tuple(modes), params
            if tok.kind == "eof":
                self._fail("argument or statement terminator", tok)
            if tok.kind == "number":
                if not tok.value.isdigit():
                    self._fail("mode index (integer)", tok)
                self.lex.next()
                modes.append(int(tok.value))
            elif tok.kind == "ident":
                self.lex.next()
                self._expect_symbol("=")
                key = tok.value
                if key in params:
                    raise CircuitSemanticError(
                        f"duplicate parameter {key!r}", line=tok.line
                    )
                params[key] = self._value()
            else:
                self._fail("mode index or key=value argument", tok)

    def _channel_stmt(self, name_tok):
        modes, params = self._args_until({";"})
        self._expect_symbol(";")
        has_expr = any(
            isinstance(v, ir.AffineExpr) and not v.is_constant for v in params.values()
        )
        if has_expr:
            wrapped = {
                k: v if isinstance(v, ir.AffineExpr) else ir.AffineExpr(v)
                for k, v in params.items()
            }
            return ir.CondChannelInstr(name_tok.value, modes, wrapped)
        consts = {
            k: (v.const if isinstance(v, ir.AffineExpr) else v) for k, v in params.items()
        }
        return ir.ChannelInstr(name_tok.value, modes, consts)

    def _measure_stmt(self):
        kind = self._expect_ident("measurement kind")
        modes, params = self._args_until({"->"})
        self._expect_symbol("->")
        for key, value in params.items():
            if isinstance(value, ir.AffineExpr):
                raise CircuitSemanticError(
                    f"measurement parameter {key!r} must be a constant", line=kind.line
                )
        registers = []
        while True:
            tok = self.lex.peek()
            if tok.kind == "symbol" and tok.value == ";":
                self.lex.next()
                break
            reg = self._expect_ident("register name")
            registers.append(reg.value)
        if not registers:
            self._fail("register name")
        return ir.MeasureInstr(kind.value, modes, params, tuple(registers))

    def _raw_stmt(self):
        blob = self.lex.read_json_blob()
        self._expect_symbol(";")
        try:
            channel = jsonio.channel_from_dict(json.loads(blob))
        except (ValueError, KeyError, TypeError) as exc:
            raise CircuitSemanticError(f"bad raw channel JSON: {exc}") from exc
        return ir.RawChannelInstr(channel)

    def _init_stmt(self):
        name = self._expect_ident("initial state name")
        if name.value == "explicit":
            blob = self.lex.read_json_blob()
            self._expect_symbol(";")
            try:
                state = jsonio.state_from_dict(json.loads(blob))
            except (ValueError, KeyError, TypeError) as exc:
                raise CircuitSemanticError(f"bad explicit state JSON: {exc}") from exc
            return ir.StateDescriptor("explicit", state=state)
        if name.value not in ir.INIT_SIGNATURES:
            self._fail("initial state name", name)
        modes, params = self._args_until({";"})
        self._expect_symbol(";")
        for key, value in params.items():
            if isinstance(value, ir.AffineExpr):
                raise CircuitSemanticError(
                    f"initial-state parameter {key!r} must be a constant", line=name.line
                )
        n_args, names, _ = ir.INIT_SIGNATURES[name.value]
        if len(modes) != n_args:
            raise CircuitSemanticError(
                f"init {name.value} takes {n_args} mode argument(s)", line=name.line
            )
        for pname in names:
            if pname not in params:
                raise CircuitSemanticError(
                    f"init {name.value} missing parameter {pname!r}", line=name.line
                )
        return ir.StateDescriptor(name.value, modes, params)

    def parse(self) -> ir.Circuit:
        tok = self.lex.next()
        if tok.kind != "ident" or tok.value != "modes":
            self._fail("keyword 'modes'", tok)
        n_modes = self._expect_int()
        self._expect_symbol(";")
        init = ir.StateDescriptor("vacuum")
        instructions = []
        stmt_lines = []
        seen_instr = False
        seen_init = False
        while True:
            tok = self.lex.peek()
            if tok.kind == "eof":
                break
            if tok.kind != "ident":
                self._fail("instruction name", tok)
            self.lex.next()
            if tok.value == "init":
                if seen_init or seen_instr:
                    raise CircuitSemanticError(
                        "init must appear once, before any instruction", line=tok.line
                    )
                init = self._init_stmt()
                seen_init = True
                continue
            seen_instr = True
            stmt_lines.append(tok.line)
            if tok.value == "measure":
                instructions.append(self._measure_stmt())
            elif tok.value == "raw":
                instructions.append(self._raw_stmt())
            elif tok.value in ir.CHANNEL_SIGNATURES:
                instructions.append(self._channel_stmt(tok))
            else:
                self._fail("instruction name", tok)
        result = ir.Circuit(n_modes, init, tuple(instructions))
        try:
            ir.validate(result)
        except CircuitSemanticError as exc:
            if exc.instruction_index is not None and exc.line is None:
                raise CircuitSemanticError(
                    str(exc),
                    instruction_index=exc.instruction_index,
                    line=stmt_lines[exc.instruction_index],
                ) from None
            raise
        return result


def parse(text: str) -> ir.Circuit:
    """Parse circuit text; raises CircuitSyntaxError / CircuitSemanticError."""
    return _Parser(text).parse()


def _fmt(x: float) -> str:
    return repr(float(x))


def _fmt_affine(expr: ir.AffineExpr) -> str:
    parts = [_fmt(expr.const)]
    for name, coeff in expr.terms:
        if coeff >= 0:
            parts.append(f"+ {_fmt(coeff)}*{name}")
        else:
            parts.append(f"- {_fmt(-coeff)}*{name}")
    return "(" + " ".join(parts) + ")"


def _fmt_params(names, params) -> list:
    out = []
    for pname in names:
        if pname not in params:
            continue
        value = params[pname]
        if isinstance(value, ir.AffineExpr):
            if value.is_constant:
                out.append(f"{pname}={_fmt(value.const)}")
            else:
                out.append(f"{pname}={_fmt_affine(value)}")
        else:
            out.append(f"{pname}={_fmt(value)}")
    return out


def serialize(circuit: ir.Circuit) -> str:
    """Canonical text form; parse(serialize(c)) is equivalent to c."""
    lines = [f"modes {circuit.n_modes};"]
    init = circuit.initial_state
    if init.name == "explicit":
        lines.append(f"init explicit {jsonio.dumps(jsonio.state_to_dict(init.state))};")
    elif init.name != "vacuum":
        _, names, _ = ir.INIT_SIGNATURES[init.name]
        parts = ["init", init.name]
        parts += [str(m) for m in init.modes]
        parts += _fmt_params(names, init.params)
        lines.append(" ".join(parts) + ";")
    for instr in circuit.instructions:
        if isinstance(instr, (ir.ChannelInstr, ir.CondChannelInstr)):
            _, names, _ = ir.CHANNEL_SIGNATURES[instr.name]
            parts = [instr.name] + [str(m) for m in instr.modes]
            parts += _fmt_params(names, instr.params)
            lines.append(" ".join(parts) + ";")
        elif isinstance(instr, ir.RawChannelInstr):
            lines.append(f"raw {jsonio.dumps(jsonio.channel_to_dict(instr.channel))};")
        elif isinstance(instr, ir.MeasureInstr):
            _, names, _, _ = ir.MEASURE_SIGNATURES[instr.kind]
            parts = ["measure", instr.kind] + [str(m) for m in instr.modes]
            parts += _fmt_params(names, instr.params)
            parts.append("->")
            parts += list(instr.registers)
            lines.append(" ".join(parts) + ";")
        else:
            raise TypeError(f"cannot serialize {type(instr).__name__}")
    return "\n".join(lines) + "\n"
