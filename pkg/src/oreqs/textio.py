"""Text formats for rings, Ore polynomials, matrices, problems and results.

Problem files (``.oreq``, UTF-8, ``#`` starts a comment)::

    name = ex33
    expected_rank = 2
    ring { field = Qt; sigma = shift(1); delta = zero }
    let a = 2
    matrix 3 x 3
    1 - (2*t/(1+t))*x ; 2*t - (2*t*(3+2*t)/(1+t))*x ; (2*t/(1+t)^2)*x
    ...

Expression grammar (entries, ``let`` values, sigma parameters)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' INT)?
    atom   := INT | NAME | '(' expr ')'

Names are the generators of the field (``i``, ``t``, ``q``), ``x`` for the
Ore variable, and ``let`` bindings.  Coefficients are written on the left:
once a factor involves ``x`` only further powers of ``x`` may follow it in
the same term, ``x`` may not be divided by, and among expressions involving
``x`` only ``x`` itself may carry an exponent.  So ``t^2*x^2`` is accepted
while ``x*t`` and ``(t*x)^2`` are rejected.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any

from .matrix import OreMatrix
from .ore import (
    Conjugation,
    Identity,
    OrePoly,
    QDifference,
    RingSpec,
    Scale,
    Shift,
    TDerivative,
    ZeroDerivation,
)
from .scalars import (
    QQ,
    QQi,
    Field,
    FieldMismatchError,
    RationalFunctionField,
    _join_terms,
    _paren,
)

__all__ = [
    "ParseError",
    "ProblemFile",
    "ParsedResult",
    "parse_field",
    "parse_ring",
    "parse_expr",
    "parse_poly",
    "parse_matrix",
    "parse_problem",
    "render_field",
    "render_ring",
    "render_poly",
    "render_matrix",
    "render_problem",
    "print_result",
    "result_to_json",
    "parse_result",
]


class ParseError(ValueError):
    """Syntax or semantic error, with 1-based line and column when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message, self.line, self.col = message, line, col
        where = f"line {line}, col {col}: " if line is not None else ""
        super().__init__(where + message)


# ---------------------------------------------------------------------------
# fields and rings
# ---------------------------------------------------------------------------

_SHORT_FIELDS = {"Q": "Q", "Qi": "Q(i)", "Qt": "Q(t)", "Qqt": "Q(q)(t)", "Qit": "Q(i)(t)"}
_SHORT_BY_LONG = {v: k for k, v in _SHORT_FIELDS.items()}


def parse_field(name: str) -> Field:
    """``Q``, ``Qi``, ``Qt``, ``Qqt``, ``Qit`` or the long forms ``Q(i)(t)`` etc."""
    name = name.strip().replace(" ", "")
    name = _SHORT_FIELDS.get(name, name)
    m = re.fullmatch(r"Q((?:\([A-Za-z]\w*\))*)", name)
    if not m:
        raise ParseError(f"unknown field {name!r}")
    gens = re.findall(r"\((\w+)\)", m.group(1))
    K: Field = QQ
    if gens and gens[0] == "i":
        K = QQi
        gens = gens[1:]
    for v in gens:
        if v in ("x", "i") or v in K.gens():
            raise ParseError(f"bad variable name {v!r} in field {name!r}")
        K = RationalFunctionField(K, v)
    return K


def render_field(K: Field) -> str:
    long = K.name
    return _SHORT_BY_LONG.get(long, long)


def render_ring(ring: RingSpec) -> str:
    return (
        f"ring {{ field = {render_field(ring.field)}; "
        f"sigma = {ring.sigma.text(ring.field)}; delta = {ring.delta.text()} }}"
    )


def parse_ring(text: str, line: int = 1) -> RingSpec:
    """Parse ``ring { field = ...; sigma = ...; delta = ... }``."""
    m = re.fullmatch(r"\s*ring\s*\{(.*)\}\s*", text, re.S)
    if not m:
        raise ParseError("expected 'ring { ... }'", line, 1)
    entries: dict[str, str] = {}
    for part in re.split(r"[;\n]", m.group(1)):
        if not part.strip():
            continue
        if "=" not in part:
            raise ParseError(f"expected 'key = value' in ring, got {part.strip()!r}", line)
        key, value = (s.strip() for s in part.split("=", 1))
        if key not in ("field", "sigma", "delta"):
            raise ParseError(f"unknown ring key {key!r}", line)
        entries[key] = value
    if "field" not in entries:
        raise ParseError("ring needs a field", line)
    K = parse_field(entries["field"])
    sigma_text = entries.get("sigma", "id")
    delta_text = entries.get("delta", "zero")

    sm = re.fullmatch(r"(\w+)\s*(?:\((.*)\))?", sigma_text, re.S)
    if not sm:
        raise ParseError(f"bad sigma {sigma_text!r}", line)
    kind, arg = sm.group(1), sm.group(2)
    if kind in ("id", "identity") and arg is None:
        sigma: Any = Identity()
    elif kind == "conj" and arg is None:
        sigma = Conjugation()
    elif kind in ("shift", "scale") and arg is not None:
        if not isinstance(K, RationalFunctionField):
            raise ParseError(f"sigma = {kind}(...) needs a rational function field, not {render_field(K)}", line)
        value = parse_expr(arg, K.base, line=line)
        sigma = Shift(value) if kind == "shift" else Scale(value)
    else:
        raise ParseError(f"unknown sigma {sigma_text!r}", line)

    if delta_text == "zero":
        delta: Any = ZeroDerivation()
    elif delta_text in ("ddt", "d/dt"):
        delta = TDerivative()
    elif delta_text == "qdiff":
        if not isinstance(sigma, Scale):
            raise ParseError("delta = qdiff needs sigma = scale(q)", line)
        delta = QDifference(sigma.u)
    else:
        raise ParseError(f"unknown delta {delta_text!r}", line)
    try:
        return RingSpec(K, sigma, delta)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(str(exc), line) from exc


# ---------------------------------------------------------------------------
# expressions
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(.))")


def _tokenize(text: str, line: int, col0: int):
    text = text.replace("−", "-").rstrip()
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.lastindex is None:
            break
        start = m.start(m.lastindex)
        kind = ("int", "name", "op")[m.lastindex - 1]
        value = m.group(m.lastindex)
        if kind == "op" and value not in "+-*/^()":
            raise ParseError(f"unexpected character {value!r}", line, col0 + start)
        toks.append((kind, value, col0 + start))
        pos = m.end()
    toks.append(("end", "", col0 + len(text)))
    return toks


class _Parser:
    def __init__(self, text, field_, ring=None, env=None, line=1, col=1):
        self.K = field_
        self.ring = ring
        self.line = line
        self.toks = _tokenize(text, line, col)
        self.pos = 0
        names = dict(field_.gens())
        if ring is not None:
            names = {k: ring(v) for k, v in names.items()}
            names["x"] = ring.x
        for k, v in (env or {}).items():
            names[k] = ring(v) if ring is not None else v
        self.names = names

    # -- helpers -------------------------------------------------------------

    def error(self, msg, tok=None):
        tok = tok or self.toks[self.pos]
        return ParseError(msg, self.line, tok[2])

    def peek(self):
        return self.toks[self.pos]

    def take(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def const(self, n: int):
        return self.ring(n) if self.ring is not None else self.K(n)

    @staticmethod
    def has_x(v) -> bool:
        return isinstance(v, OrePoly) and v.deg >= 1

    @staticmethod
    def is_x_power(v) -> bool:
        return isinstance(v, OrePoly) and v.deg >= 1 and v.lc == 1 and not any(v.coeffs[:-1])

    def scalar(self, v):
        return v.constant() if isinstance(v, OrePoly) else v

    # -- grammar -------------------------------------------------------------

    def parse(self):
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        v = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return v

    def expr(self):
        v = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            tok = self.take()
            w = self.unary()
            if tok[1] == "*":
                if self.has_x(v) and not self.is_x_power(w):
                    raise self.error("coefficients must stand left of x (write t*x, not x*t)", tok)
                v = v * w
            else:
                if self.has_x(v) or self.has_x(w):
                    raise self.error("division is only defined for coefficients, not for x", tok)
                d = self.scalar(w)
                if not d:
                    raise self.error("division by zero", tok)
                q = self.scalar(v) / d
                v = self.ring(q) if self.ring is not None else q
        return v

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("-", "+"):
            self.take()
            v = self.unary()
            return -v if tok[1] == "-" else v
        return self.power()

    def power(self):
        v = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            tok = self.take()
            e = self.take()
            if e[0] != "int":
                raise self.error("exponent must be a nonnegative integer literal", e)
            if self.has_x(v) and not (isinstance(v, OrePoly) and v == self.ring.x):
                raise self.error("only x itself may be raised to a power", tok)
            v = v ** int(e[1])
        return v

    def atom(self):
        tok = self.take()
        kind, value = tok[0], tok[1]
        if kind == "int":
            return self.const(int(value))
        if kind == "name":
            if value not in self.names:
                where = render_field(self.K)
                raise self.error(f"unknown generator {value!r} (not available in {where})", tok)
            return self.names[value]
        if kind == "op" and value == "(":
            v = self.expr()
            close = self.take()
            if close[1] != ")":
                raise self.error("expected ')'", close)
            return v
        raise self.error(f"unexpected {value or 'end of input'!r}", tok)


def parse_expr(text: str, K: Field, env: dict | None = None, line: int = 1, col: int = 1):
    """Parse a field expression (no ``x``) into an element of ``K``."""
    try:
        return _Parser(text, K, None, env, line, col).parse()
    except FieldMismatchError as exc:
        raise ParseError(str(exc), line, col) from exc


def parse_poly(text: str, ring: RingSpec, env: dict | None = None, line: int = 1, col: int = 1) -> OrePoly:
    try:
        return _Parser(text, ring.field, ring, env, line, col).parse()
    except FieldMismatchError as exc:
        raise ParseError(str(exc), line, col) from exc


def render_poly(f: OrePoly) -> str:
    K = f.ring.field
    one = K.one
    terms = []
    for k, c in enumerate(f.coeffs):
        if not c:
            continue
        s = K.render(c)
        if k == 0:
            terms.append(s)
            continue
        mono = "x" if k == 1 else f"x^{k}"
        if c == one:
            terms.append(mono)
        elif c == -one:
            terms.append("-" + mono)
        else:
            terms.append(f"{_paren(s)}*{mono}")
    return _join_terms(terms)


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

_HEADER = re.compile(r"matrix(?:\s+([A-Za-z_]\w*))?\s+(\d+)\s*x\s*(\d+)\s*$")


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def _parse_matrix_lines(lines, start, ring, env):
    """Parse a matrix block beginning at ``lines[start]``; returns (name, matrix, next)."""
    lineno, header = lines[start]
    m = _HEADER.match(header.strip())
    if not m:
        raise ParseError("expected 'matrix s x t'", lineno, 1)
    name, s, t = m.group(1), int(m.group(2)), int(m.group(3))
    if s < 1 or t < 1:
        raise ParseError("matrix dimensions must be positive", lineno, 1)
    rows = []
    k = start + 1
    while len(rows) < s:
        if k >= len(lines):
            raise ParseError(f"matrix has {len(rows)} rows, header says {s}", lineno, 1)
        ln, text = lines[k]
        parts = text.split(";")
        if len(parts) != t:
            raise ParseError(f"row has {len(parts)} entries, expected {t}", ln, 1)
        row = []
        col = 1
        for part in parts:
            row.append(parse_poly(part, ring, env, ln, col))
            col += len(part) + 1
        rows.append(row)
        k += 1
    return name, OreMatrix(ring, rows), k


def _content_lines(text: str):
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if line.strip():
            out.append((n, line))
    return out


def parse_matrix(text: str, ring: RingSpec, env: dict | None = None) -> OreMatrix:
    """Parse a ``matrix s x t`` block (header line plus ``s`` rows)."""
    lines = _content_lines(text)
    if not lines:
        raise ParseError("empty matrix text")
    _, M, nxt = _parse_matrix_lines(lines, 0, ring, env)
    if nxt != len(lines):
        raise ParseError("trailing text after matrix", lines[nxt][0], 1)
    return M


def render_matrix(M: OreMatrix, name: str | None = None) -> str:
    s, t = M.shape
    head = f"matrix {name} {s} x {t}" if name else f"matrix {s} x {t}"
    body = ["; ".join(str(e) for e in row) for row in M.rows]
    return "\n".join([head] + body)


# ---------------------------------------------------------------------------
# problem files
# ---------------------------------------------------------------------------


@dataclass
class ProblemFile:
    ring: RingSpec
    matrix: OreMatrix
    name: str | None = None
    expected_rank: int | None = None
    params: dict[str, str] = field(default_factory=dict)


def _take_ring_block(lines, k):
    ln, text = lines[k]
    buf = [text]
    while "}" not in text:
        k += 1
        if k >= len(lines):
            raise ParseError("unterminated ring block", ln, 1)
        text = lines[k][1]
        buf.append(text)
    return ln, "\n".join(buf), k + 1


def parse_problem(text: str) -> ProblemFile:
    lines = _content_lines(text)
    ring = None
    matrix = None
    meta: dict[str, str] = {}
    params: dict[str, str] = {}
    env: dict[str, Any] = {}
    k = 0
    while k < len(lines):
        ln, line = lines[k]
        stripped = line.strip()
        if stripped.startswith("ring"):
            ln, block, k = _take_ring_block(lines, k)
            ring = parse_ring(block, ln)
            continue
        if stripped.startswith("let "):
            if ring is None:
                raise ParseError("'let' must come after the ring", ln, 1)
            m = re.fullmatch(r"let\s+([A-Za-z_]\w*)\s*=\s*(.+)", stripped)
            if not m:
                raise ParseError("expected 'let name = expression'", ln, 1)
            pname = m.group(1)
            if pname == "x" or pname in ring.field.gens():
                raise ParseError(f"cannot rebind generator {pname!r}", ln, 1)
            env[pname] = parse_expr(m.group(2), ring.field, env, ln)
            params[pname] = m.group(2).strip()
            k += 1
            continue
        if stripped.startswith("matrix"):
            if ring is None:
                raise ParseError("the ring must be declared before the matrix", ln, 1)
            if matrix is not None:
                raise ParseError("a problem file holds one matrix", ln, 1)
            _, matrix, k = _parse_matrix_lines(lines, k, ring, env)
            continue
        m = re.fullmatch(r"([A-Za-z_]\w*)\s*=\s*(.*)", stripped)
        if m:
            meta[m.group(1)] = m.group(2).strip()
            k += 1
            continue
        raise ParseError(f"unexpected line {stripped!r}", ln, 1)
    if ring is None:
        raise ParseError("missing ring declaration")
    if matrix is None:
        raise ParseError("missing matrix")
    expected = meta.get("expected_rank")
    if expected is not None:
        try:
            expected_rank = int(expected)
        except ValueError:
            raise ParseError(f"expected_rank must be an integer, got {expected!r}") from None
    else:
        expected_rank = None
    return ProblemFile(ring, matrix, meta.get("name"), expected_rank, params)


def render_problem(p: ProblemFile) -> str:
    out = []
    if p.name:
        out.append(f"name = {p.name}")
    if p.expected_rank is not None:
        out.append(f"expected_rank = {p.expected_rank}")
    out.append(render_ring(p.ring))
    for k, v in p.params.items():
        out.append(f"let {k} = {v}")
    out.append(render_matrix(p.matrix))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------


def print_result(result, verbosity: int = 0) -> str:
    """Text rendering of a :class:`~oreqs.qs.DiagResult`.

    ``verbosity`` 1 adds the numbered trace, 2 also prints the intermediate
    ``F`` stored with each step (requires a result computed with snapshots).
    """
    ring = result.U.ring
    out = [render_ring(ring), f"rank {result.r}"]
    out.append(render_matrix(result.U, "U"))
    out.append(render_matrix(result.Uinv, "Uinv"))
    out.append(render_matrix(result.D, "D"))
    out.append(f"basis {len(result.basis)}")
    for b in result.basis:
        out.append("; ".join(str(e) for e in b))
    if verbosity >= 1:
        out.append(f"trace {len(result.trace)}")
        for n, step in enumerate(result.trace, start=1):
            out.append(f"  {n}. {step.text()}")
            if verbosity >= 2 and step.snapshot is not None:
                for row in step.snapshot.rows:
                    out.append("       | " + "; ".join(str(e) for e in row))
    return "\n".join(out) + "\n"


def result_to_json(result) -> dict:
    """Machine-readable result document."""

    def mat(M):
        return [[str(e) for e in row] for row in M.rows]

    return {
        "ring": render_ring(result.U.ring),
        "rank": result.r,
        "U": mat(result.U),
        "Uinv": mat(result.Uinv),
        "D": mat(result.D),
        "basis": [[str(e) for e in b] for b in result.basis],
        "trace": [{"kind": st.kind, "text": st.text()} for st in result.trace],
    }


@dataclass
class ParsedResult:
    ring: RingSpec
    r: int
    U: OreMatrix
    Uinv: OreMatrix
    D: OreMatrix
    basis: list[tuple[OrePoly, ...]]
    trace: list = field(default_factory=list)


def _result_from_json(doc: dict) -> ParsedResult:
    try:
        ring = parse_ring(doc["ring"])

        def mat(rows):
            return OreMatrix(ring, [[parse_poly(e, ring) for e in row] for row in rows])

        basis = [tuple(parse_poly(e, ring) for e in row) for row in doc["basis"]]
        return ParsedResult(ring, int(doc["rank"]), mat(doc["U"]), mat(doc["Uinv"]), mat(doc["D"]), basis)
    except KeyError as exc:
        raise ParseError(f"result document lacks field {exc.args[0]!r}") from None


def _result_from_text(text: str) -> ParsedResult:
    lines = _content_lines(text)
    k = 0
    ring = None
    rank = None
    mats: dict[str, OreMatrix] = {}
    basis: list[tuple[OrePoly, ...]] = []
    while k < len(lines):
        ln, line = lines[k]
        stripped = line.strip()
        if stripped.startswith("ring"):
            ln, block, k = _take_ring_block(lines, k)
            ring = parse_ring(block, ln)
        elif stripped.startswith("rank"):
            rank = int(stripped.split()[1])
            k += 1
        elif stripped.startswith("matrix"):
            if ring is None:
                raise ParseError("ring must precede matrices", ln, 1)
            name, M, k = _parse_matrix_lines(lines, k, ring, None)
            mats[name or f"M{len(mats)}"] = M
        elif stripped.startswith("basis"):
            count = int(stripped.split()[1])
            for j in range(count):
                bl, text_row = lines[k + 1 + j]
                basis.append(tuple(parse_poly(e, ring, None, bl) for e in text_row.split(";")))
            k += 1 + count
        elif stripped.startswith("trace"):
            break
        else:
            raise ParseError(f"unexpected line {stripped!r}", ln, 1)
    missing = [n for n in ("U", "Uinv", "D") if n not in mats]
    if ring is None or rank is None or missing:
        raise ParseError("result text needs ring, rank, U, Uinv and D")
    return ParsedResult(ring, rank, mats["U"], mats["Uinv"], mats["D"], basis)


def parse_result(text: str) -> ParsedResult:
    """Parse a result written by :func:`print_result` or :func:`result_to_json`."""
    if text.lstrip().startswith("{"):
        return _result_from_json(json.loads(text))
    return _result_from_text(text)
