"""SMT-LIB2 s-expressions: tokenizer, parser with source spans, printer."""

from __future__ import annotations

from dataclasses import dataclass, field


class SExprError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    end_line: int
    end_column: int


@dataclass(eq=False)
class SExpr:
    """An atom (``atom`` is a str) or a list (``children``)."""

    atom: str | None = None
    children: list["SExpr"] | None = None
    span: Span | None = field(default=None, repr=False)

    @property
    def is_atom(self) -> bool:
        return self.atom is not None

    @property
    def head(self) -> str | None:
        if self.children and self.children[0].is_atom:
            return self.children[0].atom
        return None

    def __eq__(self, other):
        # structural equality, spans excluded
        if not isinstance(other, SExpr):
            return NotImplemented
        return self.atom == other.atom and self.children == other.children

    def __hash__(self):
        return hash(to_text(self))

    def __len__(self):
        return len(self.children or ())

    def __getitem__(self, i):
        return self.children[i]

    def __str__(self):
        return to_text(self)


def atom(s: str) -> SExpr:
    return SExpr(atom=s)


def lst(*items) -> SExpr:
    return SExpr(children=[x if isinstance(x, SExpr) else atom(str(x)) for x in items])


def _tokens(text: str):
    """Yields (kind, value, line, col, end_line, end_col); kind in ( ) atom."""
    i, n = 0, len(text)
    line, col = 1, 1

    def advance(upto):
        nonlocal i, line, col
        while i < upto:
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            advance(i + 1)
        elif c == ";":
            j = text.find("\n", i)
            advance(n if j < 0 else j)
        elif c in "()":
            yield c, c, line, col, line, col
            advance(i + 1)
        elif c == '"':
            sl, sc, j = line, col, i + 1
            while True:
                j = text.find('"', j)
                if j < 0:
                    raise SExprError("unterminated string literal", sl, sc)
                if j + 1 < n and text[j + 1] == '"':  # "" escapes a quote
                    j += 2
                    continue
                break
            value = text[i:j + 1]
            advance(j + 1)
            yield "atom", value, sl, sc, line, col - 1
        elif c == "|":
            sl, sc = line, col
            j = text.find("|", i + 1)
            if j < 0:
                raise SExprError("unterminated quoted symbol", sl, sc)
            value = text[i:j + 1]
            advance(j + 1)
            yield "atom", value, sl, sc, line, col - 1
        else:
            sl, sc = line, col
            j = i
            while j < n and text[j] not in ' \t\r\n();"|':
                j += 1
            value = text[i:j]
            advance(j)
            yield "atom", value, sl, sc, line, col - 1


def parse_all(text: str) -> list[SExpr]:
    """Parse every top-level s-expression in `text`.

    Raises SExprError located at the unmatched opening paren, or at a
    stray closing paren.
    """
    stack: list[tuple[list[SExpr], int, int]] = []
    top: list[SExpr] = []
    for kind, value, l, c, el, ec in _tokens(text):
        if kind == "(":
            stack.append(([], l, c))
        elif kind == ")":
            if not stack:
                raise SExprError("unbalanced ')' with no matching '('", l, c)
            children, sl, sc = stack.pop()
            node = SExpr(children=children, span=Span(sl, sc, el, ec))
            (stack[-1][0] if stack else top).append(node)
        else:
            node = SExpr(atom=value, span=Span(l, c, el, ec))
            (stack[-1][0] if stack else top).append(node)
    if stack:
        _, sl, sc = stack[0]
        raise SExprError("unbalanced '(' is never closed", sl, sc)
    return top


def to_text(e: SExpr) -> str:
    if e.is_atom:
        return e.atom
    return "(" + " ".join(to_text(c) for c in e.children) + ")"


def is_symbol(tok: str) -> bool:
    if not tok or tok[0] in '"#:' or tok[0].isdigit():
        return False
    if tok[0] == "-" and len(tok) > 1 and tok[1].isdigit():
        return False
    return True


def symbol_name(tok: str) -> str:
    """|x| and x denote the same symbol."""
    if len(tok) >= 2 and tok[0] == tok[-1] == "|":
        return tok[1:-1]
    return tok
