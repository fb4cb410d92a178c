"""Recursive-descent parser for path algebra expressions.

Grammar:
    expr   := term (('+' | '-') term)*
    term   := coef? factor+
    factor := 'v(' id ')' | 's(' id ')' | 't(' id ')'
    coef   := int | int '/' int

Juxtaposition of factors multiplies; t(e) is the ghost edge e*.  A leading
sign on the first term is accepted so that printed elements re-parse.
"""

from .lpa import LpaElement, edge_element, ghost_element, multiply, normalize, \
    vertex_element


class LpaParseError(ValueError):
    def __init__(self, message, line, col):
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.col = col


class UnknownIdError(ValueError):
    def __init__(self, kind, name, line, col):
        super().__init__(f"unknown {kind} id {name!r} at line {line}, column {col}")
        self.line = line
        self.col = col


class _Scanner:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def location(self, pos=None):
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message, pos=None):
        line, col = self.location(pos)
        raise LpaParseError(message, line, col)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, char):
        if self.peek() == char:
            self.pos += 1
            return True
        return False

    def expect(self, char):
        if not self.take(char):
            self.error(f"expected {char!r}")

    def integer(self):
        self.skip_ws()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] in "+-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            self.error("expected an integer")
        return self.text[start:self.pos]


def parse_lpa(text, graph, ring):
    """Evaluate an expression over the graph's path algebra."""
    sc = _Scanner(text)
    result = _expr(sc, graph, ring)
    sc.skip_ws()
    if sc.pos != len(sc.text):
        sc.error(f"unexpected {sc.text[sc.pos]!r}")
    return result


def _expr(sc, graph, ring):
    negate = False
    if sc.peek() == "-":
        sc.take("-")
        negate = True
    elif sc.peek() == "+":
        sc.take("+")
    total = _term(sc, graph, ring)
    if negate:
        total = -total
    while True:
        if sc.take("+"):
            total = total + _term(sc, graph, ring)
        elif sc.take("-"):
            total = total - _term(sc, graph, ring)
        else:
            return normalize(total)


def _term(sc, graph, ring):
    coef = ring.one
    ch = sc.peek()
    if ch.isdigit() or ch in "+-":
        num = sc.integer()
        if sc.take("/"):
            den = sc.integer()
            coef = ring.parse(f"{num}/{den}") if ring.tag == "q" else _ratio(sc, ring, num, den)
        else:
            coef = ring.parse(num)
    factors = [_factor(sc, graph, ring)]
    while sc.peek() in ("v", "s", "t"):
        factors.append(_factor(sc, graph, ring))
    total = factors[0].scale(coef)
    for f in factors[1:]:
        total = multiply(total, f)
    return total


def _ratio(sc, ring, num, den):
    d = ring.parse(den)
    if not ring.is_unit(d):
        sc.error(f"denominator {den} is not invertible in {ring.tag}")
    return ring.mul(ring.parse(num), ring.unit_inverse(d))


def _factor(sc, graph, ring):
    sc.skip_ws()
    start = sc.pos
    kind = sc.peek()
    if kind not in ("v", "s", "t"):
        sc.error("expected a factor v(...), s(...) or t(...)")
    sc.pos += 1
    sc.expect("(")
    close = sc.text.find(")", sc.pos)
    if close < 0:
        sc.error("expected ')'", len(sc.text))
    name = sc.text[sc.pos:close].strip()
    if not name:
        sc.error("empty id")
    sc.pos = close + 1
    line, col = sc.location(start)
    if kind == "v":
        if name not in graph.out:
            raise UnknownIdError("vertex", name, line, col)
        return vertex_element(graph, ring, name)
    if name not in graph.edge_map:
        raise UnknownIdError("edge", name, line, col)
    if kind == "s":
        return edge_element(graph, ring, name)
    return ghost_element(graph, ring, name)


def lpa_to_expr(elem):
    """Grammar-form rendering, so that parse_lpa is a left inverse."""
    elem = normalize(elem)
    if elem.is_zero:
        return "0 " + next(f"v({v})" for v in elem.graph.vertices) \
            if elem.graph.vertices else "0"
    from .lpa import _mono_key
    parts = []
    for mono in sorted(elem.coeffs, key=_mono_key):
        mu, nu = mono
        factors = [f"s({e})" for e in mu.edges]
        factors.extend(f"t({e})" for e in reversed(nu.edges))
        if not factors:
            factors = [f"v({mu.src})"]
        coef = elem.coeffs[mono]
        text = " ".join(factors)
        parts.append((coef, text))
    ring = elem.ring
    out = []
    for i, (coef, text) in enumerate(parts):
        rendered = ring.format(coef)
        if rendered.startswith("-"):
            sep = "- " if out else "-"
            rendered = rendered[1:]
        else:
            sep = "+ " if out else ""
        coef_txt = "" if rendered == "1" else rendered + " "
        out.append(f"{sep}{coef_txt}{text}")
    return " ".join(out)
