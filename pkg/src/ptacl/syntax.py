"""Concrete textual syntax: lexer, parsers and canonical printers.

Grammar (targets, policies, requests):

    target  := or_t
    or_t    := and_t { "or" and_t }
    and_t   := unary_t { "and" unary_t }
    unary_t := "opt" unary_t | "not" unary_t | atom_t
    atom_t  := "null" | IDENT | "(" IDENT "=" VALUE ")" | "(" target ")"
             | "sand" "(" target "," target ")"     strong conjunction
             | "wor"  "(" target "," target ")"     weak disjunction
             | "sup"  "(" target "," target ")"     most-conclusive-wins

    policy  := bin_p
    bin_p   := unary_p { BINOP unary_p }
    unary_p := "not" unary_p | "dbd" unary_p | "abd" unary_p | atom_p
    atom_p  := "allow" | "deny" | "(" policy ")"
             | "{" target "?" policy "}"
             | "{" target "?" BINOP "[" policy { "," policy } "]" "}"

    BINOP   := "and" | "and_cup" | "or_cup" | "and_cap" | "or_cap" | "fa" | "la"

Binary policy operators share one precedence level: chains of the *same*
operator associate left, mixing distinct operators without parentheses is a
parse error.  ``opt``/``not`` bind tighter than ``and``, which binds tighter
than ``or``.  IDENT and VALUE are bare words or double-quoted strings with
backslash escapes; ``#`` starts a comment running to end of line.  Only the
``=`` predicate exists; comparison operators in the atom slot are reserved
and rejected.  ``abd p`` is sugar and parses to ``not dbd not p``.

Requests are one ``name = value`` pair per line; duplicate names with
distinct values are allowed and identical duplicate pairs collapse.

Printers emit a canonical spelling with minimal parentheses;
``parse(print(x))`` returns a structurally identical AST.  The evaluation
mode of a combined policy is not part of the syntax: parsing assigns each
operator's default mode.

Conventional file extensions: ``.ptt`` targets, ``.ptp`` policies, ``.ptq``
requests, all UTF-8.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import policies as pl
from . import targets as tg
from .errors import ParseError, SourceSpan

KEYWORDS = frozenset({
    "null", "opt", "not", "and", "or", "sand", "wor", "sup",
    "allow", "deny", "dbd", "abd",
    "and_cup", "or_cup", "and_cap", "or_cap", "fa", "la",
})

POLICY_BINOPS = {op.value: op for op in pl.DecisionOp}

_BARE_RE = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.\-]*")
_QUOTED_RE = re.compile(r'"(?:[^"\\\n]|\\.)*"')
_PUNCT = ("<=", ">=", "!=", "(", ")", "{", "}", "[", "]", ",", "?", "=", "<", ">")
_WS_RE = re.compile(r"[ \t\r\n]+")
_COMMENT_RE = re.compile(r"#[^\n]*")

_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}


@dataclass(frozen=True)
class Token:
    kind: str  # "word", "punct", "eof"
    text: str
    value: str
    span: SourceSpan
    quoted: bool = False


def _unescape(raw: str, offset: int) -> str:
    body = raw[1:-1]
    out: list[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            i += 1
            if i >= len(body):
                raise ParseError("dangling escape in string", SourceSpan(offset, offset + len(raw)))
            esc = body[i]
            if esc not in _ESCAPES:
                raise ParseError(
                    f"unknown escape \\{esc}",
                    SourceSpan(offset, offset + len(raw)),
                )
            out.append(_ESCAPES[esc])
        else:
            out.append(ch)
        i += 1
    return "".join(out)


def tokenize(text: str, base_offset: int = 0) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        ws = _WS_RE.match(text, pos)
        if ws:
            pos = ws.end()
            continue
        cm = _COMMENT_RE.match(text, pos)
        if cm:
            pos = cm.end()
            continue
        qm = _QUOTED_RE.match(text, pos)
        if qm:
            raw = qm.group(0)
            span = SourceSpan(base_offset + pos, base_offset + qm.end())
            tokens.append(Token("word", raw, _unescape(raw, base_offset + pos), span, quoted=True))
            pos = qm.end()
            continue
        for punct in _PUNCT:
            if text.startswith(punct, pos):
                span = SourceSpan(base_offset + pos, base_offset + pos + len(punct))
                tokens.append(Token("punct", punct, punct, span))
                pos += len(punct)
                break
        else:
            bm = _BARE_RE.match(text, pos)
            if bm:
                raw = bm.group(0)
                span = SourceSpan(base_offset + pos, base_offset + bm.end())
                tokens.append(Token("word", raw, raw, span))
                pos = bm.end()
                continue
            raise ParseError(
                f"unexpected character {text[pos]!r}",
                SourceSpan(base_offset + pos, base_offset + pos + 1),
            )
    tokens.append(Token("eof", "", "", SourceSpan(base_offset + n, base_offset + n)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.index + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.index]
        if tok.kind != "eof":
            self.index += 1
        return tok

    def at_keyword(self, *names: str) -> bool:
        tok = self.peek()
        return tok.kind == "word" and not tok.quoted and tok.value in names

    def at_punct(self, *texts: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text in texts

    def expect_punct(self, text: str) -> Token:
        if not self.at_punct(text):
            self.fail(f"expected {text!r}", expected=(text,))
        return self.advance()

    def expect_word(self, what: str) -> Token:
        tok = self.peek()
        if tok.kind != "word":
            self.fail(f"expected {what}", expected=(what,))
        if not tok.quoted and tok.value in KEYWORDS:
            self.fail(
                f"keyword {tok.value!r} cannot be used as {what}; quote it",
                expected=(what,),
            )
        return self.advance()

    def expect_eof(self) -> None:
        tok = self.peek()
        if tok.kind != "eof":
            self.fail(f"unexpected trailing input {tok.text!r}", expected=("end of input",))

    def fail(self, message: str, expected: tuple[str, ...] = ()) -> None:
        raise ParseError(message, self.peek().span, expected)

    def span_from(self, start: SourceSpan) -> SourceSpan:
        end = self.tokens[self.index - 1].span.end if self.index else start.end
        return SourceSpan(start.start, max(start.end, end))

    # -- targets -----------------------------------------------------------

    def target(self) -> tg.Target:
        start = self.peek().span
        node = self.and_target()
        while self.at_keyword("or"):
            self.advance()
            rhs = self.and_target()
            node = tg.Or(node, rhs, span=self.span_from(start))
        return node

    def and_target(self) -> tg.Target:
        start = self.peek().span
        node = self.unary_target()
        while self.at_keyword("and"):
            self.advance()
            rhs = self.unary_target()
            node = tg.And(node, rhs, span=self.span_from(start))
        return node

    def unary_target(self) -> tg.Target:
        start = self.peek().span
        if self.at_keyword("opt"):
            self.advance()
            return tg.Opt(self.unary_target(), span=self.span_from(start))
        if self.at_keyword("not"):
            self.advance()
            return tg.Not(self.unary_target(), span=self.span_from(start))
        return self.atom_target()

    _EXTENDED_TARGETS = {"sand": tg.StrongAnd, "wor": tg.WeakOr, "sup": tg.Sup}

    def atom_target(self) -> tg.Target:
        start = self.peek().span
        if self.at_keyword("null"):
            self.advance()
            return tg.Null(span=start)
        for kw, node_type in self._EXTENDED_TARGETS.items():
            if self.at_keyword(kw):
                self.advance()
                self.expect_punct("(")
                left = self.target()
                self.expect_punct(",")
                right = self.target()
                self.expect_punct(")")
                return node_type(left, right, span=self.span_from(start))
        if self.at_punct("("):
            self.advance()
            inner = self._paren_target(start)
            return inner
        tok = self.peek()
        if tok.kind == "word" and (tok.quoted or tok.value not in KEYWORDS):
            self.advance()
            return tg.Name(tok.value, span=tok.span)
        self.fail(
            "expected a target",
            expected=("null", "attribute name", "(", "opt", "not", "sand", "wor", "sup"),
        )
        raise AssertionError("unreachable")

    def _paren_target(self, start: SourceSpan) -> tg.Target:
        nxt = self.peek()
        following = self.peek(1)
        if nxt.kind == "word" and following.kind == "punct":
            if following.text == "=":
                name_tok = self.expect_word("attribute name")
                self.expect_punct("=")
                value_tok = self.expect_word("attribute value")
                self.expect_punct(")")
                return tg.Match(name_tok.value, value_tok.value, span=self.span_from(start))
            if following.text in ("<=", ">=", "<", ">", "!="):
                raise ParseError(
                    f"unsupported predicate {following.text!r}; only '=' is available",
                    following.span,
                    expected=("=",),
                )
        inner = self.target()
        self.expect_punct(")")
        return inner

    # -- policies ----------------------------------------------------------

    def policy(self) -> pl.Policy:
        start = self.peek().span
        first = self.unary_policy()
        if not self._at_binop():
            return first
        op_kw = self.peek().value
        operands = [first]
        while self.at_keyword(op_kw):
            self.advance()
            operands.append(self.unary_policy())
        if self._at_binop():
            self.fail(
                f"mixing {op_kw!r} with {self.peek().value!r} requires parentheses",
                expected=(op_kw, "end of operand"),
            )
        return self._chain(op_kw, operands, self.span_from(start))

    def _at_binop(self) -> bool:
        tok = self.peek()
        return tok.kind == "word" and not tok.quoted and tok.value in POLICY_BINOPS

    def _chain(self, op_kw: str, operands: list[pl.Policy], span: SourceSpan) -> pl.Policy:
        if op_kw == "and":
            node = operands[0]
            for rhs in operands[1:]:
                node = pl.And(node, rhs, span=span)
            return node
        op = POLICY_BINOPS[op_kw]
        node = operands[0]
        for rhs in operands[1:]:
            node = pl.Combined(tg.Null(), op, (node, rhs), span=span)
        return node

    def unary_policy(self) -> pl.Policy:
        start = self.peek().span
        if self.at_keyword("not"):
            self.advance()
            return pl.Not(self.unary_policy(), span=self.span_from(start))
        if self.at_keyword("dbd"):
            self.advance()
            return pl.Dbd(self.unary_policy(), span=self.span_from(start))
        if self.at_keyword("abd"):
            self.advance()
            child = self.unary_policy()
            span = self.span_from(start)
            return pl.Not(pl.Dbd(pl.Not(child, span=span), span=span), span=span)
        return self.atom_policy()

    def atom_policy(self) -> pl.Policy:
        start = self.peek().span
        if self.at_keyword("allow"):
            self.advance()
            return pl.Allow(span=start)
        if self.at_keyword("deny"):
            self.advance()
            return pl.Deny(span=start)
        if self.at_punct("("):
            self.advance()
            inner = self.policy()
            self.expect_punct(")")
            return inner
        if self.at_punct("{"):
            self.advance()
            target = self.target()
            self.expect_punct("?")
            if self._at_binop() and self.peek(1).kind == "punct" and self.peek(1).text == "[":
                op = POLICY_BINOPS[self.advance().value]
                self.expect_punct("[")
                children = [self.policy()]
                while self.at_punct(","):
                    self.advance()
                    children.append(self.policy())
                self.expect_punct("]")
                self.expect_punct("}")
                if len(children) < 2:
                    raise ParseError(
                        "combined policy needs at least two sub-policies",
                        self.span_from(start),
                    )
                return pl.Combined(target, op, tuple(children), span=self.span_from(start))
            child = self.policy()
            self.expect_punct("}")
            return pl.Targeted(target, child, span=self.span_from(start))
        self.fail(
            "expected a policy",
            expected=("allow", "deny", "not", "dbd", "abd", "(", "{"),
        )
        raise AssertionError("unreachable")

    # -- requests ----------------------------------------------------------


def parse_target(text: str) -> tg.Target:
    parser = _Parser(text)
    node = parser.target()
    parser.expect_eof()
    return node


def parse_policy(text: str) -> pl.Policy:
    parser = _Parser(text)
    node = parser.policy()
    parser.expect_eof()
    return node


def parse_request(text: str) -> tg.Request:
    """Parse the line-based request format (one pair per line, # comments)."""
    pairs: set[tuple[str, str]] = set()
    offset = 0
    for line in text.split("\n"):
        tokens = tokenize(line, base_offset=offset)
        offset += len(line) + 1
        if tokens[0].kind == "eof":
            continue
        if len(tokens) != 4 or tokens[0].kind != "word" or tokens[1].text != "=" or tokens[2].kind != "word":
            bad = next((t for t in tokens if t.kind != "eof"), tokens[0])
            raise ParseError(
                "expected one 'name = value' pair on the line",
                SourceSpan(tokens[0].span.start, bad.span.end),
                expected=("name = value",),
            )
        name_tok, _, value_tok, _ = tokens
        if not name_tok.quoted and name_tok.value in KEYWORDS:
            raise ParseError(
                f"keyword {name_tok.value!r} must be quoted to act as an attribute name",
                name_tok.span,
            )
        pairs.add((name_tok.value, value_tok.value))
    return tg.Request(frozenset(pairs))


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def _word(s: str) -> str:
    if _BARE_RE.fullmatch(s) and s not in KEYWORDS:
        return s
    escaped = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


_T_OR, _T_AND, _T_UNARY, _T_ATOM = 1, 2, 3, 4


def _render_target(t: tg.Target) -> tuple[str, int]:
    match t:
        case tg.Null():
            return "null", _T_ATOM
        case tg.Name(name=n):
            return _word(n), _T_ATOM
        case tg.Match(name=n, value=v):
            return f"({_word(n)} = {_word(v)})", _T_ATOM
        case tg.Opt(child=c):
            return f"opt {_target_at(c, _T_UNARY)}", _T_UNARY
        case tg.Not(child=c):
            return f"not {_target_at(c, _T_UNARY)}", _T_UNARY
        case tg.And(left=l, right=r):
            return f"{_target_at(l, _T_AND)} and {_target_at(r, _T_UNARY)}", _T_AND
        case tg.Or(left=l, right=r):
            return f"{_target_at(l, _T_OR)} or {_target_at(r, _T_AND)}", _T_OR
        case tg.StrongAnd(left=l, right=r):
            return f"sand({print_target(l)}, {print_target(r)})", _T_ATOM
        case tg.WeakOr(left=l, right=r):
            return f"wor({print_target(l)}, {print_target(r)})", _T_ATOM
        case tg.Sup(left=l, right=r):
            return f"sup({print_target(l)}, {print_target(r)})", _T_ATOM
    raise TypeError(f"not a target node: {t!r}")


def _target_at(t: tg.Target, min_level: int) -> str:
    text, level = _render_target(t)
    return f"({text})" if level < min_level else text


def print_target(t: tg.Target) -> str:
    """Canonical text with minimal parentheses; parse(print(t)) == t."""
    return _render_target(t)[0]


_P_BIN, _P_UNARY, _P_ATOM = 1, 2, 3


def _render_policy(p: pl.Policy) -> tuple[str, int, str | None]:
    match p:
        case pl.Allow():
            return "allow", _P_ATOM, None
        case pl.Deny():
            return "deny", _P_ATOM, None
        case pl.Not(child=c):
            return f"not {_policy_operand(c)}", _P_UNARY, None
        case pl.Dbd(child=c):
            return f"dbd {_policy_operand(c)}", _P_UNARY, None
        case pl.And(left=l, right=r):
            return f"{_policy_left(l, 'and')} and {_policy_operand(r)}", _P_BIN, "and"
        case pl.Combined(target=t, op=op, children=children):
            if isinstance(t, tg.Null) and op is not pl.DecisionOp.AND_P and len(children) == 2:
                left, right = children
                kw = op.value
                return f"{_policy_left(left, kw)} {kw} {_policy_operand(right)}", _P_BIN, kw
            body = ", ".join(print_policy(c) for c in children)
            return f"{{ {print_target(t)} ? {op.value} [{body}] }}", _P_ATOM, None
        case pl.Targeted(target=t, child=c):
            return f"{{ {print_target(t)} ? {print_policy(c)} }}", _P_ATOM, None
    raise TypeError(f"not a policy node: {p!r}")


def _policy_left(p: pl.Policy, op_kw: str) -> str:
    text, level, tag = _render_policy(p)
    if level == _P_BIN and tag != op_kw:
        return f"({text})"
    return text


def _policy_operand(p: pl.Policy) -> str:
    text, level, _ = _render_policy(p)
    return f"({text})" if level == _P_BIN else text


def print_policy(p: pl.Policy) -> str:
    """Canonical text with minimal parentheses; parse(print(p)) == p.

    The binary spelling is used for two-child combined nodes over the null
    target (except the core conjunction operator, whose binary spelling is
    the plain ``and`` node); everything else prints in the brace form.
    """
    return _render_policy(p)[0]


def print_request(q: tg.Request) -> str:
    """One pair per line, sorted by name then value; empty request prints empty."""
    lines = [f"{_word(n)} = {_word(v)}" for n, v in q.sorted_pairs()]
    return "\n".join(lines) + ("\n" if lines else "")
