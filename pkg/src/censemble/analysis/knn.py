"""Cosine nearest neighbours and element-wise vector arithmetic."""

import re

import numpy as np

from ..errors import SchemaMismatch, ZeroVector
from ..store import CorpusMatrix
from ._common import ids_of, rank_keys, row_normalize, top_k, values_of


def _query_vector(m, query):
    x = values_of(m)
    if isinstance(query, str):
        if not isinstance(m, CorpusMatrix):
            raise SchemaMismatch("row ids need a CorpusMatrix")
        try:
            return x[m.row_index(query)]
        except KeyError:
            raise SchemaMismatch(f"unknown row id {query!r}") from None
    q = np.asarray(query, dtype=np.float64).ravel()
    if q.shape[0] != x.shape[1]:
        raise SchemaMismatch(f"query has {q.shape[0]} values, matrix has {x.shape[1]} features")
    return q


def cosine_similarities(m, query):
    """Cosine similarity of every row to ``query`` (all-zero rows score 0)."""
    q = _query_vector(m, query)
    qn = float(np.sqrt(q @ q))
    if qn == 0 or not np.isfinite(qn):
        raise ZeroVector("query vector has zero length")
    unit, _ = row_normalize(values_of(m))
    return unit @ (q / qn)


def cosine_knn(m, query, k=10, exclude=None):
    """The ``k`` rows most cosine-similar to ``query``.

    ``query`` is a vector or a row id. ``exclude`` is an optional predicate
    on a row's metadata dict; matching rows are removed before ranking. Ties
    are broken by row id. Returns a list of ``(id, similarity)``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    sims = cosine_similarities(m, query)
    ids = ids_of(m)
    allowed = None
    if exclude is not None:
        meta = m.meta if isinstance(m, CorpusMatrix) else [{"id": i} for i in ids]
        allowed = np.array([not exclude(r) for r in meta], dtype=bool)
    picked = top_k(sims, k, rank_keys(ids), allowed)
    return [(ids[i], float(sims[i])) for i in picked]


def same_artist_as(m, row_id, key="artist"):
    """Predicate excluding rows that share ``row_id``'s artist (and the row itself)."""
    ref = m.meta[m.row_index(row_id)]
    artist = ref.get(key)

    def pred(meta):
        if str(meta.get("id")) == str(row_id):
            return True
        return artist not in (None, "") and meta.get(key) == artist
    return pred


_TOKEN = re.compile(r"""
    \s*(?:
      (?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)
    | (?P<str>"[^"]*"|'[^']*')
    | (?P<name>[A-Za-z_][\w.\-]*)
    | (?P<op>[-+*/(),=])
    )""", re.VERBOSE)


def _tokenize(text):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise ValueError(f"cannot parse expression near {text[pos:]!r}")
        kind = mt.lastgroup
        val = mt.group(kind)
        if kind == "str":
            kind, val = "name", val[1:-1]
        out.append((kind, val))
        pos = mt.end()
    return out


class _Parser:
    """expr := term (('+'|'-') term)*; term := unary (('*'|'/') unary)*;
    unary := '-' unary | atom; atom := number | id | row(id) |
    mean([key=value]) | '(' expr ')'."""

    def __init__(self, m, tokens, env):
        self.m, self.toks, self.env, self.i = m, tokens, env or {}, 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, val=None):
        tok = self.peek()
        if tok[0] is None or (val is not None and tok[1] != val):
            raise ValueError(f"expected {val or 'a value'} in expression")
        self.i += 1
        return tok

    def expr(self):
        v = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            r = self.term()
            v = v + r if op == "+" else v - r
        return v

    def term(self):
        v = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            r = self.unary()
            v = v * r if op == "*" else v / r
        return v

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        return self.atom()

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return float(val)
        if val == "(":
            v = self.expr()
            self.take(")")
            return v
        if kind != "name":
            raise ValueError(f"unexpected {val!r} in expression")
        if val in ("row", "mean") and self.peek()[1] == "(":
            self.take("(")
            if val == "row":
                rid = self.take()[1]
                self.take(")")
                return self.row(rid)
            if self.peek()[1] == ")":
                self.take(")")
                return values_of(self.m).mean(axis=0)
            key = self.take()[1]
            self.take("=")
            want = self.take()[1]
            self.take(")")
            return self.mean(key, want)
        if val in self.env:
            v = np.asarray(self.env[val], dtype=np.float64)
            if v.shape != (values_of(self.m).shape[1],):
                raise SchemaMismatch(f"operand {val!r} has shape {v.shape}")
            return v
        return self.row(val)

    def row(self, rid):
        try:
            return values_of(self.m)[self.m.row_index(rid)].copy()
        except (KeyError, AttributeError):
            raise SchemaMismatch(f"unknown row id {rid!r}") from None

    def mean(self, key, want):
        rows = [i for i, r in enumerate(self.m.meta) if str(r.get(key)) == want]
        if not rows:
            raise SchemaMismatch(f"no rows with {key}={want!r}")
        return values_of(self.m)[rows].mean(axis=0)


def vector_arith(m, expr, env=None):
    """Evaluate an element-wise expression over rows of ``m``.

    Operands are row ids (bare or quoted), ``row(id)``, ``mean(key=value)``
    (the average of matching rows), ``mean()`` and numbers; operators are
    ``+ - * /`` with the usual precedence. ``env`` maps extra names to
    vectors.
    """
    p = _Parser(m, _tokenize(expr), env)
    out = p.expr()
    if p.peek()[0] is not None:
        raise ValueError(f"trailing input in expression: {p.peek()[1]!r}")
    d = values_of(m).shape[1]
    return np.broadcast_to(np.asarray(out, dtype=np.float64), (d,)).copy()
