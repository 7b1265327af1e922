"""Collineations of the coordinatised hexagon, realised from generator words.

A point with coordinates is the coset u w P1 where u is the product of root
elements read off the coordinates (e.g. (t,a,t') = x6(t)x5(a)x4(t') s6s1s6 P1)
and w is the Weyl word of its cell; lines likewise with P6.  Left
multiplication by a letter is computed as follows:

* x_j(c), 1 <= j <= 6: prepend to u and collect with the commutator relations
  into the cell's root order; root elements outside the cell's prefix sit at
  the right and are absorbed by the parabolic.
* s1, s6: on cells whose prefix avoids x1 (resp. x6) every letter of u is
  conjugated by the sign table s_i x_j(c) s_i^-1 = x_{2i+6-j}(eps_ij c); the
  resulting positive word is collected into the cell of s_i w.  Torus parts of
  the Weyl lifts are absorbed by the parabolic.  The remaining cells follow
  from incidence: an unknown line is the join of two known points, an unknown
  point the meet of two known lines.  The result is then checked to be a
  bijection preserving every incidence.
* x7(c) = s1 x1(c) s1^-1 and x12(u) = s6 x6(u) s6^-1.
* h: applies the system automorphism to every J-coordinate.

Words act by left multiplication: the word l1;l2;...;lm is the product
l1 l2 ... lm, so lm acts first.  Permutations compose as ``(g h)[i] = g[h[i]]``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .exactfield import FieldError, parse_literal
from .geometry import LINE, POINT, Hexagon
from .hexsystem import ClauseResult


class WordError(ValueError):
    pass


class WordSyntaxError(WordError):
    def __init__(self, msg: str, position: int):
        super().__init__(f"{msg} at position {position}")
        self.position = position


class IndexOutOfRange(WordError):
    pass


class CoefficientDomainMismatch(WordError):
    pass


class NormalizationFailure(RuntimeError):
    pass


class CapExceeded(RuntimeError):
    pass


class Letter(NamedTuple):
    kind: str       # "x", "s1", "s6", "h"
    index: int = 0  # root index for "x"
    coef: int = 0   # field code (J for odd index, F for even)
    aut: str = ""   # automorphism name for "h"

    def format(self, system) -> str:
        if self.kind == "x":
            fld = system.J if self.index % 2 else system.F
            return f"x{self.index}({fld.format(self.coef)})"
        if self.kind == "h":
            return f"h:{self.aut}"
        return self.kind


ROOT_INDICES = (1, 2, 3, 4, 5, 6, 7, 12)
_LETTER_RE = re.compile(r"\s*(?:x(\d+)\(([^()]*)\)|(s1|s6)|h:(\w+))\s*")


def parse_word(text: str, system) -> list[Letter]:
    """Parse ``letter (';' letter)*``; the empty string is the identity word."""
    letters: list[Letter] = []
    if not text.strip():
        return letters
    pos = 0
    for chunk in text.split(";"):
        m = _LETTER_RE.fullmatch(chunk)
        if not m:
            raise WordSyntaxError(f"cannot parse letter {chunk.strip()!r}; grammar: x<i>(lit) | s1 | s6 | h:id|sigma|sigma2", pos)
        idx, lit, s, aut = m.groups()
        if idx is not None:
            i = int(idx)
            if i not in ROOT_INDICES:
                raise IndexOutOfRange(f"root index {i} at position {pos}; allowed: {ROOT_INDICES}")
            fld = system.J if i % 2 else system.F
            try:
                c = parse_literal(fld, lit).value
            except FieldError as exc:
                raise CoefficientDomainMismatch(
                    f"x{i} takes a coefficient in {fld!r}: {exc} (position {pos})") from None
            letters.append(Letter("x", i, c))
        elif s is not None:
            letters.append(Letter(s))
        else:
            autos = system.automorphisms()
            if aut not in autos:
                raise CoefficientDomainMismatch(f"automorphism {aut!r} not available; have {sorted(autos)}")
            letters.append(Letter("h", aut=aut))
        pos += len(chunk) + 1
    return letters


def format_word(letters: Sequence[Letter], system) -> str:
    return ";".join(l.format(system) for l in letters)


# -- root data ----------------------------------------------------------------

def _refl(c: int):
    return lambda r: (c - r - 1) % 12 + 1


S1_ROOT = _refl(8)    # j -> 8 - j
S6_ROOT = _refl(18)   # j -> 18 - j
EPS = {1: {1: 1, 2: 1, 3: 1, 4: 1, 5: -1, 6: -1}, 6: {1: 1, 2: -1, 3: 1, 4: 1, 5: -1, 6: 1}}


def _weyl_word(sort: str, cell: int) -> list[str]:
    # rightmost letter is s6 for points, s1 for lines
    last, other = ("s6", "s1") if sort == POINT else ("s1", "s6")
    return [last if (cell - 1 - k) % 2 == 0 else other for k in range(cell)]


def _apply_weyl(word: list[str], r: int) -> int:
    for s in reversed(word):
        r = S1_ROOT(r) if s == "s1" else S6_ROOT(r)
    return r


BASE_ROOT = {POINT: 4, LINE: 3}   # fixed by s1, resp. s6
CELL_ROOT = {srt: [_apply_weyl(_weyl_word(srt, n), BASE_ROOT[srt]) for n in range(6)] for srt in (POINT, LINE)}
ROOT_CELL = {srt: {r: n for n, r in enumerate(CELL_ROOT[srt])} for srt in (POINT, LINE)}

_DEC = {6: 0, 5: 1, 4: 2, 3: 3, 2: 4, 1: 5}
_INC = {1: 0, 2: 1, 3: 2, 4: 3, 5: 4, 6: 5}


def cell_layout(sort: str, cell: int) -> tuple[dict, tuple]:
    """(collection rank, prefix root indices) for a cell."""
    if cell == 0:
        return _INC, ()
    starts_with_6 = (cell % 2 == 1) == (sort == POINT)
    if starts_with_6:
        return _DEC, (6, 5, 4, 3, 2)[:cell]
    return _INC, (1, 2, 3, 4, 5)[:cell]


class Collector:
    """Commutator collection in the positive unipotent group U = U1...U6."""

    def __init__(self, system):
        self.S = system
        F, J = system.F, system.J
        self._add = {0: F.add, 1: J.add}
        self._neg = {0: F.neg, 1: J.neg}

    def comm(self, i: int, p: int, j: int, q: int) -> list[tuple[int, int]]:
        """[x_i(p), x_j(q)] for i < j as a product of letters."""
        S = self.S
        F, J = S.F, S.J
        if (i, j) == (1, 3):
            return [(2, S.tr2(p, q))]
        if (i, j) == (3, 5):
            return [(4, S.tr2(p, q))]
        if (i, j) == (1, 5):
            return [(2, F.neg[S.tr2(S.sharp[p], q)]), (3, S.cross_c(p, q)), (4, S.tr2(p, S.sharp[q]))]
        if (i, j) == (2, 6):
            return [(4, F.mul[p][q])]
        if (i, j) == (1, 6):
            n = S.norm[p]
            return [(2, F.neg[F.mul[q][n]]), (3, S.scal(q, S.sharp[p])),
                    (4, F.mul[F.mul[q][q]][n]), (5, J.neg[S.scal(q, p)])]
        return []

    def commutator(self, i: int, p: int, j: int, q: int) -> list[tuple[int, int]]:
        if i < j:
            return self.comm(i, p, j, q)
        inner = self.comm(j, q, i, p)
        return [(k, self._neg[k & 1][c]) for k, c in reversed(inner)]

    def collect(self, word: list[tuple[int, int]], rank: dict) -> list[tuple[int, int]]:
        w = [x for x in word if x[1] != 0]
        k = 0
        while k < len(w) - 1:
            (a, p), (b, q) = w[k], w[k + 1]
            if a == b:
                c = self._add[a & 1][p][q]
                w[k:k + 2] = [(a, c)] if c else []
                k = max(k - 1, 0)
            elif rank[a] > rank[b]:
                extra = [x for x in self.commutator(a, p, b, q) if x[1] != 0]
                w[k:k + 2] = [(b, q), (a, p)] + extra
                k = max(k - 1, 0)
            else:
                k += 1
        return w


@dataclass(eq=False)
class Collineation:
    point_perm: np.ndarray
    line_perm: np.ndarray
    word: str = ""

    def __post_init__(self):
        self._order = None

    def __mul__(self, other: "Collineation") -> "Collineation":
        word = ";".join(w for w in (self.word, other.word) if w)
        return Collineation(self.point_perm[other.point_perm], self.line_perm[other.line_perm], word)

    def inverse(self) -> "Collineation":
        pi = np.empty_like(self.point_perm)
        pi[self.point_perm] = np.arange(len(pi), dtype=pi.dtype)
        li = np.empty_like(self.line_perm)
        li[self.line_perm] = np.arange(len(li), dtype=li.dtype)
        return Collineation(pi, li, f"({self.word})^-1" if self.word else "")

    def __pow__(self, e: int) -> "Collineation":
        if e < 0:
            return self.inverse() ** (-e)
        out = Collineation(np.arange(len(self.point_perm), dtype=np.int32),
                           np.arange(len(self.line_perm), dtype=np.int32))
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Collineation):
            return NotImplemented
        same = bool(np.array_equal(self.point_perm, other.point_perm))
        if same:
            assert np.array_equal(self.line_perm, other.line_perm), "point action does not determine line action"
        return same

    def __hash__(self):
        return hash(self.point_perm.tobytes())

    @property
    def is_identity(self) -> bool:
        return bool((self.point_perm == np.arange(len(self.point_perm))).all())

    def order(self) -> int:
        if self._order is None:
            self._order = perm_order(self.point_perm)
        return self._order

    def fixed_points(self) -> np.ndarray:
        return np.nonzero(self.point_perm == np.arange(len(self.point_perm)))[0]

    def fixed_lines(self) -> np.ndarray:
        return np.nonzero(self.line_perm == np.arange(len(self.line_perm)))[0]

    def to_dict(self) -> dict:
        return {"word": self.word, "point_perm": self.point_perm.tolist(), "line_perm": self.line_perm.tolist()}


def perm_order(p: np.ndarray) -> int:
    seen = np.zeros(len(p), dtype=bool)
    order = 1
    p = p.tolist()
    for i in range(len(p)):
        if seen[i]:
            continue
        n, j = 0, i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            n += 1
        order = order * n // math.gcd(order, n)
    return order


def order_of(c: Collineation) -> int:
    return c.order()


def commutator(g: Collineation, h: Collineation) -> Collineation:
    """[g, h] = g^-1 h^-1 g h."""
    return g.inverse() * h.inverse() * g * h


class GroupAction:
    """Realises words over a built hexagon; caches the letter permutations."""

    def __init__(self, hexagon: Hexagon):
        self.hexagon = hexagon
        self.S = hexagon.system
        self.collector = Collector(self.S)
        self._cache: dict[Letter, Collineation] = {}
        H = hexagon
        self._lp1 = H.line_points[:, 0].copy()
        self._lp2 = H.line_points[:, 1].copy()

    # -- single elements ----------------------------------------------------
    def _prefix_word(self, sort: str, coords: tuple) -> list[tuple[int, int]]:
        _, prefix = cell_layout(sort, len(coords))
        return list(zip(prefix, coords))

    def _read_cell(self, sort: str, cell: int, word: list[tuple[int, int]]) -> tuple:
        rank, prefix = cell_layout(sort, cell)
        w = self.collector.collect(word, rank)
        vals = dict.fromkeys(prefix, 0)
        seen_outside = False
        for i, c in w:
            if i in vals:
                if seen_outside:
                    raise NormalizationFailure("prefix letter after an absorbed letter")
                vals[i] = c
            else:
                seen_outside = True
        return tuple(vals[i] for i in prefix)

    def _x_on(self, j: int, c: int, sort: str, coords: tuple) -> tuple:
        if not coords:
            return coords
        return self._read_cell(sort, len(coords), [(j, c)] + self._prefix_word(sort, coords))

    def _s_on(self, which: int, sort: str, coords: tuple):
        """Direct image under s1/s6, or None when the prefix contains x1/x6."""
        cell = len(coords)
        word = self._prefix_word(sort, coords)
        if any(i == which for i, _ in word):
            return None
        root_map = S1_ROOT if which == 1 else S6_ROOT
        eps = EPS[which]
        conj = []
        for i, c in word:
            k = root_map(i)
            if not 1 <= k <= 6:
                raise NormalizationFailure("conjugate left the positive root group")
            if eps[i] == -1:
                c = (self.S.J if i % 2 else self.S.F).neg[c]
            conj.append((k, c))
        target = ROOT_CELL[sort][root_map(CELL_ROOT[sort][cell])]
        return self._read_cell(sort, target, conj)

    # -- permutations ---------------------------------------------------------
    def _perm_from_map(self, fn) -> Collineation:
        H = self.hexagon
        pp = np.array([H.point_index[fn(POINT, c)] for c in H.points], dtype=np.int32)
        lp = np.array([H.line_index[fn(LINE, c)] for c in H.lines], dtype=np.int32)
        return Collineation(pp, lp)

    def _weyl_perm(self, which: int) -> Collineation:
        H = self.hexagon
        pimg = np.full(H.n_points, -1, dtype=np.int64)
        limg = np.full(H.n_lines, -1, dtype=np.int64)
        for i, c in enumerate(H.points):
            r = self._s_on(which, POINT, c)
            if r is not None:
                pimg[i] = H.point_index[r]
        for j, c in enumerate(H.lines):
            r = self._s_on(which, LINE, c)
            if r is not None:
                limg[j] = H.line_index[r]
        self._propagate(pimg, limg)
        return self._checked(Collineation(pimg.astype(np.int32), limg.astype(np.int32)))

    def _propagate(self, pimg: np.ndarray, limg: np.ndarray) -> None:
        H = self.hexagon
        meet: dict[tuple[int, int], int] = {}
        for p in range(H.n_points):
            ls = H.point_lines[p].tolist()
            for a in ls:
                for b in ls:
                    if a != b:
                        meet[(a, b)] = p
        while (pimg < 0).any() or (limg < 0).any():
            progress = False
            for L in np.nonzero(limg < 0)[0]:
                known = [int(pimg[p]) for p in H.line_points[L] if pimg[p] >= 0]
                if len(known) >= 2:
                    img = H.line_of[known[0], known[1]]
                    if img < 0:
                        raise NormalizationFailure("images of collinear points are not collinear")
                    limg[L] = img
                    progress = True
            for p in np.nonzero(pimg < 0)[0]:
                known = [int(limg[L]) for L in H.point_lines[p] if limg[L] >= 0]
                if len(known) >= 2:
                    img = meet.get((known[0], known[1]))
                    if img is None:
                        raise NormalizationFailure("images of concurrent lines do not meet")
                    pimg[p] = img
                    progress = True
            if not progress:
                raise NormalizationFailure("incidence propagation stalled")

    def _checked(self, c: Collineation) -> Collineation:
        H = self.hexagon
        pp, lp = c.point_perm, c.line_perm
        if len(np.unique(pp)) != H.n_points or len(np.unique(lp)) != H.n_lines:
            raise NormalizationFailure("realised letter is not a bijection")
        if not self.preserves_incidence(c):
            raise NormalizationFailure("realised letter does not preserve incidence")
        return c

    def preserves_incidence(self, c: Collineation) -> bool:
        H = self.hexagon
        img_p = c.point_perm[H.chamber_points]
        img_l = c.line_perm[H.chamber_lines]
        return bool((H.point_lines[img_p] == img_l[:, None]).any(axis=1).all())

    def letter_perm(self, letter: Letter) -> Collineation:
        hit = self._cache.get(letter)
        if hit is not None:
            return hit
        S = self.S
        if letter.kind == "x" and letter.index <= 6:
            j, c = letter.index, letter.coef
            col = self._checked(self._perm_from_map(lambda srt, crd: self._x_on(j, c, srt, crd)))
        elif letter.kind == "s1":
            col = self._weyl_perm(1)
        elif letter.kind == "s6":
            col = self._weyl_perm(6)
        elif letter.kind == "x":
            base, s = (1, "s1") if letter.index == 7 else (6, "s6")
            sp = self.letter_perm(Letter(s))
            col = sp * self.letter_perm(Letter("x", base, letter.coef)) * sp.inverse()
        elif letter.kind == "h":
            tab = S.automorphisms()[letter.aut]
            from .geometry import coord_pattern

            def fn(srt, crd):
                pat = coord_pattern(srt, len(crd))
                return tuple(tab[x] if k == "J" else x for k, x in zip(pat, crd))
            col = self._checked(self._perm_from_map(fn))
        else:  # pragma: no cover
            raise WordError(f"unknown letter {letter}")
        col.word = letter.format(S)
        self._cache[letter] = col
        return col

    def identity(self) -> Collineation:
        H = self.hexagon
        return Collineation(np.arange(H.n_points, dtype=np.int32), np.arange(H.n_lines, dtype=np.int32), "")

    def realize(self, word) -> Collineation:
        letters = parse_word(word, self.S) if isinstance(word, str) else list(word)
        out = self.identity()
        for l in letters:
            out = out * self.letter_perm(l)
        out.word = format_word(letters, self.S)
        return out

    def x(self, i: int, c: int) -> Collineation:
        return self.letter_perm(Letter("x", i, c))

    def apply_letter(self, letter: Letter, element):
        H = self.hexagon
        c = self.letter_perm(letter)
        v = H.vertex(element)
        if v < H.n_points:
            return H.element(int(c.point_perm[v]))
        return H.element(H.n_points + int(c.line_perm[v - H.n_points]))

    def act(self, word, element):
        H = self.hexagon
        c = self.realize(word)
        v = H.vertex(element)
        if v < H.n_points:
            return H.element(int(c.point_perm[v]))
        return H.element(H.n_points + int(c.line_perm[v - H.n_points]))

    def line_perm_of(self, point_perm: np.ndarray) -> np.ndarray:
        return self.hexagon.line_of[point_perm[self._lp1], point_perm[self._lp2]]

    def from_point_perm(self, pp: np.ndarray, word: str = "") -> Collineation:
        return Collineation(pp, self.line_perm_of(pp), word)

    # -- products of letters given as (index, coef) -----------------------------
    def product(self, letters: Sequence[tuple[int, int]]) -> Collineation:
        out = self.identity()
        for i, c in letters:
            out = out * self.x(i, c)
        return out

    # -- relation validation ------------------------------------------------------
    def validate_relations(self, exhaustive_limit: int = 64, seed: int = 0) -> list[ClauseResult]:
        return validate_relations(self, exhaustive_limit, seed)

    # -- closed form ----------------------------------------------------------------
    def theta_closed_form(self, aut: str, pt: tuple) -> tuple:
        return theta_closed_form(self.S, aut, pt)


def theta_closed_form(S, aut: str, pt: tuple) -> tuple:
    """Image of (t,a,u,b,v) under h x1(1) s1 from the fixed-point analysis of opposite points."""
    t, a, u, b, v = pt
    F, J = S.F, S.J
    h = S.automorphisms()[aut]
    fa, fm, fn = F.add, F.mul, F.neg
    ve = S.emb[v]
    bh = h[b]
    Tb = S.tr1[b]
    alpha = u
    alpha = fa[alpha][fn[fm[t][v]]]
    alpha = fa[alpha][fm[v][v]]
    alpha = fa[alpha][fn[S.tr2(a, b)]]
    alpha = fa[alpha][S.tr1[S.sharp[b]]]
    alpha = fa[alpha][fn[fm[v][Tb]]]
    beta = J.sub(J.sub(J.sub(S.emb[Tb], ve), bh), h[a])
    gamma = fa[fa[fn[t]][Tb]][fn[fa[v][S.tr1[a]]]]
    return (v, J.sub(bh, ve), alpha, beta, gamma)


def _coefs(fld, limit: int, rng) -> list[int]:
    if fld.order <= limit:
        return list(range(fld.order))
    return sorted(set([0, 1] + rng.integers(0, fld.order, size=limit).tolist()))


def validate_relations(GA: GroupAction, exhaustive_limit: int = 64, seed: int = 0) -> list[ClauseResult]:
    """Check the defining relations as permutation identities on the hexagon."""
    S = GA.S
    F, J = S.F, S.J
    rng = np.random.default_rng(seed)
    cf = _coefs(F, exhaustive_limit, rng)
    cj = _coefs(J, exhaustive_limit, rng)
    small_f = _coefs(F, 4, rng)
    small_j = _coefs(J, 4 if J.order > 8 else J.order, rng)
    coef = lambda i: cj if i % 2 else cf
    small = lambda i: small_j if i % 2 else small_f
    x = GA.x
    out: list[ClauseResult] = []

    def record(cid, failure):
        out.append(ClauseResult(cid, "pass" if failure is None else "fail", failure))

    def fmt(i, c):
        return f"x{i}({(J if i % 2 else F).format(c)})"

    # additivity x_i(a) x_i(b) = x_i(a+b)
    fail = None
    for i in ROOT_INDICES:
        fld = J if i % 2 else F
        for a in small(i):
            for b in coef(i):
                if x(i, a) * x(i, b) != x(i, fld.add[a][b]):
                    fail = {"lhs": f"{fmt(i, a)}*{fmt(i, b)}"}
                    break
            if fail:
                break
        if fail:
            break
    record("additivity", fail)

    coll = GA.collector
    # positive commutators, all pairs i < j (trivial ones included)
    fail = None
    for i in range(1, 7):
        for j in range(i + 1, 7):
            for a in small(i):
                for b in small(j):
                    lhs = commutator(x(i, a), x(j, b))
                    rhs = GA.product(coll.comm(i, a, j, b))
                    if lhs != rhs:
                        fail = {"pair": f"[{fmt(i, a)},{fmt(j, b)}]"}
                        break
                if fail:
                    break
            if fail:
                break
        if fail:
            break
    record("commutators", fail)

    # negative-root relations
    Fn, Jn = F.neg, J.neg
    neg_rel = {
        (2, 7): lambda t, a: [(3, S.scal(t, a)), (4, Fn[F.mul[F.mul[t][t]][S.norm[a]]]),
                              (5, S.scal(t, S.sharp[a])), (6, Fn[F.mul[t][S.norm[a]]])],
        (3, 7): lambda b, a: [(4, Fn[S.tr2(a, S.sharp[b])]), (5, S.cross_c(a, b)), (6, Fn[S.tr2(S.sharp[a], b)])],
        (5, 7): lambda b, a: [(6, Fn[S.tr2(a, b)])],
        (12, 4): lambda t, u: [(2, F.mul[t][u])],
        (12, 5): lambda t, a: [(1, Jn[S.scal(t, a)]), (2, Fn[F.mul[F.mul[t][t]][S.norm[a]]]),
                               (3, Jn[S.scal(t, S.sharp[a])]), (4, Fn[F.mul[t][S.norm[a]]])],
        (4, 7): lambda c, a: [],
        (6, 7): lambda c, a: [],
        (12, 1): lambda t, c: [],
        (12, 2): lambda t, c: [],
        (12, 3): lambda t, c: [],
    }
    fail = None
    for (i, j), fn in neg_rel.items():
        for a in small(i):
            for b in small(j):
                lhs = commutator(x(i, a), x(j, b))
                if lhs != GA.product(fn(a, b)):
                    fail = {"pair": f"[{fmt(i, a)},{fmt(j, b)}]"}
                    break
            if fail:
                break
        if fail:
            break
    record("negative_roots", fail)

    s1 = GA.letter_perm(Letter("s1"))
    s6 = GA.letter_perm(Letter("s6"))
    ident = GA.identity()
    record("s1_order4", None if (s1 ** 4) == ident else {"lhs": "s1^4"})
    record("s6_order4", None if (s6 ** 4) == ident else {"lhs": "s6^4"})
    sq_trivial = (s1 ** 2) == ident
    record("s1_square", None if sq_trivial == (F.p == 2) else {"lhs": "s1^2", "trivial": sq_trivial})
    record("s1_fold", None if s1 == x(7, 1) * x(1, 1) * x(7, 1) else {"lhs": "x7(1)x1(1)x7(1)"})
    record("s6_fold", None if s6 == x(12, 1) * x(6, 1) * x(12, 1) else {"lhs": "x12(1)x6(1)x12(1)"})

    # general s1(a), s6(t) and the folds x1(a) = x7(-a^-1) s1(a) x7(-a^-1)
    fail = None
    for a in small_j:
        if a == 0:
            continue
        ai = S.inv_c(a)
        s1a = x(7, ai) * x(1, a) * x(7, ai)
        if x(1, a) != x(7, J.neg[ai]) * s1a * x(7, J.neg[ai]):
            fail = {"a": J.format(a)}
            break
        if s1a * x(4, 1) * s1a.inverse() != x(4, 1):
            fail = {"a": J.format(a), "rel": "x4 fixed"}
            break
        n = S.norm[a]
        for tcoef in small_f:
            if s1a * x(2, tcoef) * s1a.inverse() != x(6, F.mul[tcoef][F.inv[n]]):
                fail = {"a": J.format(a), "rel": "x2 -> x6(t/N(a))"}
                break
            if s1a * x(6, tcoef) * s1a.inverse() != x(2, F.neg[F.mul[tcoef][n]]):
                fail = {"a": J.format(a), "rel": "x6 -> x2(-tN(a))"}
                break
        if fail:
            break
    for t in small_f:
        if fail or t == 0:
            continue
        ti = F.inv[t]
        s6t = x(12, ti) * x(6, t) * x(12, ti)
        if x(6, t) != x(12, F.neg[ti]) * s6t * x(12, F.neg[ti]):
            fail = {"t": F.format(t)}
            break
        for a in small_j:
            if s6t * x(1, a) * s6t.inverse() != x(5, S.scal(t, a)):
                fail = {"t": F.format(t), "rel": "x1 -> x5(ta)"}
                break
            if s6t * x(5, a) * s6t.inverse() != x(1, J.neg[S.scal(ti, a)]):
                fail = {"t": F.format(t), "rel": "x5 -> x1(-a/t)"}
                break
    record("folds_and_tori", fail)

    # sign table
    fail = None
    for which, sp in ((1, s1), (6, s6)):
        spi = sp.inverse()
        for j in range(1, 7):
            k = (2 * which + 6 - j - 1) % 12 + 1
            fld = J if j % 2 else F
            for a in small(j):
                ea = a if EPS[which][j] == 1 else fld.neg[a]
                if sp * x(j, a) * spi != x(k, ea):
                    fail = {"rel": f"s{which} {fmt(j, a)} s{which}^-1"}
                    break
            if fail:
                break
        if fail:
            break
    record("sign_table", fail)

    # U4 central, U3 central iff class H4
    def central(i):
        for a in small(i):
            for j in range(1, 7):
                for b in small(j):
                    if x(i, a) * x(j, b) != x(j, b) * x(i, a):
                        return {"pair": f"{fmt(i, a)},{fmt(j, b)}"}
        return None
    record("U4_central", central(4))
    u3 = central(3)
    ok = (u3 is None) == (S.family == "H4")
    record("U3_central_iff_H4", None if ok else {"U3_central": u3 is None, "family": S.family})
    return out


# -- group listings -------------------------------------------------------------

@dataclass
class GroupListing:
    perms: np.ndarray  # m x n_points, sorted rows

    def __len__(self) -> int:
        return len(self.perms)

    def inverses(self) -> np.ndarray:
        m, n = self.perms.shape
        inv = np.empty_like(self.perms)
        rows = np.arange(m)[:, None]
        inv[rows, self.perms] = np.arange(n, dtype=self.perms.dtype)[None, :]
        return inv


def closure(gens: Sequence[Collineation], cap: int = 10**6) -> GroupListing:
    """All products of the generators, by breadth-first right multiplication."""
    if not gens:
        raise ValueError("closure needs at least one generator")
    n = len(gens[0].point_perm)
    ident = np.arange(n, dtype=np.int32)
    gp = [g.point_perm.astype(np.int32) for g in gens]
    seen = {ident.tobytes()}
    elems = [ident]
    head = 0
    while head < len(elems):
        cur = elems[head]
        head += 1
        for g in gp:
            nxt = cur[g]
            key = nxt.tobytes()
            if key not in seen:
                seen.add(key)
                elems.append(nxt)
                if len(elems) > cap:
                    raise CapExceeded(f"group order exceeds cap {cap}")
    arr = np.array(elems, dtype=np.int32)
    order = np.lexsort(arr.T[::-1])
    return GroupListing(arr[order])


def are_conjugate(c1: Collineation, c2: Collineation, group: GroupListing | None = None,
                  sampler: Iterator[Collineation] | None = None, budget: int = 10**4):
    """True/False when decided; None means unknown after ``budget`` sampled conjugators."""
    if c1.order() != c2.order() or len(c1.fixed_points()) != len(c2.fixed_points()) \
            or len(c1.fixed_lines()) != len(c2.fixed_lines()):
        return False
    if c1 == c2:
        return True
    if group is not None:
        conj = conjugates(c1.point_perm, group)
        return bool((conj == c2.point_perm[None, :]).all(axis=1).any())
    if sampler is None:
        return None
    target = c2.point_perm
    for k, g in enumerate(sampler):
        if k >= budget:
            break
        if np.array_equal(g.point_perm[c1.point_perm[g.inverse().point_perm]], target):
            return True
    return None


def conjugates(pp: np.ndarray, group: GroupListing) -> np.ndarray:
    """Rows g pp g^-1 for every g in the group."""
    G = group.perms
    Ginv = group.inverses()
    return np.take_along_axis(G, pp[Ginv], axis=1)


def conjugacy_classes(perms: np.ndarray, group: GroupListing) -> list[np.ndarray]:
    """Partition a set of group elements (rows) into classes of the full group."""
    remaining = {r.tobytes(): r for r in perms}
    classes = []
    while remaining:
        key = min(remaining)
        rep = remaining[key]
        cls = np.unique(conjugates(rep, group), axis=0)
        members = [r for r in (c.tobytes() for c in cls) if r in remaining]
        for r in members:
            del remaining[r]
        classes.append(cls)
    return classes


def default_generators(GA: GroupAction, with_aut: bool = True) -> list[Collineation]:
    """x_i over an F-basis of each root group (i = 1..6), s1, s6 and the nontrivial automorphism."""
    S = GA.S
    gens = []
    for i in range(1, 7):
        fld = S.J if i % 2 else S.F
        for k in range(fld.k):
            gens.append(GA.x(i, fld.p**k))
    gens.append(GA.letter_perm(Letter("s1")))
    gens.append(GA.letter_perm(Letter("s6")))
    if with_aut and S.kind == "ThreeF":
        gens.append(GA.letter_perm(Letter("h", aut="sigma")))
    return gens


def random_walk_sampler(GA: GroupAction, seed: int, steps: int, gens: Sequence[Collineation] | None = None,
                        burn_in: int = 50) -> Iterator[Collineation]:
    """Seeded walk cur <- cur * g with g uniform among the generators; yields after burn-in."""
    gens = list(gens) if gens is not None else default_generators(GA)
    rng = np.random.default_rng(seed)
    choices = rng.integers(0, len(gens), size=steps + burn_in)
    cur = GA.identity()
    for k, g in enumerate(choices):
        cur = cur * gens[int(g)]
        if k >= burn_in:
            cur.word = f"walk(seed={seed},step={k})"
            yield cur
