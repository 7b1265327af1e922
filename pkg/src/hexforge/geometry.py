"""The coordinatised hexagon of a hexagonal system.

Points are written (inf), (t), (a,t), (t,a,t'), (a,t,a',t'), (t,a,t',a',t'')
and lines [inf], [b], [t,a], [b,u,b'], [t,a,t',a'], [b,u,b',u',b''], with
t, u in F and a, b in J.  Incidence is the truncation chain

    (t,a,t',a',t'')*[t,a,t',a']*(t,a,t')*[t,a]*(t)*[inf]*(inf)*[b]*(b,u)*[b,u,b']*(b,u,b',u')*[b,u,b',u',b'']

together with the rule linking 5-tuple points and 5-tuple lines (``line5_through``).

Vertices of the incidence graph are numbered points first (0..n_p-1), then
lines (n_p..n_p+n_l-1), each sort in canonical order: cell, then coordinates
compared by coefficient vectors.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from . import kernels
from .hexsystem import HexSystem

POINT, LINE = "point", "line"
MAX_ELEMENTS = 10**5
DENSE_LIMIT = 4000


class GeometryError(Exception):
    pass


class TooLarge(GeometryError):
    pass


class AxiomViolation(GeometryError):
    pass


class SortMismatch(GeometryError):
    pass


class NotOpposite(GeometryError):
    pass


class HexElement(NamedTuple):
    sort: str
    coords: tuple  # integer codes, F/J alternating by cell

    @property
    def cell(self) -> int:
        return len(self.coords)


def coord_pattern(sort: str, cell: int) -> str:
    """'F'/'J' per coordinate position."""
    # points of odd cells start with an F-coordinate, lines of odd cells with J
    first_f = (cell % 2 == 1) == (sort == POINT)
    return "".join(("F" if (i % 2 == 0) == first_f else "J") for i in range(cell))


def _coord_ranges(S: HexSystem, pattern: str):
    F, J = S.F, S.J
    return [sorted(range(F.order), key=F.sort_key) if c == "F" else sorted(range(J.order), key=J.sort_key)
            for c in pattern]


def line5_through(S: HexSystem, pt: tuple, b: int) -> tuple:
    """The 5-tuple line [b,u,b',u',b''] through the 5-tuple point ``pt`` with first coordinate b."""
    t, a, t1, a1, t2 = pt
    F, J = S.F, S.J
    fa, fm, fn = F.add, F.mul, F.neg
    ja, jm, jn = J.add, J.mul, J.neg
    Nb = S.norm[b]
    bs = S.sharp[b]
    u = fa[fa[t2][fm[t][Nb]]][fa[fn[S.tr2(a1, b)]][S.tr2(a, bs)]]
    b1 = ja[ja[a1][jn[S.cross_c(a, b)]]][jn[S.scal(t, bs)]]
    u1 = t1
    u1 = fa[u1][fm[fm[t][t]][Nb]]
    u1 = fa[u1][fn[fm[t][t2]]]
    u1 = fa[u1][fm[t][S.tr2(a, bs)]]
    u1 = fa[u1][S.tr2(S.sharp[a], b)]
    u1 = fa[u1][fn[S.tr2(a, a1)]]
    b2 = ja[a][S.scal(t, b)]
    return (b, u, b1, u1, b2)


def point5_on(S: HexSystem, ln: tuple, t: int) -> tuple:
    """The 5-tuple point (t,a,t',a',t'') on the 5-tuple line ``ln`` with first coordinate t."""
    b, u, b1, u1, b2 = ln
    F, J = S.F, S.J
    fa, fm, fn = F.add, F.mul, F.neg
    ja, jn = J.add, J.neg
    Nb = S.norm[b]
    bs = S.sharp[b]
    a = ja[b2][jn[S.scal(t, b)]]
    t1 = u1
    t1 = fa[t1][fm[fm[t][t]][Nb]]
    t1 = fa[t1][fm[u][t]]
    t1 = fa[t1][fn[fm[t][S.tr2(b2, bs)]]]
    t1 = fa[t1][S.tr2(b1, b2)]
    t1 = fa[t1][S.tr2(S.sharp[b2], b)]
    a1 = ja[ja[b1][S.cross_c(b, b2)]][jn[S.scal(t, bs)]]
    t2 = fa[fa[u][fn[fm[t][Nb]]]][fa[S.tr2(b, b1)][S.tr2(b2, bs)]]
    return (t, a, t1, a1, t2)


@dataclass
class AxiomReport:
    n_points: int
    n_lines: int
    girth: int
    diameter: int
    point_degrees: tuple
    line_degrees: tuple
    thick: bool
    counts_ok: bool

    @property
    def ok(self) -> bool:
        return self.girth == 12 and self.diameter == 6 and self.counts_ok and \
            len(self.point_degrees) == 1 and len(self.line_degrees) == 1

    def to_dict(self) -> dict:
        return {
            "points": self.n_points, "lines": self.n_lines, "girth": self.girth,
            "diameter": self.diameter, "lines_per_point": list(self.point_degrees),
            "points_per_line": list(self.line_degrees), "thick": self.thick,
            "counts_ok": self.counts_ok, "ok": self.ok,
        }


@dataclass
class FixedStructure:
    structure: str
    n_points: int
    n_lines: int
    center: HexElement | None = None
    large: bool = False
    thick: bool = False
    full: bool = False
    ideal: bool = False

    def to_dict(self, hexagon: "Hexagon | None" = None) -> dict:
        d = {"structure": self.structure, "points": self.n_points, "lines": self.n_lines,
             "large": self.large, "thick": self.thick, "full": self.full, "ideal": self.ideal}
        if self.center is not None:
            d["center"] = hexagon.format_element(self.center) if hexagon else str(self.center)
        return d


class Hexagon:
    """Points, lines, incidence and the distance oracle of Gamma(J, F, #)."""

    def __init__(self, system: HexSystem, incidences: np.ndarray | None = None):
        self.system = S = system
        s, t = S.s, S.t
        self.s, self.t = s, t
        n_p = (1 + s) * (1 + s * t + s * s * t * t)
        n_l = (1 + t) * (1 + s * t + s * s * t * t)
        if n_p + n_l > MAX_ELEMENTS:
            raise TooLarge(f"{n_p + n_l} elements exceed the limit of {MAX_ELEMENTS}")
        self.points = self._enumerate(POINT)
        self.lines = self._enumerate(LINE)
        self.n_points, self.n_lines = len(self.points), len(self.lines)
        if (self.n_points, self.n_lines) != (n_p, n_l):
            raise AxiomViolation(f"counted {self.n_points}/{self.n_lines}, expected {n_p}/{n_l}")
        self.point_index = {c: i for i, c in enumerate(self.points)}
        self.line_index = {c: i for i, c in enumerate(self.lines)}
        self._install_incidence(self._incidence_pairs() if incidences is None else np.asarray(incidences))
        self._dist = None

    # -- construction -----------------------------------------------------
    def _enumerate(self, sort: str) -> list[tuple]:
        out = []
        for cell in range(6):
            pat = coord_pattern(sort, cell)
            out.extend(itertools.product(*_coord_ranges(self.system, pat)))
        return out

    def _incidence_pairs(self) -> np.ndarray:
        S = self.system
        pidx, lidx = self.point_index, self.line_index
        pairs = [(pidx[()], lidx[()])]
        for i, c in enumerate(self.points):
            if c:
                pairs.append((i, lidx[c[:-1]]))
        for j, c in enumerate(self.lines):
            if c:
                pairs.append((pidx[c[:-1]], j))
        for i, c in enumerate(self.points):
            if len(c) == 5:
                for b in range(S.t):
                    pairs.append((i, lidx[line5_through(S, c, b)]))
        pairs.sort()
        return np.array(pairs, dtype=np.int32)

    def _install_incidence(self, inc: np.ndarray) -> None:
        inc = np.ascontiguousarray(inc, dtype=np.int32)
        self.incidences = inc
        n_p, n_l = self.n_points, self.n_lines
        deg_p = np.bincount(inc[:, 0], minlength=n_p)
        deg_l = np.bincount(inc[:, 1], minlength=n_l)
        if deg_p.min() != deg_p.max() or deg_l.min() != deg_l.max():
            raise AxiomViolation("irregular incidence degrees")
        self.lines_per_point = int(deg_p[0])
        self.points_per_line = int(deg_l[0])
        self.point_lines = inc[np.argsort(inc[:, 0], kind="stable"), 1].reshape(n_p, -1).copy()
        order = np.lexsort((inc[:, 0], inc[:, 1]))
        self.line_points = inc[order, 0].reshape(n_l, -1).copy()
        # line through two collinear points, -1 otherwise
        line_of = np.full((n_p, n_p), -1, dtype=np.int32)
        for L in range(n_l):
            pts = self.line_points[L]
            line_of[np.ix_(pts, pts)] = L
        self.line_of = line_of
        self.chamber_points = inc[:, 0].copy()
        self.chamber_lines = inc[:, 1].copy()

    @property
    def n_vertices(self) -> int:
        return self.n_points + self.n_lines

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        n_p = self.n_points
        nbrs = [self.point_lines[i] + n_p for i in range(n_p)] + [self.line_points[j] for j in range(self.n_lines)]
        indptr = np.zeros(self.n_vertices + 1, dtype=np.int32)
        indptr[1:] = np.cumsum([len(x) for x in nbrs])
        indices = np.concatenate(nbrs).astype(np.int32)
        return indptr, indices

    def neighbours(self, v: int) -> np.ndarray:
        if v < self.n_points:
            return self.point_lines[v] + self.n_points
        return self.line_points[v - self.n_points]

    # -- elements -----------------------------------------------------------
    def vertex(self, e: HexElement) -> int:
        if e.sort == POINT:
            return self.point_index[tuple(e.coords)]
        return self.n_points + self.line_index[tuple(e.coords)]

    def element(self, v: int) -> HexElement:
        if v < self.n_points:
            return HexElement(POINT, self.points[v])
        return HexElement(LINE, self.lines[v - self.n_points])

    def format_element(self, e: HexElement) -> str:
        S = self.system
        pat = coord_pattern(e.sort, e.cell)
        parts = [(S.F if c == "F" else S.J).format(x) for c, x in zip(pat, e.coords)]
        body = ",".join(parts) if parts else "inf"
        return f"({body})" if e.sort == POINT else f"[{body}]"

    def parse_element(self, text: str) -> HexElement:
        from .exactfield import parse_literal
        text = text.strip()
        if len(text) < 2 or (text[0], text[-1]) not in (("(", ")"), ("[", "]")):
            raise GeometryError(f"bad element literal {text!r}")
        sort = POINT if text[0] == "(" else LINE
        body = text[1:-1].strip()
        if body in ("inf", "∞"):
            return HexElement(sort, ())
        parts = _split_top(body)
        if not 1 <= len(parts) <= 5:
            raise GeometryError(f"an element has 0 to 5 coordinates, got {len(parts)}")
        pat = coord_pattern(sort, len(parts))
        S = self.system
        coords = tuple(parse_literal(S.F if c == "F" else S.J, p).value for c, p in zip(pat, parts))
        return HexElement(sort, coords)

    # -- incidence ------------------------------------------------------------
    def incident(self, p: HexElement, L: HexElement) -> bool:
        if p.sort != POINT or L.sort != LINE:
            raise SortMismatch("incident() takes a point and a line")
        a, b = tuple(p.coords), tuple(L.coords)
        if len(a) == 5 and len(b) == 5:
            first = line5_through(self.system, a, b[0]) == b
            second = point5_on(self.system, b, a[0]) == a
            if first != second:
                raise AxiomViolation(f"incidence systems disagree on {a} / {b}")
            return first
        if not a and not b:
            return True
        return (len(a) == len(b) + 1 and a[:-1] == b) or (len(b) == len(a) + 1 and b[:-1] == a)

    def incident_index(self, i: int, j: int) -> bool:
        return bool(np.any(self.point_lines[i] == j))

    # -- distances -----------------------------------------------------------
    @property
    def dist(self) -> np.ndarray:
        if self._dist is None:
            if self.n_vertices > DENSE_LIMIT:
                raise TooLarge("dense distance matrix disabled above 4000 elements")
            indptr, indices = self.csr()
            self._dist = kernels.bfs_distances(indptr, indices, self.n_vertices)
        return self._dist

    @property
    def opp_points(self) -> np.ndarray:
        n = self.n_points
        if not hasattr(self, "_opp_pt"):
            self._opp_pt = np.ascontiguousarray(self.dist[:n, :n] == 6)
        return self._opp_pt

    @property
    def opp_lines(self) -> np.ndarray:
        n = self.n_points
        if not hasattr(self, "_opp_ln"):
            self._opp_ln = np.ascontiguousarray(self.dist[n:, n:] == 6)
        return self._opp_ln

    def distance(self, x: HexElement, y: HexElement) -> int:
        return int(self.dist[self.vertex(x), self.vertex(y)])

    def is_opposite(self, x: HexElement, y: HexElement) -> bool:
        return x.sort == y.sort and self.distance(x, y) == 6

    def ball(self, x: HexElement, r: int) -> list[HexElement]:
        row = self.dist[self.vertex(x)]
        return [self.element(v) for v in np.nonzero(row <= r)[0]]

    # -- axioms -------------------------------------------------------------
    def verify_axioms(self) -> AxiomReport:
        D = self.dist
        n_p = self.n_points
        if (D == 255).any():
            diameter = -1
        else:
            diameter = int(D.max())
        # girth = 2 * least distance at which some vertex has two parents
        girth = 0
        nbr_p = self.point_lines + n_p
        nbr_l = self.line_points
        for cols, nb in ((np.arange(n_p), nbr_p), (np.arange(n_p, self.n_vertices), nbr_l)):
            Dc = D[:, cols].astype(np.int16)
            Dn = D[:, nb].astype(np.int16)  # V x |cols| x deg
            parents = (Dn == (Dc[:, :, None] - 1)).sum(axis=2)
            multi = (parents >= 2) & (Dc > 0)
            if multi.any():
                g = 2 * int(Dc[multi].min())
                girth = g if girth == 0 else min(girth, g)
        s, t = self.s, self.t
        counts_ok = (self.n_points == (1 + s) * (1 + s * t + s * s * t * t)
                     and self.n_lines == (1 + t) * (1 + s * t + s * s * t * t))
        return AxiomReport(
            self.n_points, self.n_lines, girth, diameter,
            (self.lines_per_point,), (self.points_per_line,),
            self.lines_per_point >= 3 and self.points_per_line >= 3, counts_ok,
        )

    # -- point/line sets ------------------------------------------------------
    def is_ovoid(self, pts: Iterable[int]) -> bool:
        return self._is_ovoid_like(np.fromiter(pts, dtype=np.int64))

    def is_spread(self, lines: Iterable[int]) -> bool:
        return self._is_ovoid_like(np.fromiter(lines, dtype=np.int64) + self.n_points)

    def _is_ovoid_like(self, verts: np.ndarray) -> bool:
        if len(verts) == 0:
            return False
        D = self.dist
        sub = D[np.ix_(verts, verts)]
        off = ~np.eye(len(verts), dtype=bool)
        if not (sub[off] == 6).all():
            return False
        return bool((D[verts].min(axis=0) <= 3).all())

    def classify_substructure(self, fixed_points, fixed_lines) -> FixedStructure:
        fp = np.asarray(sorted(int(x) for x in fixed_points), dtype=np.int64)
        fl = np.asarray(sorted(int(x) for x in fixed_lines), dtype=np.int64)
        n_p, n_l = len(fp), len(fl)
        if n_p == self.n_points and n_l == self.n_lines:
            return FixedStructure("everything", n_p, n_l, large=True, thick=True, full=True, ideal=True)
        if n_p == 0 and n_l == 0:
            return FixedStructure("empty", 0, 0)
        D = self.dist
        verts = np.concatenate([fp, fl + self.n_points])
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[verts] = True
        # balls of radius 3
        for centres, sort in ((fp, POINT), (fl + self.n_points, LINE)):
            for c in centres:
                if np.array_equal(D[c] <= 3, mask):
                    return FixedStructure("ball_at_" + sort, n_p, n_l, center=self.element(int(c)))
        if n_l == 0 and self.is_ovoid(fp):
            return FixedStructure("ovoid", n_p, 0, large=True)
        if n_p == 0 and self.is_spread(fl):
            return FixedStructure("spread", 0, n_l, large=True)
        fpm = mask[:self.n_points]
        flm = mask[self.n_points:]
        full = bool(n_l > 0 and fpm[self.line_points[fl]].all())
        ideal = bool(n_p > 0 and flm[self.point_lines[fp]].all())
        large = bool((D[verts].min(axis=0) <= 3).all())
        sub_pl = [self.point_lines[p][flm[self.point_lines[p]]] for p in fp]
        sub_lp = [self.line_points[L][fpm[self.line_points[L]]] for L in fl]
        thick = all(len(x) >= 3 for x in sub_pl) and all(len(x) >= 3 for x in sub_lp)
        if self._is_subhexagon(fp, fl, mask):
            kind = "full_subhexagon" if full else ("ideal_subhexagon" if ideal else "subhexagon")
            return FixedStructure(kind, n_p, n_l, large=large, thick=thick, full=full, ideal=ideal)
        return FixedStructure("other", n_p, n_l, large=large, thick=thick, full=full, ideal=ideal)

    def _is_subhexagon(self, fp, fl, mask) -> bool:
        """Connected, induced diameter 6, and every element on a 12-cycle inside."""
        verts = np.nonzero(mask)[0]
        if len(verts) < 12:
            return False
        local = {int(v): i for i, v in enumerate(verts)}
        adj = []
        for v in verts:
            adj.append([local[int(w)] for w in self.neighbours(int(v)) if mask[w]])
        if any(len(a) < 2 for a in adj):
            return False
        n = len(verts)

        def bfs(src, banned=-1):
            d = [-1] * n
            d[src] = 0
            frontier = [src]
            while frontier:
                nxt = []
                for x in frontier:
                    for y in adj[x]:
                        if y != banned and d[y] < 0:
                            d[y] = d[x] + 1
                            nxt.append(y)
                frontier = nxt
            return d

        for v in range(n):
            d = bfs(v)
            if min(d) < 0 or max(d) != 6:
                return False
        for v in range(n):
            x = adj[v][0]
            d = bfs(x, banned=v)
            if not any(d[y] == 10 for y in adj[v][1:]):
                # try other starting neighbours before giving up
                ok = False
                for x2 in adj[v][1:]:
                    d2 = bfs(x2, banned=v)
                    if any(d2[y] == 10 for y in adj[v] if y != x2):
                        ok = True
                        break
                if not ok:
                    return False
        return True

    # -- traces, regularity, imaginary lines ----------------------------------
    def trace(self, x: int, y: int, i: int) -> np.ndarray:
        """Gamma_i(x) intersect Gamma_{6-i}(y), as vertex indices."""
        D = self.dist
        if D[x, y] != 6:
            raise NotOpposite("trace needs opposite elements")
        return np.nonzero((D[x] == i) & (D[y] == 6 - i))[0]

    def distance_i_trace(self, x: HexElement, y: HexElement, i: int) -> list[HexElement]:
        if i not in (2, 3):
            raise GeometryError("i must be 2 or 3")
        return [self.element(v) for v in self.trace(self.vertex(x), self.vertex(y), i)]

    def regularity_violation(self, sort: str, i: int, sample: int | None = None, seed: int = 0):
        """First (x, y, z) with distinct traces x^y, x^z sharing >= 2 elements, or None.

        Exhaustive unless ``sample`` gives a number of random (x, y, z) triples.
        """
        D = self.dist
        base = 0 if sort == POINT else self.n_points
        count = self.n_points if sort == POINT else self.n_lines
        if sample is None:
            for x in range(base, base + count):
                gi = np.nonzero(D[x] == i)[0]
                ys = np.nonzero(D[x] == 6)[0]
                M = (D[np.ix_(ys, gi)] == 6 - i)
                uniq, first = np.unique(M, axis=0, return_index=True)
                G = uniq.astype(np.int32) @ uniq.T.astype(np.int32)
                np.fill_diagonal(G, 0)
                bad = np.argwhere(G >= 2)
                if len(bad):
                    r1, r2 = bad[0]
                    return int(x), int(ys[first[r1]]), int(ys[first[r2]])
            return None
        rng = np.random.default_rng(seed)
        xs = rng.integers(base, base + count, size=sample)
        for x in np.unique(xs):
            k = int((xs == x).sum())
            gi = np.nonzero(D[x] == i)[0]
            ys = np.nonzero(D[x] == 6)[0]
            y1 = rng.choice(ys, size=k)
            y2 = rng.choice(ys, size=k)
            A = D[np.ix_(y1, gi)] == 6 - i
            B = D[np.ix_(y2, gi)] == 6 - i
            inter = (A & B).sum(axis=1)
            differ = (A != B).any(axis=1)
            bad = np.nonzero(differ & (inter >= 2))[0]
            if len(bad):
                j = bad[0]
                return int(x), int(y1[j]), int(y2[j])
        return None

    def is_distance_i_regular(self, sort: str, i: int, sample: int | None = None, seed: int = 0) -> bool:
        return self.regularity_violation(sort, i, sample, seed) is None

    def imaginary_line(self, p: int, q: int) -> np.ndarray:
        """I(p, q) for opposite point indices, as point indices."""
        D = self.dist
        n_p = self.n_points
        if D[p, q] != 6:
            raise NotOpposite("imaginary lines need opposite points")
        Ls = self.trace(p, q, 3)
        members = np.nonzero((D[np.ix_(Ls, np.arange(n_p))] == 3).all(axis=0))[0]
        return members

    def imaginary_line_shortcut(self, p: int, q: int) -> np.ndarray:
        """Same set computed from two members of L(p, q) only."""
        D = self.dist
        Ls = self.trace(p, q, 3)
        # points at distance 3 from two lines of the trace: with distance-3 regularity this is I(p,q)
        return np.nonzero((D[Ls[0], :self.n_points] == 3) & (D[Ls[1], :self.n_points] == 3))[0]

    def closed_under_imaginary_lines(self, pts) -> tuple[bool, tuple | None]:
        pts = sorted(int(x) for x in pts)
        have = set(pts)
        for p, q in itertools.combinations(pts, 2):
            if self.dist[p, q] != 6:
                return False, (p, q)
            if not set(self.imaginary_line(p, q).tolist()) <= have:
                return False, (p, q)
        return True, None

    # -- export -----------------------------------------------------------------
    def to_json_dict(self) -> dict:
        fmt = self.format_element
        return {
            "points": [fmt(HexElement(POINT, c)) for c in self.points],
            "lines": [fmt(HexElement(LINE, c)) for c in self.lines],
            "incidences": self.incidences.tolist(),
        }

    def to_dot(self) -> str:
        fmt = self.format_element
        out = ["graph hexagon {"]
        for i, c in enumerate(self.points):
            out.append(f'  p{i} [shape=circle, label="{fmt(HexElement(POINT, c))}"];')
        for j, c in enumerate(self.lines):
            out.append(f'  l{j} [shape=box, label="{fmt(HexElement(LINE, c))}"];')
        for i, j in self.incidences.tolist():
            out.append(f"  p{i} -- l{j};")
        out.append("}")
        return "\n".join(out) + "\n"


def _split_top(body: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur).strip())
    return parts


def build_hexagon(system: HexSystem) -> Hexagon:
    return Hexagon(system)


def load_or_build(system: HexSystem, cache_dir=None) -> Hexagon:
    """Build, reusing ``hexagon-<digest>.json`` in ``cache_dir`` when present."""
    import json
    import os
    if cache_dir is None:
        return Hexagon(system)
    path = os.path.join(cache_dir, f"hexagon-{system.digest()}.json")
    if os.path.exists(path):
        with open(path) as fh:
            data = json.load(fh)
        if data.get("descriptor") == system.describe():
            return Hexagon(system, np.array(data["incidences"], dtype=np.int32))
    H = Hexagon(system)
    os.makedirs(cache_dir, exist_ok=True)
    with open(path, "w") as fh:
        json.dump({"descriptor": system.describe(), "digest": system.digest(),
                   "incidences": H.incidences.tolist()}, fh, sort_keys=True)
    return H
