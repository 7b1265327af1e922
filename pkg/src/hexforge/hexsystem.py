"""Hexagonal systems (J, F, #) of the two kinds used here.

``OneF``: J = F, with a# = a^2, N(a) = a^3, T(a, b) = 3ab, a x b = 2ab.

``ThreeF``: J = E a cubic extension of F, sigma: x -> x^|F| and
a# = a^sigma a^sigma^2, N(a) = a a^sigma a^sigma^2,
T(a, b) = ab + a^sigma b^sigma + a^sigma^2 b^sigma^2,
a x b = a^sigma b^sigma^2 + a^sigma^2 b^sigma.

In both cases T(a, b) is the trace of ab down to F, which is how the tables
below are filled.  Integer-coded tables (``sharp``, ``norm``, ``tr1``...)
are what the geometry layer uses; the public methods take FieldElements.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .exactfield import (
    FieldElement,
    FieldError,
    FiniteField,
    MixedFields,
    ZeroInverse,
    embed_subfield,
    make_field,
)

KINDS = ("OneF", "ThreeF")


class UnsupportedKind(FieldError):
    pass


class BadExtensionDegree(FieldError):
    pass


class NormNotInBase(ArithmeticError):
    """Norm or unary trace left the base field; the tables are inconsistent."""


class HexSystem:
    """A hexagonal system over finite fields, with integer-code tables.

    Attributes of interest to the geometry layer:

    ``F``, ``J``      the two fields (``J is F`` for OneF)
    ``emb``           F-code -> J-code
    ``res``           J-code -> F-code for elements of F (else absent)
    ``sharp, norm, tr1, sigma``  lookup lists on J-codes
    """

    def __init__(self, kind: str, F: FiniteField, E: FiniteField | None = None):
        if kind not in KINDS:
            hint = ""
            if kind.replace(" ", "") in ("9/F", "9K/F", "27/F", "27K/F", "NineF", "NineKF", "TwentySevenF"):
                hint = " (types 9/F, 9K/F, 27/F, 27K/F have no finite instances: the division algebras they need do not exist over finite fields, after Wedderburn)"
            raise UnsupportedKind(f"unknown kind {kind!r}; expected one of {KINDS}{hint}")
        if kind == "OneF":
            if E is not None and E != F:
                raise UnsupportedKind("OneF takes J = F")
            E = F
        else:
            if E is None or E.p != F.p or E.k != 3 * F.k:
                raise BadExtensionDegree(f"{E!r} is not a cubic extension of {F!r}")
        self.kind = kind
        self.F = F
        self.J = E
        self.s = F.order
        self.t = E.order
        self._build()

    def _build(self) -> None:
        F, J = self.F, self.J
        if self.kind == "OneF":
            self.emb = list(range(F.order))
        else:
            self.emb = embed_subfield(F, J)
        self.res = {j: f for f, j in enumerate(self.emb)}
        q = J.order
        mul, add = J.mul, J.add
        if self.kind == "OneF":
            self.sigma = list(range(q))
            self.sigma2 = self.sigma
        else:
            sig = []
            for a in range(q):
                sig.append(J.pow(a, F.order))
            self.sigma = sig
            self.sigma2 = [sig[sig[a]] for a in range(q)]
        s1, s2 = self.sigma, self.sigma2
        if self.kind == "OneF":
            sharp = [mul[a][a] for a in range(q)]
            norm_j = [mul[sharp[a]][a] for a in range(q)]
            three = J.from_int(3)
            tr_j = [mul[three][a] for a in range(q)]
        else:
            sharp = [mul[s1[a]][s2[a]] for a in range(q)]
            norm_j = [mul[a][sharp[a]] for a in range(q)]
            tr_j = [add[add[a][s1[a]]][s2[a]] for a in range(q)]
        self.sharp = sharp
        # norm and unary trace land in F
        try:
            self.norm = [self.res[v] for v in norm_j]
            self.tr1 = [self.res[v] for v in tr_j]
        except KeyError as exc:
            raise NormNotInBase(f"value {exc.args[0]} of N or T is not in F") from None
        one = J.from_int(1)
        if sharp[one] != one or self.norm[one] != F.from_int(1):
            raise NormNotInBase("smoke check 1^# = 1, N(1) = 1 failed")

    # -- integer-code kernels ---------------------------------------------
    def tr2(self, a: int, b: int) -> int:
        """T(a, b) as an F-code."""
        return self.tr1[self.J.mul[a][b]]

    def cross_c(self, a: int, b: int) -> int:
        J = self.J
        if self.kind == "OneF":
            return J.mul[J.from_int(2)][J.mul[a][b]]
        s1, s2 = self.sigma, self.sigma2
        return J.add[J.mul[s1[a]][s2[b]]][J.mul[s2[a]][s1[b]]]

    def scal(self, t: int, a: int) -> int:
        """t . a for t in F, a in J."""
        return self.J.mul[self.emb[t]][a]

    def inv_c(self, a: int) -> int:
        if a == 0:
            raise ZeroInverse("0 is not invertible in J")
        return self.scal(self.F.inv[self.norm[a]], self.sharp[a])

    # -- FieldElement API -------------------------------------------------------
    def _j(self, a) -> int:
        if isinstance(a, FieldElement):
            if a.field != self.J:
                raise MixedFields(f"expected an element of {self.J!r}")
            return a.value
        return self.J.from_int(a)

    def _f(self, t) -> int:
        if isinstance(t, FieldElement):
            if t.field != self.F:
                raise MixedFields(f"expected an element of {self.F!r}")
            return t.value
        return self.F.from_int(t)

    def adjoint(self, a) -> FieldElement:
        return FieldElement(self.J, self.sharp[self._j(a)])

    def norm_of(self, a) -> FieldElement:
        return FieldElement(self.F, self.norm[self._j(a)])

    def trace(self, a, b=None) -> FieldElement:
        """T(a, b); with one argument the unary trace T(a) = T(a, 1)."""
        a = self._j(a)
        if b is None:
            return FieldElement(self.F, self.tr1[a])
        return FieldElement(self.F, self.tr2(a, self._j(b)))

    def cross(self, a, b) -> FieldElement:
        return FieldElement(self.J, self.cross_c(self._j(a), self._j(b)))

    def inverse(self, a) -> FieldElement:
        return FieldElement(self.J, self.inv_c(self._j(a)))

    def scalar(self, t, a) -> FieldElement:
        return FieldElement(self.J, self.scal(self._f(t), self._j(a)))

    def embed(self, t) -> FieldElement:
        return FieldElement(self.J, self.emb[self._f(t)])

    def in_F(self, a) -> bool:
        return self._j(a) in self.res

    # -- automorphisms ------------------------------------------------------
    def automorphisms(self) -> dict[str, list[int]]:
        """Named automorphisms of J fixing F, tabulated on J-codes."""
        autos = {"id": list(range(self.t))}
        if self.kind == "ThreeF":
            autos["sigma"] = list(self.sigma)
            autos["sigma2"] = list(self.sigma2)
        return autos

    # -- description ----------------------------------------------------------
    @property
    def family(self) -> str:
        if self.kind == "ThreeF":
            return "H2-3D4"
        return "H4" if self.F.p == 3 else "H1"

    @property
    def label(self) -> str:
        return f"{self.family}/GF({self.s})" + ("" if self.kind == "OneF" else f"<GF({self.t})")

    def describe(self) -> dict:
        d = {"kind": self.kind, "p": self.F.p, "k_F": self.F.k, "modulus_F": list(self.F.modulus)}
        if self.kind == "ThreeF":
            d["k_E"] = self.J.k
        d["modulus_E"] = list(self.J.modulus)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.describe(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def __repr__(self) -> str:
        return f"HexSystem({self.label})"


def make_system(kind: str, p: int, k_F: int = 1, k_E: int | None = None,
                modulus_F=None, modulus_E=None) -> HexSystem:
    F = make_field(p, k_F, None if modulus_F is None else tuple(modulus_F))
    if kind == "OneF":
        return HexSystem(kind, F)
    if kind == "ThreeF":
        k_E = 3 * k_F if k_E is None else k_E
        if k_E != 3 * k_F:
            raise BadExtensionDegree(f"k_E={k_E} is not 3*k_F")
        E = make_field(p, k_E, None if modulus_E is None else tuple(modulus_E))
        return HexSystem(kind, F, E)
    return HexSystem(kind, F)


def system_from_dict(d: dict) -> HexSystem:
    return make_system(d["kind"], int(d["p"]), int(d.get("k_F", 1)), d.get("k_E"),
                       d.get("modulus_F"), d.get("modulus_E") if d["kind"] == "ThreeF" else None)


# -- identity suite ---------------------------------------------------------

@dataclass
class ClauseResult:
    id: str
    status: str
    witness: dict | None = None

    def to_dict(self) -> dict:
        d = {"id": self.id, "status": self.status}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


IDENTITY_CLAUSES = (
    "N1", "T1", "scale_sharp", "scale_norm", "cross_diag", "sharp_additive",
    "trilinear_symmetry", "trace_adjoint", "one_cross", "norm_sharp", "sharp_sharp",
)


def _iter_cases(S: HexSystem, arity: int, limit: int | None):
    """All arity-tuples of J-codes, truncated to ``limit`` when given."""
    q = S.t
    total = q**arity
    n = total if limit is None else min(total, limit)
    for idx in range(n):
        out = []
        x = idx
        for _ in range(arity):
            out.append(x % q)
            x //= q
        yield tuple(out)


def identity_suite(S: HexSystem, limit: int | None = None) -> list[ClauseResult]:
    """Check the defining identities of a hexagonal system exhaustively.

    Three-variable clauses run over all of J^3 unless ``limit`` caps the
    number of tuples.  Returns one ClauseResult per clause, failing clauses
    carrying the first counterexample.
    """
    J, F = S.J, S.F
    add, mul, neg = J.add, J.mul, J.neg
    sharp, norm, tr1, emb = S.sharp, S.norm, S.tr1, S.emb
    fmt = J.format
    results = []

    def run(cid, arity, pred, build_witness):
        for case in _iter_cases(S, arity, limit):
            if not pred(*case):
                results.append(ClauseResult(cid, "fail", build_witness(*case)))
                return
        results.append(ClauseResult(cid, "pass"))

    def j(*xs):
        return {f"x{i}": fmt(x) for i, x in enumerate(xs)}

    results.append(ClauseResult("N1", "pass" if norm[1] == 1 else "fail"))
    results.append(ClauseResult("T1", "pass" if tr1[1] == F.from_int(3) else "fail"))

    def scale_sharp(a: int) -> bool:
        for t in range(F.order):
            ta = S.scal(t, a)
            if sharp[ta] != S.scal(F.mul[t][t], sharp[a]):
                return False
        return True

    def scale_norm(a: int) -> bool:
        for t in range(F.order):
            if norm[S.scal(t, a)] != F.mul[F.mul[t][t]][F.mul[t][norm[a]]]:
                return False
        return True

    run("scale_sharp", 1, scale_sharp, j)
    run("scale_norm", 1, scale_norm, j)
    two = J.from_int(2)
    run("cross_diag", 1, lambda a: S.cross_c(a, a) == mul[two][sharp[a]], j)
    run("sharp_additive", 2,
        lambda a, b: sharp[add[a][b]] == add[add[sharp[a]][S.cross_c(a, b)]][sharp[b]], j)
    run("trilinear_symmetry", 3,
        lambda a, b, c: S.tr2(S.cross_c(a, b), c) == S.tr2(a, S.cross_c(b, c)), j)
    three = F.from_int(3)
    run("trace_adjoint", 1, lambda a: S.tr2(a, sharp[a]) == F.mul[three][norm[a]], j)
    run("one_cross", 1, lambda a: S.cross_c(1, a) == add[emb[tr1[a]]][neg[a]], j)
    run("norm_sharp", 1, lambda a: norm[sharp[a]] == F.mul[norm[a]][norm[a]], j)
    run("sharp_sharp", 1, lambda a: sharp[sharp[a]] == S.scal(norm[a], a), j)
    order = {c: i for i, c in enumerate(IDENTITY_CLAUSES)}
    results.sort(key=lambda r: order[r.id])
    return results


def extension_checks(S: HexSystem) -> list[ClauseResult]:
    """For ThreeF: T and N coincide with the relative trace and norm of E/F."""
    out = []
    if S.kind != "ThreeF":
        return out
    from .exactfield import relative_norm, relative_trace
    J = S.J
    for cid, fn, tab in (("relative_trace", relative_trace, S.tr1), ("relative_norm", relative_norm, S.norm)):
        bad = None
        for a in range(J.order):
            if fn(FieldElement(J, a), S.s).value != S.emb[tab[a]]:
                bad = {"x0": J.format(a)}
                break
        out.append(ClauseResult(cid, "pass" if bad is None else "fail", bad))
    return out


# -- automorphisms h with T(a) = a + a^h + a^h^2 -------------------------------

def automorphism_order(S: HexSystem, name: str) -> int:
    tab = S.automorphisms()[name]
    cur = list(tab)
    n = 1
    while cur != list(range(S.t)):
        cur = [tab[x] for x in cur]
        n += 1
    return n


def automorphism_checks(S: HexSystem, name: str) -> list[ClauseResult]:
    """h commutes with #, fixes F pointwise, preserves N and T, and is additive."""
    h = S.automorphisms()[name]
    J = S.J
    out = []

    def clause(cid, pred, arity=1):
        for case in _iter_cases(S, arity, None):
            if not pred(*case):
                out.append(ClauseResult(cid, "fail", {f"x{i}": J.format(c) for i, c in enumerate(case)}))
                return
        out.append(ClauseResult(cid, "pass"))

    clause("commutes_with_sharp", lambda a: h[S.sharp[a]] == S.sharp[h[a]])
    clause("fixes_F", lambda a: a not in S.res or h[a] == a)
    clause("preserves_norm", lambda a: S.norm[h[a]] == S.norm[a])
    clause("additive", lambda a, b: h[J.add[a][b]] == J.add[h[a]][h[b]], 2)
    clause("preserves_trace", lambda a, b: S.tr2(h[a], h[b]) == S.tr2(a, b), 2)
    out.append(ClauseResult("order_divides_3", "pass" if 3 % automorphism_order(S, name) == 0 else "fail"))
    return out


def is_admissible(S: HexSystem, name: str) -> bool:
    """order(h) in {1, 3}, T(a) = a + a^h + a^h^2 and T(a#) = T(a, a^h) for all a."""
    if automorphism_order(S, name) not in (1, 3):
        return False
    h = S.automorphisms()[name]
    J = S.J
    for a in range(S.t):
        if S.emb[S.tr1[a]] != J.add[J.add[a][h[a]]][h[h[a]]]:
            return False
        if S.tr1[S.sharp[a]] != S.tr2(a, h[a]):
            return False
    return True


def obstruction_solutions(S: HexSystem, name: str) -> list[int]:
    """All nonzero z in J (as codes) with z = 1 - (z^-1)^h."""
    h = S.automorphisms()[name]
    J = S.J
    return [z for z in range(1, S.t) if z == J.sub(1, h[J.inv[z]])]


def ovoid_obstruction_witness(S: HexSystem, name: str) -> FieldElement | None:
    """The least solution of z = 1 - z^(-h), or None when there is none."""
    sols = obstruction_solutions(S, name)
    return FieldElement(S.J, sols[0]) if sols else None


def trace_zero_witnesses(S: HexSystem, name: str) -> list[int]:
    """z0 = -b^(h^2) b^-1 for every b != 0 with T(b) = 0."""
    h = S.automorphisms()[name]
    J = S.J
    return [J.neg[J.mul[h[h[b]]][J.inv[b]]] for b in range(1, S.t) if S.tr1[b] == 0]
