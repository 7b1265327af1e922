"""Opposition profiles, domesticity classes and the `theorem1` clause suite."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .geometry import LINE, POINT, FixedStructure, Hexagon
from .groupaction import (
    CapExceeded,
    Collineation,
    GroupAction,
    GroupListing,
    are_conjugate,
    closure,
    conjugacy_classes,
    default_generators,
    random_walk_sampler,
)
from .stabchain import StabChain
from .hexsystem import ClauseResult, is_admissible, ovoid_obstruction_witness

DIAGRAM = {
    "identity": "empty",
    "point_domestic": "G2_1_1",
    "line_domestic": "G2_1_2",
    "exceptional_domestic": "G2_full",
    "not_domestic": "G2_full",
}
DEFAULT_SEEDS = (1, 2, 3)


class TrichotomyViolation(RuntimeError):
    pass


class BudgetExhausted(RuntimeError):
    pass


@dataclass
class Profile:
    points: int
    lines: int
    chambers: int


@dataclass
class DomesticityReport:
    word: str
    order: int
    points_to_opposite: int
    lines_to_opposite: int
    chambers_to_opposite: int
    classification: str
    opposition_diagram: str
    fixes_chamber: bool
    fixed: FixedStructure

    def to_dict(self, hexagon: Hexagon | None = None) -> dict:
        return {
            "word": self.word,
            "order": self.order,
            "points_to_opposite": self.points_to_opposite,
            "lines_to_opposite": self.lines_to_opposite,
            "chambers_to_opposite": self.chambers_to_opposite,
            "classification": self.classification,
            "opposition_diagram": self.opposition_diagram,
            "fixes_chamber": self.fixes_chamber,
            "fixed": self.fixed.to_dict(hexagon),
        }


def opposition_profile(H: Hexagon, c: Collineation) -> Profile:
    pp, lp = c.point_perm, c.line_perm
    op = H.opp_points[np.arange(H.n_points), pp]
    ol = H.opp_lines[np.arange(H.n_lines), lp]
    ch = op[H.chamber_points] & ol[H.chamber_lines]
    return Profile(int(op.sum()), int(ol.sum()), int(ch.sum()))


def classify_counts(is_identity: bool, pts: int, lns: int, chs: int) -> str:
    if is_identity:
        return "identity"
    if pts == 0 and lns == 0:
        raise TrichotomyViolation("nontrivial collineation maps no element to an opposite")
    if pts == 0:
        return "point_domestic"
    if lns == 0:
        return "line_domestic"
    if chs == 0:
        return "exceptional_domestic"
    return "not_domestic"


_ALLOWED = {
    "point_domestic": {"ball_at_line", "full_subhexagon", "ovoid"},
    "line_domestic": {"ball_at_point", "ideal_subhexagon", "spread"},
}


def classify_collineation(H: Hexagon, c: Collineation) -> DomesticityReport:
    prof = opposition_profile(H, c)
    cls = classify_counts(c.is_identity, prof.points, prof.lines, prof.chambers)
    fp, fl = c.fixed_points(), c.fixed_lines()
    fixed = H.classify_substructure(fp, fl)
    if cls in _ALLOWED:
        ok = fixed.structure in _ALLOWED[cls] and (not fixed.structure.endswith("subhexagon") or fixed.large)
        if not ok:
            raise TrichotomyViolation(f"{cls} collineation with fixed structure {fixed.structure}")
    fpm = np.zeros(H.n_points, dtype=bool)
    fpm[fp] = True
    flm = np.zeros(H.n_lines, dtype=bool)
    flm[fl] = True
    fixes_chamber = bool((fpm[H.chamber_points] & flm[H.chamber_lines]).any())
    return DomesticityReport(c.word, c.order(), prof.points, prof.lines, prof.chambers,
                             cls, DIAGRAM[cls], fixes_chamber, fixed)


def perm_profiles(H: Hexagon, P: np.ndarray, ga: GroupAction) -> dict[str, np.ndarray]:
    """Vectorised opposition counts for rows of point permutations."""
    L = H.line_of[P[:, ga._lp1], P[:, ga._lp2]]
    op = H.opp_points[np.arange(H.n_points)[None, :], P]
    ol = H.opp_lines[np.arange(H.n_lines)[None, :], L]
    ch = op[:, H.chamber_points] & ol[:, H.chamber_lines]
    ident = (P == np.arange(H.n_points)[None, :]).all(axis=1)
    return {"points": op.sum(axis=1), "lines": ol.sum(axis=1), "chambers": ch.sum(axis=1),
            "identity": ident, "line_perms": L}


def group_profiles(H: Hexagon, G: GroupListing, ga: GroupAction) -> dict[str, np.ndarray]:
    return perm_profiles(H, G.perms, ga)


def _exceptional_mask(prof) -> np.ndarray:
    return (~prof["identity"]) & (prof["points"] > 0) & (prof["lines"] > 0) & (prof["chambers"] == 0)


def perm_orders(P: np.ndarray, max_order: int = 64) -> np.ndarray:
    """Element orders for rows of P (each at most ``max_order``)."""
    m, n = P.shape
    ident = np.arange(n)[None, :]
    orders = np.zeros(m, dtype=np.int64)
    cur = P.copy()
    rows = np.arange(m)[:, None]
    for k in range(1, max_order + 1):
        done = (orders == 0) & (cur == ident).all(axis=1)
        orders[done] = k
        if (orders > 0).all():
            break
        cur = P[rows, cur]  # P o cur
    return orders


@dataclass
class ExceptionalFindings:
    mode: str
    found: bool
    count: int = 0
    orders: list = field(default_factory=list)
    n_classes: int | None = None
    group_order: int | None = None
    seed: int | None = None
    step: int | None = None
    budget: int | None = None
    order4_seen: int | None = None
    element: Collineation | None = None
    report: DomesticityReport | None = None

    def to_dict(self, H: Hexagon | None = None) -> dict:
        d = {"mode": self.mode, "found": self.found, "count": self.count, "orders": self.orders,
             "conjugacy_classes": self.n_classes, "group_order": self.group_order,
             "seed": self.seed, "step": self.step, "budget": self.budget, "order4_seen": self.order4_seen}
        if self.report is not None:
            d["report"] = self.report.to_dict(H)
        return {k: v for k, v in d.items() if v is not None}


def search_exceptional(H: Hexagon, mode: str = "random", budget: int = 10**6, seed: int = 1,
                       ga: GroupAction | None = None, cap: int = 200_000, stream_cap: int = 10**7,
                       filter_order4: bool = True) -> ExceptionalFindings:
    ga = ga or GroupAction(H)
    if mode == "exhaustive":
        chain = StabChain([g.point_perm for g in default_generators(ga)])
        order = chain.order()
        if order <= cap:
            G = GroupListing(np.concatenate(list(chain.blocks())))
            G.perms = G.perms[np.lexsort(G.perms.T[::-1])]
            prof = group_profiles(H, G, ga)
            idx = np.nonzero(_exceptional_mask(prof))[0]
            if len(idx) == 0:
                return ExceptionalFindings("exhaustive", False, 0, [], 0, order)
            orders = perm_orders(G.perms[idx])
            classes = conjugacy_classes(G.perms[idx], G)
            first = ga.from_point_perm(G.perms[idx[0]].copy(), "exhaustive[0]")
            return ExceptionalFindings("exhaustive", True, len(idx), sorted(set(orders.tolist())),
                                       len(classes), order, element=first,
                                       report=classify_collineation(H, first))
        if order > stream_cap:
            raise CapExceeded(f"group order {order} exceeds the streaming cap {stream_cap}")
        # too large to list: stream every element through the scan, classes not computed
        hits = []
        count = 0
        for block in chain.blocks():
            m = _exceptional_mask(perm_profiles(H, block, ga))
            if m.any():
                count += int(m.sum())
                hits.extend(block[m][: max(0, 64 - len(hits))])
        if not count:
            return ExceptionalFindings("exhaustive", False, 0, [], None, order)
        orders = perm_orders(np.array(hits))
        first = ga.from_point_perm(np.array(hits[0]), "exhaustive[0]")
        return ExceptionalFindings("exhaustive", True, count, sorted(set(orders.tolist())), None, order,
                                   element=first, report=classify_collineation(H, first))
    if mode != "random":
        raise ValueError(f"unknown search mode {mode!r}")
    gens = default_generators(ga)
    gp = np.ascontiguousarray(np.stack([g.point_perm for g in gens]).astype(np.int32))
    rng = np.random.default_rng(seed)
    burn_in = 50
    choices = rng.integers(0, len(gens), size=budget + burn_in).astype(np.int32)
    step, perm, n4 = kernels.walk_search(
        gp, choices, np.arange(H.n_points, dtype=np.int32), burn_in, filter_order4,
        H.opp_points.view(np.uint8), H.opp_lines.view(np.uint8),
        ga._lp1.astype(np.int32), ga._lp2.astype(np.int32), H.line_of,
        H.chamber_points.astype(np.int32), H.chamber_lines.astype(np.int32))
    if step < 0:
        return ExceptionalFindings("random", False, seed=seed, budget=budget, order4_seen=int(n4))
    c = ga.from_point_perm(np.asarray(perm, dtype=np.int32), f"walk(seed={seed},step={step})")
    rep = classify_collineation(H, c)
    if rep.classification != "exceptional_domestic":
        raise TrichotomyViolation("kernel reported a hit that does not reclassify as exceptional")
    return ExceptionalFindings("random", True, 1, [rep.order], seed=seed, step=int(step),
                               budget=budget, order4_seen=int(n4), element=c, report=rep)


# -- theorem1 suite: the classification of domestic collineations, clause by clause --

def _theta_word(S) -> str:
    return "h:sigma;x1(1);s1" if S.kind == "ThreeF" else "x1(1);s1"


def theorem1_suite(H: Hexagon, ga: GroupAction | None = None, *, exceptional_budget: int = 0,
                   seeds=DEFAULT_SEEDS, regularity_sample: int | None = None,
                   closure_cap: int = 20_000) -> dict:
    """Run the applicable clauses; returns {clauses, hexagon, timings}."""
    ga = ga or GroupAction(H)
    S = H.system
    clauses: list[ClauseResult] = []
    timings: dict[str, float] = {}
    fam = S.family

    def timed(name, fn):
        t0 = time.perf_counter()
        try:
            fn()
        finally:
            timings[name] = round(time.perf_counter() - t0, 4)

    def add(cid, ok, witness=None, status=None):
        clauses.append(ClauseResult(cid, status or ("pass" if ok else "fail"), witness))

    reports = {}

    def clause_a():
        r = classify_collineation(H, ga.realize("x4(1)"))
        reports["x4"] = r
        add("a_long_root_elation", r.classification == "line_domestic" and r.fixed.structure == "ball_at_point",
            None if r.classification == "line_domestic" else {"classification": r.classification})

    def clause_b():
        r = classify_collineation(H, ga.realize("x3(1)"))
        reports["x3"] = r
        if fam == "H4":
            ok = r.classification == "point_domestic" and r.fixed.structure == "ball_at_line"
        else:
            ok = r.classification == "not_domestic"
        add("b_short_root_elation", ok, None if ok else {"classification": r.classification,
                                                          "structure": r.fixed.structure})

    theta_aut = "sigma" if S.kind == "ThreeF" else "id"

    def clause_c():
        r = classify_collineation(H, ga.realize(_theta_word(S)))
        reports["theta"] = r
        wit = ovoid_obstruction_witness(S, theta_aut)
        if fam == "H4":
            expect = {"ball_at_line"}
        elif fam == "H2-3D4":
            expect = {"full_subhexagon"}
        else:
            expect = {"ovoid"} if wit is None else {"full_subhexagon"}
        ok = (r.classification == "point_domestic" and r.order == 3 and r.fixed.structure in expect
              and (r.fixed.structure != "full_subhexagon" or r.fixed.large))
        branch = r.fixed.structure
        if fam == "H1":
            branch = "2b_irreducible_ovoid" if wit is None else "2b_reducible_large_full_subhexagon"
        elif fam == "H4":
            branch = "2a_ball_at_line"
        else:
            branch = "2c_large_full_subhexagon"
        add("c_theta_point_domestic", ok, {"branch": branch, "structure": r.fixed.structure,
                                           "order": r.order, "points": r.fixed.n_points,
                                           "lines": r.fixed.n_lines})

    def clause_d():
        r = reports["theta"]
        if r.fixed.structure == "ovoid":
            add("d_chamber_fixing", not r.fixes_chamber, {"fixes_chamber": r.fixes_chamber})
        else:
            add("d_chamber_fixing", True, {"fixes_chamber": r.fixes_chamber})

    def clause_e():
        r = reports["theta"]
        wit = ovoid_obstruction_witness(S, theta_aut)
        ok = is_admissible(S, theta_aut) and ((wit is None) == (r.fixed.structure == "ovoid"))
        add("e_obstruction_consistency", ok, {"witness": None if wit is None else str(wit)})

    def clause_f():
        sample = regularity_sample
        if sample is None and H.n_lines > 1000:
            sample = 100_000
        got = {
            "lines_2": H.is_distance_i_regular(LINE, 2, sample),
            "lines_3": H.is_distance_i_regular(LINE, 3, sample),
            "points_2": H.is_distance_i_regular(POINT, 2, sample if H.n_points > 1000 else None),
        }
        if fam == "H4":
            got["points_3"] = H.is_distance_i_regular(POINT, 3, sample if H.n_points > 1000 else None)
            ok = all(got.values())
        else:
            ok = got["lines_2"] and got["lines_3"] and not got["points_2"]
        add("f_regularity", ok, got)

    def clause_g():
        r = reports["theta"]
        if r.fixed.structure != "ovoid":
            add("g_ovoid_imaginary_lines", True, status="skip")
            return
        c = ga.realize(_theta_word(S))
        ok, bad = H.closed_under_imaginary_lines(c.fixed_points())
        add("g_ovoid_imaginary_lines", ok, None if ok else {"pair": list(bad)})

    def clause_h():
        if fam != "H2-3D4":
            add("h_large_full_subhexagon", True, status="skip")
            return
        f = reports["theta"].fixed
        sub_counts = (1 + S.s) * (1 + S.s * S.s + S.s**4)
        ok = f.structure == "full_subhexagon" and f.large and f.thick and f.n_points == sub_counts \
            and f.n_lines == sub_counts
        add("h_large_full_subhexagon", ok, {"points": f.n_points, "lines": f.n_lines, "thick": f.thick})

    def clause_closure():
        # unique class of line-domestic elements, and order 3 for point-domestic ones
        try:
            G = closure(default_generators(ga), cap=closure_cap)
        except CapExceeded:
            add("1_line_domestic_class", True, {"reason": f"group exceeds cap {closure_cap}"}, status="skip")
            return
        prof = group_profiles(H, G, ga)
        nontriv = ~prof["identity"]
        ld = np.nonzero(nontriv & (prof["lines"] == 0))[0]
        pd = np.nonzero(nontriv & (prof["points"] == 0))[0]
        x4 = ga.realize("x4(1)")
        conj = set(r.tobytes() for r in np.unique(
            np.take_along_axis(G.perms, x4.point_perm[G.inverses()], axis=1), axis=0))
        ok_ld = len(ld) > 0 and all(G.perms[i].tobytes() in conj for i in ld)
        balls = True
        for i in ld:
            c = Collineation(G.perms[i], prof["line_perms"][i])
            if H.classify_substructure(c.fixed_points(), c.fixed_lines()).structure != "ball_at_point":
                balls = False
                break
        add("1_line_domestic_class", ok_ld and balls,
            {"group_order": len(G), "line_domestic": len(ld), "x4_class_size": len(conj)})
        orders = perm_orders(G.perms[pd]) if len(pd) else np.array([], dtype=int)
        add("2_point_domestic_order3", bool(len(pd)) and bool((orders == 3).all()),
            {"point_domestic": len(pd), "orders": sorted(set(orders.tolist()))})

    def clause_theta_conjugacy():
        if fam != "H4":
            return
        th = ga.realize(_theta_word(S))
        x3 = ga.realize("x3(1)")
        sampler = random_walk_sampler(ga, seed=7, steps=20_000)
        res = are_conjugate(th, x3, sampler=sampler, budget=20_000)
        add("2a_theta_conjugate_x3_sampled", True,
            {"conjugate": "unknown" if res is None else bool(res)}, status="info")

    def clause_exceptional():
        if (S.s, S.t) == (2, 2):
            f = search_exceptional(H, "exhaustive", ga=ga, cap=closure_cap)
            add("3_exceptional_class", f.found and f.orders == [4] and f.n_classes == 1,
                {"count": f.count, "orders": f.orders, "classes": f.n_classes})
        elif exceptional_budget and (S.s, S.t) in ((2, 8), (8, 2)):
            hits = []
            for sd in seeds:
                f = search_exceptional(H, "random", budget=exceptional_budget, seed=sd, ga=ga)
                hits.append({"seed": sd, "found": f.found, "step": f.step,
                             "order": f.orders[0] if f.found else None})
            ok = any(h["found"] for h in hits) and all(h["order"] in (None, 4) for h in hits)
            add("3_exceptional_random", ok, {"runs": hits})

    for name, fn in (("a", clause_a), ("b", clause_b), ("c", clause_c), ("d", clause_d), ("e", clause_e),
                     ("f", clause_f), ("g", clause_g), ("h", clause_h), ("closure", clause_closure),
                     ("theta_conjugacy", clause_theta_conjugacy), ("exceptional", clause_exceptional)):
        timed(name, fn)
    return {"clauses": [c.to_dict() for c in clauses], "hexagon": S.describe(), "timings": timings}
