from __future__ import annotations

import numpy as np
import pytest

from hexforge.domesticity import (
    DIAGRAM,
    classify_collineation,
    classify_counts,
    group_profiles,
    opposition_profile,
    perm_orders,
    perm_profiles,
    search_exceptional,
    theorem1_suite,
)
from hexforge.groupaction import closure, default_generators, random_walk_sampler

from conftest import action, hexagon


@pytest.fixture(scope="module")
def G12(ga12):
    return closure(default_generators(ga12), cap=20_000)


def test_profiles(h12, ga12):
    p = opposition_profile(h12, ga12.identity())
    assert (p.points, p.lines, p.chambers) == (0, 0, 0)
    p = opposition_profile(h12, ga12.realize("x4(1)"))
    assert p.lines == 0 and p.points > 0
    p = opposition_profile(h12, ga12.realize("x1(1);s1"))
    assert p.points == 0 and p.lines > 0


def test_classification_examples(h12, ga12, h22, ga22):
    r = classify_collineation(h12, ga12.realize("x4(1)"))
    assert (r.classification, r.fixed.structure, r.opposition_diagram) == ("line_domestic", "ball_at_point", "G2_1_2")
    assert r.fixed.center.coords == ()
    r = classify_collineation(h12, ga12.realize("x1(1);s1"))
    assert (r.classification, r.order, r.fixed.structure, r.fixed.n_points) == ("point_domestic", 3, "ovoid", 9)
    assert r.opposition_diagram == "G2_1_1" and not r.fixes_chamber
    r = classify_collineation(h22, ga22.realize("h:sigma;x1(1);s1"))
    assert (r.classification, r.order, r.fixed.structure, r.fixed.n_points) == \
        ("point_domestic", 3, "full_subhexagon", 63)
    r = classify_collineation(h12, ga12.identity())
    assert r.classification == "identity" and r.opposition_diagram == "empty"
    d = r.to_dict(h12)
    assert set(d) >= {"word", "order", "classification", "opposition_diagram", "fixes_chamber", "fixed"}


def test_classify_counts():
    assert classify_counts(True, 0, 0, 0) == "identity"
    assert classify_counts(False, 0, 5, 0) == "point_domestic"
    assert classify_counts(False, 5, 0, 0) == "line_domestic"
    assert classify_counts(False, 5, 5, 0) == "exceptional_domestic"
    assert classify_counts(False, 5, 5, 1) == "not_domestic"
    assert set(DIAGRAM) == {"identity", "point_domestic", "line_domestic", "exceptional_domestic", "not_domestic"}


def test_whole_group_trichotomy(h12, ga12, G12):
    prof = group_profiles(h12, G12, ga12)
    nontriv = ~prof["identity"]
    assert prof["identity"].sum() == 1
    pd = nontriv & (prof["points"] == 0)
    ld = nontriv & (prof["lines"] == 0)
    assert not (pd & ld).any()
    # each chamber mapped to an opposite has both its point and its line mapped to opposites
    s, t = h12.system.s, h12.system.t
    assert (prof["chambers"] <= np.minimum(prof["points"] * (t + 1), prof["lines"] * (s + 1))).all()
    assert (prof["chambers"][(prof["points"] == 0) | (prof["lines"] == 0)] == 0).all()
    assert (perm_orders(G12.perms[pd]) == 3).all()
    assert pd.sum() == 56 and ld.sum() == 63


def test_vectorised_profiles_match_single(h12, ga12, G12):
    rows = G12.perms[::997]
    prof = perm_profiles(h12, rows, ga12)
    for k, row in enumerate(rows):
        p = opposition_profile(h12, ga12.from_point_perm(row))
        assert (p.points, p.lines, p.chambers) == (prof["points"][k], prof["lines"][k], prof["chambers"][k])


def test_point_domestic_on_triality_never_fix_ovoid(h22, ga22):
    rows = np.array([g.point_perm for g in random_walk_sampler(ga22, seed=4, steps=3000)])
    prof = perm_profiles(h22, rows, ga22)
    for k in np.nonzero(~prof["identity"] & (prof["points"] == 0))[0]:
        r = classify_collineation(h22, ga22.from_point_perm(rows[k]))
        assert r.fixed.structure != "ovoid"
    th = ga22.realize("h:sigma;x1(1);s1")
    assert classify_collineation(h22, th).fixed.structure != "ovoid"


def test_exhaustive_small(h12, ga12):
    f = search_exceptional(h12, "exhaustive", ga=ga12)
    assert f.found and f.count == 378 and f.orders == [4] and f.n_classes == 1
    assert f.report.classification == "exceptional_domestic" and f.report.opposition_diagram == "G2_full"
    d = f.to_dict(h12)
    assert d["group_order"] == 12096


def test_random_search_and_budget(h12, ga12, h22, ga22):
    f = search_exceptional(h12, "random", budget=20_000, seed=1, ga=ga12)
    assert f.found and f.orders == [4] and f.seed == 1 and f.step >= 50
    again = search_exceptional(h12, "random", budget=20_000, seed=1, ga=ga12)
    assert again.step == f.step
    u = search_exceptional(h12, "random", budget=20_000, seed=1, ga=ga12, filter_order4=False)
    assert u.found and u.step <= f.step
    miss = search_exceptional(h22, "random", budget=1, seed=1, ga=ga22)
    assert not miss.found and miss.budget == 1
    with pytest.raises(ValueError):
        search_exceptional(h12, "sideways", ga=ga12)


@pytest.mark.slow
def test_exhaustive_g2_3_has_no_exceptional(h43, ga43):
    f = search_exceptional(h43, "exhaustive", ga=ga43)
    assert f.group_order == 4245696 and not f.found


@pytest.mark.parametrize("name,branch", [("H1/2", "2b_irreducible_ovoid"),
                                         ("H1/4", "2b_reducible_large_full_subhexagon"),
                                         ("H4/3", "2a_ball_at_line")])
def test_theorem1_suite(name, branch):
    out = theorem1_suite(hexagon(name), action(name))
    clauses = {c["id"]: c for c in out["clauses"]}
    assert not [c for c in out["clauses"] if c["status"] == "fail"], out["clauses"]
    assert clauses["c_theta_point_domestic"]["witness"]["branch"] == branch
    assert out["hexagon"] == hexagon(name).system.describe()
    if name == "H1/2":
        assert clauses["3_exceptional_class"]["status"] == "pass"
        assert clauses["g_ovoid_imaginary_lines"]["status"] == "pass"
    if name == "H1/4":
        assert clauses["d_chamber_fixing"]["witness"]["fixes_chamber"]
    if name == "H4/3":
        assert clauses["2a_theta_conjugate_x3_sampled"]["status"] == "info"


def test_theorem1_suite_triality(h22, ga22):
    out = theorem1_suite(h22, ga22, exceptional_budget=30_000, seeds=(3,))
    clauses = {c["id"]: c for c in out["clauses"]}
    assert not [c for c in out["clauses"] if c["status"] == "fail"]
    assert clauses["h_large_full_subhexagon"]["status"] == "pass"
    assert clauses["3_exceptional_random"]["witness"]["runs"][0]["step"] == 2169
