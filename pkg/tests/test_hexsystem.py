from __future__ import annotations

import pytest

from hexforge.exactfield import ZeroInverse, make_field, relative_norm, relative_trace
from hexforge.hexsystem import (
    IDENTITY_CLAUSES,
    BadExtensionDegree,
    HexSystem,
    UnsupportedKind,
    automorphism_checks,
    extension_checks,
    identity_suite,
    is_admissible,
    make_system,
    obstruction_solutions,
    ovoid_obstruction_witness,
    system_from_dict,
    trace_zero_witnesses,
)


@pytest.fixture(scope="module")
def h5():
    return make_system("OneF", 5)


@pytest.fixture(scope="module")
def t8():
    return make_system("ThreeF", 2)


def test_classes_and_parameters(t8):
    S = make_system("OneF", 2)
    assert (S.family, S.s, S.t) == ("H1", 2, 2)
    assert (t8.family, t8.s, t8.t) == ("H2-3D4", 2, 8)
    assert make_system("OneF", 3).family == "H4"


def test_construction_errors():
    with pytest.raises(BadExtensionDegree):
        make_system("ThreeF", 2, 1, 2)
    with pytest.raises(BadExtensionDegree):
        HexSystem("ThreeF", make_field(2, 1), make_field(2, 2))
    with pytest.raises(UnsupportedKind, match="Wedderburn"):
        make_system("27/F", 2)
    with pytest.raises(UnsupportedKind):
        make_system("Bogus", 2)


def test_onef_gf5_examples(h5):
    assert h5.adjoint(2).value == 4
    assert h5.norm_of(2).value == 3
    assert h5.inverse(2).value == 3
    assert h5.inverse(1).value == 1
    assert h5.trace(1).value == 3


def test_threef_gf8_examples(t8):
    J = t8.J
    g = J.g
    assert t8.adjoint(g) == g**6
    assert all(t8.norm_of(a).value == 1 for a in J.elements() if a)
    assert t8.norm_of(0).value == 0
    assert t8.trace(g).value == 0
    assert t8.cross(g, 1) == g
    assert t8.inverse(g) == g**6
    assert t8.trace(1).value == 1  # 3 = 1 in characteristic 2
    with pytest.raises(ZeroInverse):
        t8.inverse(0)


def test_char3_trace_vanishes():
    S = make_system("OneF", 3, 2)
    assert all(S.tr2(a, b) == 0 for a in range(S.t) for b in range(S.t))


@pytest.mark.parametrize("args", [("OneF", 2), ("OneF", 3), ("OneF", 2, 2), ("OneF", 5), ("OneF", 7),
                                  ("ThreeF", 2), ("ThreeF", 3)])
def test_identity_suite_passes(args):
    S = make_system(*args)
    res = identity_suite(S)
    assert [r.id for r in res] == list(IDENTITY_CLAUSES)
    assert all(r.status == "pass" for r in res), [r.to_dict() for r in res if r.status != "pass"]
    assert all(r.status == "pass" for r in extension_checks(S))


def test_identity_suite_reports_counterexample():
    S = make_system("OneF", 5)
    S.sharp = list(S.sharp)
    S.sharp[2] = 1  # break the adjoint
    bad = [r for r in identity_suite(S) if r.status == "fail"]
    assert bad and bad[0].witness is not None


def test_threef_trace_norm_match_field(t8):
    J = t8.J
    for a in J.elements():
        assert t8.embed(t8.trace(a)) == relative_trace(a, 2)
        assert t8.embed(t8.norm_of(a)) == relative_norm(a, 2)


@pytest.mark.parametrize("name", ["id", "sigma", "sigma2"])
def test_automorphisms(t8, name):
    assert all(r.status == "pass" for r in automorphism_checks(t8, name))


def test_admissibility(t8):
    assert is_admissible(make_system("OneF", 2), "id")
    assert is_admissible(t8, "sigma")
    assert is_admissible(t8, "sigma2")
    assert not is_admissible(t8, "id")


def test_admissible_preserves_trace(t8):
    h = t8.automorphisms()["sigma"]
    assert all(t8.tr1[h[a]] == t8.tr1[a] for a in range(t8.t))


def test_obstruction_witnesses(t8):
    assert ovoid_obstruction_witness(make_system("OneF", 2), "id") is None
    S4 = make_system("OneF", 2, 2)
    assert ovoid_obstruction_witness(S4, "id") == S4.J.g
    J = t8.J
    sols = obstruction_solutions(t8, "sigma")
    assert J.add[J.gen][1] in sols
    assert ovoid_obstruction_witness(t8, "sigma").value == J.add[J.gen][1]
    assert set(trace_zero_witnesses(t8, "sigma")) <= set(sols)


def test_descriptor_roundtrip(t8):
    d = t8.describe()
    again = system_from_dict(d)
    assert again.describe() == d and again.digest() == t8.digest()
    assert make_system("OneF", 2).digest() != t8.digest()
