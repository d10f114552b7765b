"""Smoke test for the borcherds extension module.

Build and install first:
    cd crates/py && maturin build --release -o dist && pip install dist/*.whl
"""

from fractions import Fraction

import borcherds


def main():
    e8 = borcherds.Lattice.e8()
    assert e8.signature == (8, 0)
    assert borcherds.eis_coefficient(e8, 1) == 240
    assert borcherds.eis_coefficient(e8, Fraction(2)) == 2160
    assert borcherds.rep_count(e8, 1, 0, 8) == 1966080

    a2 = borcherds.Lattice([[2, -1], [-1, 2]])
    assert a2.disc_order() == 3 and a2.q(1) == Fraction(1, 3)
    w = borcherds.weil(a2)
    assert w["relations_ok"] and w["invariants"] == []

    fx = borcherds.Lattice.fixture_12_2()
    assert fx.det == 16 and fx.level == 4
    e1 = borcherds.eis_coefficient(fx, 1)
    r = borcherds.prescribe(fx, [(1, 0), (2, 0), (3, 0)])
    assert Fraction(r["const_term"]) == -e1 != 0
    assert borcherds.constant_term(fx, r) == -e1

    h = borcherds.build_h(fx, 1, 2)
    assert all(Fraction(c["c"]) >= 0 for c in h["coeffs"])

    pp = {"sign": "-", "principal_part": [{"m": "1", "mu": [0, 0, 0, 0], "c": "-3"}], "const_term": "0"}
    d = borcherds.decompose(fx, pp)
    assert d["c"] == 61
    assert all(Fraction(e["c"]) >= 0 for e in d["f1"]["principal_part"])

    v = borcherds.vanish_on(fx, 2)
    assert any(e["m"] == "2/1" and Fraction(e["c"]) > 0 for e in v["principal_part"])

    try:
        borcherds.Lattice([[1]])
    except borcherds.PreconditionError:
        pass
    else:
        raise AssertionError("odd lattice accepted")

    report = borcherds.battery([1, 8])
    assert report["all_passed"], report
    print("smoke test ok")


if __name__ == "__main__":
    main()
