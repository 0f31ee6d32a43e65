"""Smoke test for the pygardinglab extension.

Build and install first:

    pip install --no-build-isolation ./crates/python
"""

import math
import sys

import pygardinglab as g


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def main():
    assert g.elementary_symmetric([1.0, 2.0, 3.0], 2) == 11.0

    inside = g.garding_membership([1.0, 2.0, 3.0], 3)
    assert inside["member_open"]
    edge = g.garding_membership([0.0, 1.0, 1.0], 3)
    assert edge["member_closed"] and not edge["member_open"]
    assert not g.positivity_membership([-1.0, 1.0, 1.0], 1.5)["member_closed"]

    p = g.epsilon_params(1 / math.sqrt(3), 4)
    assert close(p["m_eps"], 2.0)
    assert close(g.epsilon_for_m(2.0, 4), 1 / math.sqrt(3))
    assert g.sharp_witness(4, 2) == [0.0, 0.0, 1.0, 1.0]

    r = g.verify_inclusion(6, math.sqrt(0.1), samples=2000, seed=3)
    assert r["accepted"] == 2000 and not r["violations"]
    assert r == g.verify_inclusion(6, math.sqrt(0.1), samples=2000, seed=3)

    b = g.boundary_search(4, 1 / math.sqrt(3), restarts=8)
    assert b["min_c0"] >= -1e-8 and b["rigid_m"] == 2

    assert g.model_spectrum("sphere", n=4) == [1.0] * 6
    assert g.model_spectrum("sphere", "second", n=4) == [1.0] * 9
    product = g.model_spectrum("product", p=2, q=2)
    assert product == [0.0, 0.0, 0.0, 0.0, 1.0, 1.0]

    report = g.classify_spectrum([1.0] * 6, "first", 4, math.sqrt(0.1))
    assert [v["kind"] for v in report["verdicts"]] == ["spherical_space_form"]
    assert g.classify_spectrum(product, "first", 4, 0.3)["verdicts"] == []

    t = g.thresholds(4, kaehler=2)
    assert close(t["first_kind"]["epsilon"], math.sqrt(0.1))
    assert close(t["kaehler"]["biholomorphic"]["epsilon"], 1 / math.sqrt(3))

    try:
        g.epsilon_params(1.5, 4)
    except ValueError:
        pass
    else:
        raise AssertionError("epsilon outside (0, 1) accepted")

    print("pygardinglab smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
