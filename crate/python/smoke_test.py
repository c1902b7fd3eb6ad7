"""Smoke test for the sepcov_py extension.

Build and install first:

    pip install --no-build-isolation -e crates/python
"""

import math

import sepcov_py as sc


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol * (1.0 + abs(b))


def main():
    unit = [(0.0, 1.0)]
    proj = sc.Operator([([(1.0, 0, "", 1.0)], unit, [(1.0, 0, "", 1.0)])], unit)
    assert proj.rank == 1
    assert close(proj.power(3).distance(proj), 0.0)
    assert proj.apply([(2.0, 1, "", 1.0)], [0.5]) == [1.0]
    assert close(proj.hoelder_bound(), 1.0)
    assert proj.empirical_norm(50, 1) >= 0.98

    s1, s2 = sc.sigma(1.0, 0.0, math.pi)
    assert close(s1 + s2, math.pi)
    assert sc.sigma(0.0, 0.0, 2.0) == (0.0, 2.0)

    for name in ["T4", "T5", "T6", "T7", "T8", "T9", "T10", "laurent"]:
        a, b, delta = sc.family(name)
        rep = sc.verify_monomial(a, b, delta, 2)
        assert rep.holds, (name, rep)
        assert sc.verify_reciprocal(a.adjoint(), b.adjoint(), [0.0, 0.0, delta]).holds

    a, b, _ = sc.family("T4", theta_a=[2.0, 0.0, 0.0, 0.0], theta_b=[0.0, 0.0, 1.5, 0.0])
    c = a.commutator(b)
    t, s = 1.0, 0.4
    assert close(c.kernel_at(t, s), -s1 * 2.0 * 1.5 * math.sin(t) * math.cos(s))

    rep = sc.verify_two_sided([0.0, 1.0], [0.0, 2.0], proj, proj)
    assert not rep.holds and rep.violated == 1, rep

    rows, slope = sc.run_sequence("T4", theta="1/n", n_max=64)
    assert len(rows) == 64
    assert all(r[2] > q[2] for q, r in zip(rows[1:], rows))
    assert abs(slope + 1.0) < 0.05

    try:
        sc.family("T5", theta_a=[0.0, 1.0, 1.0, 1.0])
    except sc.SepcovError:
        pass
    else:
        raise AssertionError("inadmissible parameters accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
