"""Smoke test for the Python extension; run after `maturin develop`."""

import math

import diamtors


def main():
    assert diamtors.subgroup_counts(7) == [1, 3, 13, 71, 461, 3447, 29093]
    assert diamtors.transitive_pairs_bruteforce(3) == 13 * 2

    g = diamtors.sample_schreier(30, seed=4)
    assert len(g) == 30 and g.diameter() >= 1
    assert g.canonical() == g.canonical().canonical()
    assert len(diamtors.enumerate_subgroups(4)) == 71
    assert len(diamtors.diameter_samples(27, 20, seed=1)) == 20
    try:
        diamtors.enumerate_subgroups(20)
    except diamtors.ScaleExceededError:
        pass
    else:
        raise AssertionError("enumeration beyond the ceiling must fail")

    count = diamtors.count_noncommensurable(4.0, ceiling=2)
    assert count["exact"] == "4", count

    log_bound, fraction = diamtors.arithmetic_fraction_bound(20.0)
    assert log_bound < 0 and 0 <= fraction <= 1

    assert abs(diamtors.ball_volume(3, 1.0) - 5.11093) < 1e-4
    assert diamtors.log_ball_volume(3, 5000.0) > 9000
    assert abs(diamtors.hadamard_constant(12, 1) - 3 * math.log(11)) < 1e-12

    rp2 = diamtors.SimplicialComplex(6, [
        [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 1, 5],
        [1, 2, 4], [2, 3, 5], [1, 3, 4], [2, 4, 5], [1, 3, 5],
    ])
    h = rp2.homology()
    assert h.betti_numbers() == [1, 0, 0], h
    assert h.torsion(1) == [2]
    assert rp2.euler_characteristic() == 1
    again = diamtors.SimplicialComplex.from_json(rp2.to_json())
    assert again.counts() == rp2.counts()

    report = diamtors.FiniteMetricSpace.circle(120).nerve(0.3, 0.32)
    assert [d["betti"] for d in report["homology"]][:2] == [1, 1]

    scan = diamtors.gabber_scan(trials=100, seed=2)
    bound = diamtors.torsion_bound(3, 5.0, [{"degree": 10**6, "p": 1, "constant": 0.2}])
    assert "loglog_bound" in bound and scan["degree"] == 12

    print("python smoke test passed")


if __name__ == "__main__":
    main()
