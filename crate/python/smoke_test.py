"""End-to-end smoke test for the flagtwistor_py extension module.

Run after `pip install -e . --no-build-isolation` from the repo root:

    python python/smoke_test.py
"""

import math

import flagtwistor_py as fp


def close(x, y, tol=1e-9):
    return abs(x - y) <= tol


def ratio(coords, i, j):
    return coords[i][0] / coords[j][0] if isinstance(coords[i], list) else coords[i] / coords[j]


def main():
    # --- surfaces: classification -----------------------------------------
    s = fp.Surface([[0, 3, 0], [0, 1, 0], [0, 0, 2]])
    assert s.tag() == "A1", s.tag()
    cls = s.classify()
    assert cls["tag"] == "A1" and "lambda" in cls and "transform" in cls
    assert s.singular_locus()["variant"] == "smooth"
    uf = s.unitary_form()
    assert set(uf) >= {"lambda", "a", "b", "c", "u"}
    print("ok surfaces: classification, singular locus, unitary form")

    nilp = fp.Surface([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert nilp.tag() == "A5"
    loc = nilp.singular_locus()
    assert loc["variant"] == "point"
    # singular flag ([0:0:1], [1:0:0])
    p = loc["point"]["p"]["coords"]
    l = loc["point"]["l"]["coords"]
    assert abs(p[2][0]) > 0.9 and abs(p[0][0]) < 1e-9 and abs(l[0][0]) > 0.9
    print("ok surfaces: A5 singular point")

    # --- twistor fibers on the three reference surfaces -------------------
    fx = s.fibers()
    assert fx["type"] == "two"
    r0 = ratio(fx["points"][0]["coords"], 1, 0)
    r1 = ratio(fx["points"][1]["coords"], 1, 0)
    assert close(min(r0, r1), -1.0, 1e-8) and close(max(r0, r1), -0.5, 1e-8)

    one = fp.Surface([[0, 2 * math.sqrt(2), 0], [0, 1, 0], [0, 0, 2]]).fibers()
    assert one["type"] == "one"
    assert close(ratio(one["point"]["coords"], 1, 0), -1 / math.sqrt(2), 1e-8)

    empty = fp.Surface([[0, 2, 0], [0, 1, 0], [0, 0, 2]]).fibers()
    assert empty["type"] == "empty"

    circle = fp.Surface([[0, 0, 0], [0, 1, 0], [0, 0, 2]]).fibers()
    assert circle["type"] == "circle" and close(circle["modulus"], 1.0)
    print("ok twistor: two/one/empty/circle fiber sets")

    # --- fiber preimages and branch samples -------------------------------
    pre = s.fiber_preimages([1, 2, 0.5])
    assert pre["type"] == "points" and len(pre["flags"]) == 2
    for flag in pre["flags"]:
        assert s.contains(flag["p"], flag["l"])
    br = s.branch([1, 2, 0.5])
    assert "r" in br and len(br["r"]) == 2
    rd = s.rank_drop([1, 2, 0.5])
    assert rd["rank"] == 3 and len(rd["rows"]) == 4
    print("ok twistor: preimages contained, branch sample, rank drop")

    toric = fp.Surface([[0, 0, 0], [0, 1, 0], [0, 0, 1j]])
    zeros = toric.branch_zeros(16, seed=3)
    assert zeros, "toric surface must have branch points"
    worst = max(abs(complex(*toric.branch(z)["r"])) for z in zeros)
    assert worst < 1e-7, worst
    print("ok twistor: toric branch zeros vanish to", worst)

    # --- curves and metric -------------------------------------------------
    c = fp.Curve([1, 0, 0], [0.25, 1, 0])
    assert c.kind() == "smooth" and not c.is_twistor_fiber()
    sf = c.sphere_form()
    assert close(sf["rho"], 2.0, 1e-12), sf["rho"]
    quad = c.image_quadric()["matrix"]
    assert len(quad) == 3 and len(quad[0]) == 3

    fiber = fp.Curve([1, 1j, 0], [1, -1j, 0])
    assert fiber.is_twistor_fiber()
    assert fp.Curve([1, 0, 0], [0, 1, 0]).kind() == "reducible"
    hit = c.intersect(fp.Curve([0, 1, 0], [1, 0, 0]))
    assert hit["kind"] in {"empty", "point"}
    jj = c.j_image().j_image()
    assert close(abs(fp.fubini_study_distance(jj.q(), c.q())), 0.0, 1e-9)
    print("ok curves: kinds, sphere form, intersection, j involution")

    d = fp.fubini_study_distance([1, 0, 0], [0, 1, 0])
    assert close(d, math.pi / 2, 1e-12)
    e, f, g = fp.first_fundamental_form(1.0, 0.0, math.pi / 4)
    assert close(e, 3 / 16, 1e-12) and f == 0.0 and close(g, 0.5, 1e-12)
    prof = fp.profile_curve(0.5, 64)
    assert len(prof["samples"]) == 64
    assert close(prof["samples"][0]["f"], 0.0, 1e-9)
    tor = fp.torus_profile(6.0)
    assert tor["singular_count"] == 2
    mm = fp.moment_map([1, 1, 1])
    assert all(close(x, 1 / 3, 1e-12) for x in mm)
    print("ok metric: distances, fundamental form, profiles, moment map")

    # --- fibers of the twistor projection ----------------------------------
    fib = fp.Fiber([1, 2, 0.5])
    x0 = fib.sample(0.0)
    x1 = fib.sample()          # point at infinity
    assert x0 != x1

    def cross(u, v):
        return [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]

    # every flag of the fiber projects back to the base point
    base = fib.base()
    for x in (x0, x1, fib.sample(1.5 + 0.25j)):
        proj = cross([z.conjugate() for z in x["p"]], x["l"])
        assert fp.fubini_study_distance(proj, base) < 1e-9
    print("ok fiber sampling")

    # --- counts -------------------------------------------------------------
    assert fp.h0_product(1, 1) == 9
    assert fp.h0_flag(1, 1) == 8
    assert fp.c1_squared(1, 1) == 6
    assert fp.c1_squared(1, 2) == 2
    assert fp.blowup_count_1d(2) == 7
    assert fp.max_twistor_lines(1, 1) == 2
    assert fp.max_twistor_lines(2, 1) == 6
    assert fp.max_11_curves_in_intersection(1, 1) == 3
    assert fp.triple_product((1, 1), (1, 1), (1, 0)) == 3
    print("ok counts")

    # --- norm quadratic ------------------------------------------------------
    sols = sorted(fp.solve_norm_quadratic(1.5, 0.5), key=lambda z: z.real)
    assert len(sols) == 2 and close(abs(sols[0] + 1), 0) and close(abs(sols[1] + 0.5), 0)
    assert fp.solve_norm_quadratic(1, 1) == []
    print("ok norm quadratic")

    # --- error mapping -------------------------------------------------------
    try:
        fp.Surface([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    except ValueError as exc:
        assert "scalar" in str(exc)
    else:
        raise AssertionError("scalar matrix must be rejected")
    print("ok error mapping")

    # --- self verification (small run) ---------------------------------------
    report = fp.run_verification(seed=11, samples=5)
    assert report["passed"] is True, report
    assert report["total_failures"] == 0
    assert len(report["checks"]) >= 25
    print("ok verification suite:", len(report["checks"]), "checks")

    print("PASS: flagtwistor_py smoke test")


if __name__ == "__main__":
    main()
