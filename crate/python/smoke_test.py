"""Smoke test for the partial_bergman_py extension module.

Run after building the extension, e.g. `maturin develop -m crates/python/Cargo.toml`
or by copying target/release/libpartial_bergman_py.so to partial_bergman_py.so
somewhere on PYTHONPATH.
"""

import json
import math
import sys

import partial_bergman_py as pb


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    star = pb.RadialPotential.punctured_disk()
    assert close(star.determinant(0.5), 2880 / 343, 1e-14)
    assert close(star.scalar_curvature(0.3), -24 * math.pi, 1e-12)
    inv = star.invariants(0.5)
    assert close(inv["combo"], -960 * math.pi**2, 1e-10)
    fam = pb.RadialPotential.family(3)
    assert close(fam.scalar_curvature(0.4), -8 * math.pi, 1e-12)

    assert close(pb.norm(3, 1, 2)["approx"], 0.125, 1e-14)
    assert pb.norm(3, 0, 3, method="exact")["exact"] == "3/8"
    assert pb.angular_factor(1, 2) == "1/24"
    try:
        pb.norm(3, 0, 0)
    except ValueError as e:
        assert "divergent" in str(e) or "j + k" in str(e), e
    else:
        raise AssertionError("divergent index accepted")

    for m, c in [(3, 8 / 3), (4, 8.0), (5, 16.0), (8, 56.0)]:
        k = pb.kernel(m, 0.5)
        assert close(k["value"], c, 1e-9), (m, k)
    full = pb.kernel(4, 0.5, subspace="full")
    assert full["value"] > 8.0
    assert close(pb.family_kernel(4, 2.0, 0.125)["value"], 8.0, 1e-9)
    assert pb.family_kernel(4, 1.5, 0.3, subspace="full")["value"] > 0
    rep = pb.constancy(4, [0.1, 0.5, 0.9])
    assert rep["max_relative_deviation"] < 1e-9
    g = pb.generating_check(4, 0.5, 100)
    assert g["residual"] <= g["tail_bound"] + g["rounding_bound"]

    for sign, s in [("negative", -24 * math.pi), ("zero", 0.0), ("positive", 2 * math.pi)]:
        model = pb.ProductModel.theorem_instance(4, sign)
        assert abs(model.scalar_curvature() - s) < 1e-12
        m0 = model.minimal_level()
        k = model.kernel(m0, 0.5)
        assert close(k["value"], model.expected_constant(m0), 1e-9)
        again = pb.ProductModel.from_json(model.to_json())
        assert again.label == model.label

    report = pb.verify()
    assert report["pass"] and report["exit_code"] == 0
    print(json.dumps({"checks": len(report["checks"]), "pass": report["pass"]}))
    print("smoke test ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
