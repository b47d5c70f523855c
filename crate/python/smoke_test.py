"""Smoke test for the gauduchon Python extension.

Build and install first:
    pip install --no-build-isolation -e crates/py
"""

import json
import math

import gauduchon


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


def main():
    hopf = gauduchon.Metric.model("hopf", 2)
    z = [1.0 + 0j, 0.5j]
    assert hopf.dim == 2

    chern = hopf.chern(z)
    assert close(chern.scal, 0.5) and close(chern.scal_tilde, 0.25)
    assert not chern.is_kahler()
    assert chern.bianchi_residual() < 1e-12

    # two independent routes to the same curvature
    for t in (-1.0, 0.0, 1.0 / 3.0, 0.5, 2.0):
        a = hopf.curvature(z, t).r11()
        b = hopf.curvature(z, t, route="direct").r11()
        assert max(abs(x - y) for x, y in zip(a, b)) < 1e-8, t

    half = hopf.curvature(z, 0.5)
    assert close(half.scal, 0.375)
    v = [0.6 + 0j, 0.8j]
    assert half.hsc(v) <= hopf.curvature(z, 1.0).hsc(v) + 1e-10
    assert close(half.hsc(v), hopf.curvature(z, 1.5).hsc(v))

    assert abs(hopf.torsion_vertex(z) - 1.0 / 3.0) < 1e-9
    assert hopf.torsion_residual(z, 0.25) < 1e-9

    lam = gauduchon.lambda_star(0.0, 2)
    assert close(lam, -0.5)
    flat_ric = gauduchon.Metric.model("hopf_lambda", 2, lam=lam).curvature(z, 0.0).ricci(1)
    assert max(abs(x) for row in flat_ric for x in row) < 1e-10

    fs = gauduchon.Metric.from_text("dim 1\ng[1,1] = 1/(1 + z_1*zb_1)^2\n")
    assert fs.chern([0.3 + 0.1j]).is_kahler()

    ts, vals = gauduchon.sweep("hopf", 2, "scal", 0.0, 1.0, 0.5, points=2)
    assert ts == [0.0, 0.5, 1.0]
    assert all(close(x, y, 1e-12) for x, y in zip(vals, [0.25, 0.375, 0.5]))

    report = json.loads(gauduchon.verify("lck"))
    assert report["status"] == "pass" and report["schema_version"] == 1

    try:
        gauduchon.lambda_star(1.0, 2)
    except ValueError:
        pass
    else:
        raise AssertionError("lambda_star(1, 2) must be out of range")

    assert not math.isnan(hopf.torsion_norm2(z, -1.0))
    print("smoke test passed:", gauduchon.__version__)


if __name__ == "__main__":
    main()
