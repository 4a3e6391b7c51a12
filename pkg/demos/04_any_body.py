"""The same construction aimed at other bodies.

For a smooth body the truncated target V_m is a polygon inside V, so the
error against V has a floor set by m, while the error against V_m keeps
falling.
"""

from gaussian_hulls.config import config_from_dict
from gaussian_hulls.runner import run_counterexample

targets = {
    "disc": {"kind": "ball", "r": 1.0},
    "ellipse": {"kind": "ellipsoid", "sigma": [[4.0, 0.0], [0.0, 1.0]]},
    "hexagon": {"kind": "polytope", "generators": [[1.0, 0.0], [0.5, 0.8660254037844386],
                                                   [-0.5, 0.8660254037844386]]},
}
for m in (4, 16):
    for name, target in targets.items():
        cfg = config_from_dict({"target": target, "construction": {"m": m},
                                "seeds": list(range(6)), "checkpoints": [10**4, 10**6]})
        rep = run_counterexample(cfg, threads=3)
        print(f"{name:8s} m={m:2d}  vs V: {rep.median('sup_error_vs_v', 10**6):.4f}"
              f"  vs V_m: {rep.median('sup_error_vs_vm', 10**6):.4f}")

# three dimensions: a cube from 26 seeded directions
cube = {"kind": "polytope", "generators": [[1, 1, 1], [1, -1, 1], [1, 1, -1], [1, -1, -1]]}
cfg = config_from_dict({"target": cube, "construction": {"m": 26}, "seeds": [0, 1],
                        "checkpoints": [10**5]})
print("cube, n = 1e5:", round(run_counterexample(cfg).median("sup_error_vs_vm", 10**5), 4))
