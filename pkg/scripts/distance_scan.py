"""Upper bounds on the distance from (1, 0) to points at increasing height.

For points (1, h) the bound should grow like h for small h (the metric is
Riemannian near x = 1) and like h^(1/(alpha+1)) for large h, where leaving
the axis pays off.
"""
import argparse
import json

import numpy as np

from grushin import cc_distance_upper


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--heights", type=float, nargs="+", default=[0.1, 0.5, 1.0, 4.0, 16.0, 64.0])
    ap.add_argument("--knots", type=int, default=17)
    ap.add_argument("--iterations", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for h in args.heights:
        res = cc_distance_upper(args.alpha, (1.0, 0.0), (1.0, h), knots=args.knots, iterations=args.iterations, seed=args.seed)
        print(json.dumps({
            "alpha": args.alpha,
            "height": h,
            "distance_upper": res.distance_upper,
            "vertical_segment": h,
            "height_scaled": h ** (1.0 / (args.alpha + 1.0)),
            "turning_x": float(np.max(np.abs(res.curve.points[:, 0]))),
        }, sort_keys=True))


if __name__ == "__main__":
    main()
