"""Verify the conjugated Joukovski map on a strip and dump a plotting grid."""
import argparse
import json
import os
import time

from grushin import ConjugatedMap, Joukovski, RectilinearDomain, emit_grid, verify_conformal


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    ap.add_argument("--grid", type=int, default=100)
    ap.add_argument("--out-dir", default=os.environ.get("GRUSHIN_OUTPUT_DIR", "."))
    args = ap.parse_args()
    dom = RectilinearDomain.from_rects([(1.2, 3, 0.5, 2.5)])
    for a in args.alphas:
        gmap = ConjugatedMap(a, Joukovski())
        t0 = time.perf_counter()
        rep = verify_conformal(a, gmap, dom, grid=args.grid)
        dt = time.perf_counter() - t0
        path = os.path.join(args.out_dir, f"joukovski_alpha{a:g}.csv")
        emit_grid(a, gmap, dom, args.grid, path)
        print(json.dumps({"alpha": a, "verdict": rep.verdict, "max_wbar": rep.max_wbar_residual,
                          "min_det": rep.min_det_dalpha, "seconds": round(dt, 3), "grid": path}, sort_keys=True))


if __name__ == "__main__":
    main()
