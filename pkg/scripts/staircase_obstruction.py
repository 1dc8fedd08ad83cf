"""Incidence structure of the two staircase domains and the obstruction between them."""
import argparse
import json

from grushin import RectilinearDomain, axis_components, incidence_graph, obstruction_check

OMEGA = [(-2, -1, -3, 2), (-2, 1, 1, 2), (-2, 1, -1, 0), (-2, 1, -3, -2)]
OMEGA_PRIME = [(-2, 2, 1, 2), (-2, -1, -1, 2), (-2, 2, -1, 0), (1, 2, -3, 0), (-2, 2, -3, -2)]


def describe(name, dom):
    g = incidence_graph(dom)
    return {
        "domain": name,
        "axis_components": [[str(a), str(b)] for a, b in axis_components(dom)],
        "side_components": list(g.sides),
        "side_degrees": g.side_degrees(),
        "axis_degrees": g.axis_degrees(),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--no-side-swap", action="store_true")
    args = ap.parse_args()
    om, omp = RectilinearDomain.from_rects(OMEGA), RectilinearDomain.from_rects(OMEGA_PRIME)
    for name, d in (("omega", om), ("omega_prime", omp)):
        print(json.dumps(describe(name, d), sort_keys=True))
    res = obstruction_check(om, omp, allow_side_swap=not args.no_side_swap)
    print(json.dumps({"obstructed": res.obstructed, "certificate": getattr(res, "certificate", None)}, sort_keys=True))


if __name__ == "__main__":
    main()
