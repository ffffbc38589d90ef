"""Staircase between the purification and aux-construction curves.

At p = eta = 0.99 the staircase falls to the fully mixed state; pass
--p 0.995 to see it settle on a high-fidelity intercept.
"""

import argparse

from repeaterlab.bell import ErrorModel, shape_state
from repeaterlab.nesting import asymptote, curve_intersections


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--F0", type=float, default=0.99)
    ap.add_argument("--p", type=float, default=0.99)
    ap.add_argument("--upsilon", type=float, default=0.0)
    args = ap.parse_args(argv)

    F0 = shape_state(args.F0, args.upsilon)
    err = ErrorModel(args.p, args.p)
    res = asymptote(F0, err)
    print("level,F_C,F_A")
    for s in res.staircase:
        print(f"{s.level},{s.C.a:.10f},{s.A.a:.10f}")
    print(f"# F_inf = {res.fidelity:.10f} (residual {res.residual:.1e})")
    print("# curve intersections: " + ", ".join(f"{v.a:.10f}" for v in curve_intersections(F0, err)))


if __name__ == "__main__":
    main()
