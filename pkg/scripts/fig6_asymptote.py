"""Asymptotic fidelity against initial fidelity and against error shape."""

import argparse

import numpy as np

from repeaterlab.bell import ErrorModel, shape_state
from repeaterlab.errors import NoFixedPointError
from repeaterlab.nesting import asymptote


def f_inf(F0, upsilon, err):
    try:
        return asymptote(shape_state(F0, upsilon), err, max_levels=2000).fidelity
    except NoFixedPointError:
        return float("nan")  # critical slowing down right at the threshold


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, nargs="+", default=[0.99, 0.995, 0.999])
    args = ap.parse_args(argv)

    print("# against F0 (upsilon = 0)")
    print("p,F0,F_inf")
    for p in args.p:
        for F0 in np.round(np.arange(0.95, 1.0001, 0.005), 4):
            print(f"{p},{F0},{f_inf(F0, 0.0, ErrorModel(p, p)):.6f}")
    print("# against upsilon (F0 = 0.99)")
    print("p,upsilon,F_inf")
    for p in args.p:
        for u in np.round(np.linspace(0, 1 / 3, 9), 4):
            print(f"{p},{u},{f_inf(0.99, min(u, 1 / 3), ErrorModel(p, p)):.6f}")


if __name__ == "__main__":
    main()
