"""Fidelity and time against distance with three pumping steps per level."""

import argparse

from repeaterlab.bell import ErrorModel, shape_state
from repeaterlab.nesting import NestingConfig, asymptote, fixed_point_profile, loglog_slope, recurse


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--M", type=int, default=3)
    ap.add_argument("--p", type=float, default=0.995)
    ap.add_argument("--nmax", type=int, default=1024)
    ap.add_argument("--F0", type=float, nargs="+", default=[1.0, 0.99, 0.98, 0.97, 0.96])
    args = ap.parse_args(argv)

    err = ErrorModel(args.p, args.p)
    ns = [2**k for k in range(1, args.nmax.bit_length()) if 2**k <= args.nmax]
    print("F0,n,F_A,F_FP,F_inf,T_A_over_T0")
    for f in args.F0:
        F0 = shape_state(f, 0.0)
        cfg = NestingConfig(F0=F0, T0=0.0128, t_c=1e-4, err=err, M=args.M, n_total=args.nmax)
        trace = recurse(cfg, ns)
        fps = fixed_point_profile(trace)
        f_inf = asymptote(F0, err).fidelity
        for n in ns:
            A = trace.A(n)
            print(f"{f},{n},{A.fidelity:.6f},{fps[n].a:.6f},{f_inf:.6f},{A.avg_time / cfg.T0:.4g}")
        big = [n for n in range(8, args.nmax + 1)]
        trace = recurse(cfg, big)
        print(f"# F0={f}: log-log time slope over n>=8: {loglog_slope(big, [trace.A(n).avg_time for n in big]):.3f}")


if __name__ == "__main__":
    main()
