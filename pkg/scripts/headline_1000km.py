"""1000 km with 50 stations: print F and T for a few pumping budgets."""

import argparse

from repeaterlab.bell import ErrorModel
from repeaterlab.nesting import NestingConfig, direct_transmission_time, recurse
from repeaterlab.photonics import Emission, LinkParams, resonant_from_emission, resonant_success

YEAR = 365.25 * 24 * 3600


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pem", type=float, default=0.08)
    ap.add_argument("--p", type=float, default=0.995, help="gate and readout reliability")
    ap.add_argument("--stations", type=int, default=50)
    args = ap.parse_args(argv)

    link = LinkParams(L0=20.0, attenuation=0.2)
    gen = resonant_from_emission(Emission(Pem=args.pem, collection=1.0, t0=1e-6), link)
    print(f"elementary link: F0={gen.F0:.4f} P={gen.P:.3e} T0={gen.T0 * 1e3:.2f} ms")
    err = ErrorModel(args.p, args.p)
    print("M,base_scheme,F,T_s")
    for M in (1, 2, 3):
        for scheme in ("fresh_pair", "zero_length"):
            cfg = NestingConfig.from_generation(gen, err=err, M=M, n_total=args.stations, base_scheme=scheme)
            final = recurse(cfg).final
            print(f"{M},{scheme},{final.fidelity:.4f},{final.avg_time:.3f}")

    L = (args.stations - 1) * link.L0
    P = resonant_success(args.pem, 10 ** (-0.2 * L / 10))
    print(f"direct transmission over {L:.0f} km: {direct_transmission_time(P, 1e-6, L / 2e5) / YEAR:.2e} years")


if __name__ == "__main__":
    main()
