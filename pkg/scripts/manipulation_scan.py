"""Map where round trips from a flat book turn profitable.

For each volatility level the scan solves the extended schedule at phi = 0
over a log-spaced grid of initial log-gaps z, certifies each profit with
the proceeds evaluator, and prints where the weak lower bound L(z) changes
sign versus where profits actually appear. With any volatility at all the
drift makes even tiny round trips pay, so the interesting column is the
magnitude, not the sign.
"""

import argparse
import math
import warnings

from ouexec import MarketState, ModelParams, manipulation


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sigma", type=float, nargs="+", default=[0.0, 0.2, 0.4])
    ap.add_argument("--z-max", type=float, default=10.0)
    ap.add_argument("--points", type=int, default=15)
    ap.add_argument("--grid-points", type=int, default=300)
    args = ap.parse_args(argv)

    root = manipulation.l_root()
    print(f"L(z) sign change at z = {root!r}")

    for sigma in args.sigma:
        params = ModelParams(alpha=1.0, beta=1.0, sigma=sigma,
                             fundamental_log=0.0, horizon=1.0)
        state = MarketState(cash=0.0, holdings=0.0, price=1.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep = manipulation.scan(params, state, (0.0, args.z_max),
                                    points=args.points,
                                    grid_points=args.grid_points)
        y = sigma * sigma / 4.0
        print(f"\nsigma = {sigma}  (y = {y})  first profitable z = "
              f"{rep.first_profitable_z}")
        print(f"{'z':>10} {'L(z)':>12} {'bound':>14} {'verified':>14}")
        for z, l, b, p in zip(rep.z_values, rep.l_values, rep.profit_bounds,
                              rep.verified_profits):
            print(f"{z:>10.4f} {l:>12.5f} {b:>14.6e} {p:>14.6e}")


if __name__ == "__main__":
    main()
