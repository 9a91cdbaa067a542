"""Table of spectral quadrature against the closed-form transforms."""
import argparse
import time

from displab import kernel_calculus as kc
from displab import oscillatory as osc


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dims", default="2,3,4,5")
    p.add_argument("--t", default="0.05,0.1,0.2")
    p.add_argument("--points", default="1,2.5,6", help="values used for both r and s")
    p.add_argument("--L", default="auto", help="'auto' = max(1e3, 10 t^-3), or a number")
    p.add_argument("--shape", default="flat", choices=("flat", "fejer"))
    args = p.parse_args()
    pts = [float(v) for v in args.points.split(",")]
    print(f"{'n':>2} {'t':>6} {'r':>5} {'s':>5} {'L':>9} {'|closed|':>11} {'rel err':>10} {'ms':>7}")
    for n in (int(v) for v in args.dims.split(",")):
        for t in (float(v) for v in args.t.split(",")):
            L = max(1e3, 10 * t**-3) if args.L == "auto" else float(args.L)
            for r in pts:
                for s in pts:
                    if s < r:
                        continue
                    t0 = time.perf_counter()
                    v = osc.i_L(n, t, r, s, L, shape=args.shape)
                    ms = 1000 * (time.perf_counter() - t0)
                    ref = -kc.transform(n, r, s, t)
                    print(f"{n:>2} {t:>6.3g} {r:>5.3g} {s:>5.3g} {L:>9.3g} {abs(ref):>11.4g} "
                          f"{abs(v - ref) / abs(ref):>10.2e} {ms:>7.1f}")


if __name__ == "__main__":
    main()
