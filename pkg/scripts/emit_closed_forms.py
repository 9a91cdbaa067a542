"""Print the closed-form product transforms as plain-text math, one line per dimension."""
import argparse

from displab import kernel_calculus as kc


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dims", default="2,3,4,5", help="comma-separated dimensions (2..9)")
    p.add_argument("--leading", action="store_true", help="print the leading term instead")
    p.add_argument("--remainder", action="store_true", help="print full transform minus leading term")
    args = p.parse_args()
    for n in (int(v) for v in args.dims.split(",")):
        if args.leading:
            e = kc.leading_expr(n)
        elif args.remainder:
            e = kc.remainder_expr(n)
        else:
            e = kc.transform_expr(n)
        print(f"n={n} terms={len(e)}: {e.to_text()}")


if __name__ == "__main__":
    main()
