"""plotkit command line: regenerate figures from solver CSV artifacts.

Subcommands:
    profiles  -- overlay one quantity from several field CSVs
    entropy   -- (tau, e) scatter over the isentrope curve, with the
                 on-curve deviation printed (and checked via --max-deviation)
    field2d   -- pseudocolor map of a 2D field CSV
"""

from __future__ import annotations

import argparse
import sys

from .io import MetadataMismatch, read_table
from .plots import ProfileSet, entropy_scatter_deviation, plot_entropy_plane, plot_field2d, plot_profiles


def cmd_profiles(args):
    entries = []
    for item in args.inputs:
        label, _, path = item.rpartition("=") if "=" in item else ("", "", item)
        entries.append((label or path, path))
    pset = ProfileSet(entries=entries, quantity=args.quantity,
                      xlim=tuple(args.xlim) if args.xlim else None,
                      ylim=tuple(args.ylim) if args.ylim else None)
    plot_profiles(pset, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_entropy(args):
    plot_entropy_plane(args.fields, args.isentrope, args.out)
    dev = entropy_scatter_deviation(read_table(args.fields), read_table(args.isentrope))
    print(f"wrote {args.out}; scatter-to-curve deviation {dev:.3e}")
    if args.max_deviation is not None and dev > args.max_deviation:
        print(f"deviation exceeds {args.max_deviation:g}", file=sys.stderr)
        return 1
    return 0


def cmd_field2d(args):
    plot_field2d(args.fields, args.out, quantity=args.quantity)
    print(f"wrote {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="plotkit", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profiles", help="overlay field profiles")
    p.add_argument("inputs", nargs="+", help="field CSVs, optionally label=path")
    p.add_argument("--quantity", default="rho")
    p.add_argument("--xlim", nargs=2, type=float)
    p.add_argument("--ylim", nargs=2, type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_profiles)

    p = sub.add_parser("entropy", help="entropy-plane figure")
    p.add_argument("fields", help="field CSV")
    p.add_argument("isentrope", help="isentrope curve CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--max-deviation", type=float, default=None,
                   help="fail if the scatter departs from the curve by more")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("field2d", help="2D pseudocolor map")
    p.add_argument("fields", help="2D field CSV")
    p.add_argument("--quantity", default="rho")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_field2d)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MetadataMismatch, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
