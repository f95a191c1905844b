#!/usr/bin/env python3
"""Render the two-panel bifurcation diagram from a scan.csv file.

Left panel: Re(lambda) vs rho.  Right panel: Im(lambda) vs rho.
Continuum-like eigenvalues are drawn as a shaded background band,
localized eigenvalues as markers tracing the discrete branches.

Usage:
    render_bifurcation.py --in scan.csv --out fig1.svg [--panel both]

The script consumes the CSV only; it never recomputes spectra.
"""

import argparse
import csv
import sys
import warnings

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "linestab-figures"
import matplotlib.pyplot as plt  # noqa: E402

SCAN_COLUMNS = ("rho", "eig_index", "re_lambda", "im_lambda",
                "residual", "localization", "label")

CONTINUUM_STYLE = dict(s=1.0, c="0.82", marker=".", linewidths=0, zorder=1)
LOCALIZED_STYLE = dict(s=6.0, c="crimson", marker="o", linewidths=0, zorder=3)


def read_scan(path):
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SystemExit(f"{path}: empty file, expected a scan.csv header")
        missing = [c for c in SCAN_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise SystemExit(f"{path}: missing column(s) {', '.join(missing)}")
        for row in reader:
            if row["eig_index"] == "-1":  # error trailer from a partial run
                continue
            try:
                rows.append((float(row["rho"]), float(row["re_lambda"]),
                             float(row["im_lambda"]), row["label"]))
            except ValueError as exc:
                raise SystemExit(f"{path}: bad numeric field in row {row}: {exc}")
    return rows


def render(rows, out_path, panel="both", rho_range=None, re_range=None,
           im_range=None):
    panels = {"real_part": [0], "imag_part": [1], "both": [0, 1]}[panel]
    fig, axes = plt.subplots(1, len(panels), figsize=(5.2 * len(panels), 3.9))
    if len(panels) == 1:
        axes = [axes]
    if not rows:
        warnings.warn("scan.csv holds no data rows; rendering blank axes")
    series = {
        ("continuum_like", 0): ([], []), ("continuum_like", 1): ([], []),
        ("localized", 0): ([], []), ("localized", 1): ([], []),
    }
    for rho, re, im, label in rows:
        if rho_range and not (rho_range[0] <= rho <= rho_range[1]):
            continue
        series[(label, 0)][0].append(rho)
        series[(label, 0)][1].append(re)
        series[(label, 1)][0].append(rho)
        series[(label, 1)][1].append(im)
    for ax, comp in zip(axes, panels):
        for label, style in (("continuum_like", CONTINUUM_STYLE),
                             ("localized", LOCALIZED_STYLE)):
            xs, ys = series[(label, comp)]
            ax.scatter(xs, ys, **style, label=label.replace("_", " "))
        ax.set_xlabel(r"$\rho$")
        ax.set_ylabel(r"Re $\lambda$" if comp == 0 else r"Im $\lambda$")
        if rho_range:
            ax.set_xlim(*rho_range)
        lim = re_range if comp == 0 else im_range
        if lim:
            ax.set_ylim(*lim)
        ax.legend(loc="upper right", fontsize=8, frameon=False)
    fig.tight_layout()
    save_kwargs = {}
    if str(out_path).endswith(".svg"):
        save_kwargs["metadata"] = {"Date": None}  # keep reruns byte-identical
    fig.savefig(out_path, **save_kwargs)
    plt.close(fig)


def parse_range(text):
    lo, hi = (float(s) for s in text.split(":"))
    return lo, hi


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--in", dest="inp", required=True, help="scan.csv path")
    ap.add_argument("--out", dest="out", required=True,
                    help="output image (.svg default, .png supported)")
    ap.add_argument("--panel", choices=["real_part", "imag_part", "both"],
                    default="both")
    ap.add_argument("--rho-range", type=parse_range, default=None,
                    metavar="LO:HI")
    ap.add_argument("--re-range", type=parse_range, default=None, metavar="LO:HI")
    ap.add_argument("--im-range", type=parse_range, default=None, metavar="LO:HI")
    args = ap.parse_args(argv)
    rows = read_scan(args.inp)
    render(rows, args.out, panel=args.panel, rho_range=args.rho_range,
           re_range=args.re_range, im_range=args.im_range)
    return 0


if __name__ == "__main__":
    sys.exit(main())
