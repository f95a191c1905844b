#!/usr/bin/env python3
"""Render the growth-rate comparison plot from a compare.csv file.

Log-scale growth rate versus 1/eps, one series per (route, mode).  In these
axes the asymptotic-formula series is a straight line of slope -sqrt(2) pi
once its algebraic prefactor eps^(-sqrt(17)) (shared by both modes) is taken
out; `--check-slope` fits exactly that and exits nonzero if the fitted slope
is off by more than 2%.

Usage:
    render_comparison.py --in compare.csv --out cmp.svg [--check-slope]
"""

import argparse
import csv
import math
import sys
import warnings

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "linestab-figures"
import matplotlib.pyplot as plt  # noqa: E402

COMPARE_COLUMNS = ("epsilon", "rho", "mode", "route", "growth_rate",
                   "im_omega", "status")
ALGEBRAIC_POWER = -math.sqrt(17.0)  # eps exponent of the asymptotic rate
SLOPE_TARGET = -math.sqrt(2.0) * math.pi

ROUTE_STYLE = {
    "dense": dict(marker="s", ls="none", color="tab:gray"),
    "lyapunov_schmidt": dict(marker="o", ls="-", color="tab:blue"),
    "quadrature": dict(marker="^", ls="--", color="tab:green"),
    "formula": dict(marker="", ls="-", color="tab:red"),
}
MODE_ALPHA = {"mode0": 1.0, "mode1": 0.55}


def read_compare(path):
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SystemExit(f"{path}: empty file, expected a compare.csv header")
        missing = [c for c in COMPARE_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise SystemExit(f"{path}: missing column(s) {', '.join(missing)}")
        for row in reader:
            try:
                eps = float(row["epsilon"])
                rate = float(row["growth_rate"])
            except ValueError as exc:
                raise SystemExit(f"{path}: bad numeric field in row {row}: {exc}")
            rows.append((eps, row["mode"], row["route"], rate, row["status"]))
    return rows


def usable(rows):
    kept = []
    for eps, mode, route, rate, status in rows:
        if status != "ok" or not rate > 0.0 or math.isnan(rate):
            warnings.warn(
                f"skipping row (route={route}, mode={mode}, eps={eps}): "
                f"status={status}, rate={rate}")
            continue
        kept.append((eps, mode, route, rate))
    return kept


def fit_slope(rows, mode):
    pts = sorted((1.0 / eps, math.log(rate) - ALGEBRAIC_POWER * math.log(eps))
                 for eps, m, route, rate in rows
                 if m == mode and route == "formula")
    if len(pts) < 2:
        return None
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    n = len(xs)
    xm = sum(xs) / n
    ym = sum(ys) / n
    return (sum((x - xm) * (y - ym) for x, y in zip(xs, ys))
            / sum((x - xm) ** 2 for x in xs))


def render(rows, out_path):
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    modes = sorted({m for _, m, _, _ in rows})
    for mode in modes:
        for route, style in ROUTE_STYLE.items():
            pts = sorted((1.0 / eps, rate) for eps, m, r, rate in rows
                         if m == mode and r == route)
            if not pts:
                continue
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            if len(pts) == 1:
                style = dict(style, ls="none", marker=style["marker"] or "o")
            ax.semilogy(xs, ys, alpha=MODE_ALPHA.get(mode, 1.0),
                        label=f"{route} ({mode})", markersize=4, **style)
    ax.set_xlabel(r"$1/\varepsilon$")
    ax.set_ylabel("growth rate")
    ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    save_kwargs = {}
    if str(out_path).endswith(".svg"):
        save_kwargs["metadata"] = {"Date": None}
    fig.savefig(out_path, **save_kwargs)
    plt.close(fig)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--in", dest="inp", required=True, help="compare.csv path")
    ap.add_argument("--out", dest="out", required=True,
                    help="output image (.svg default, .png supported)")
    ap.add_argument("--check-slope", action="store_true",
                    help="verify the formula series' fitted slope is "
                         "-sqrt(2) pi within 2%%")
    args = ap.parse_args(argv)
    rows = usable(read_compare(args.inp))
    render(rows, args.out)
    if args.check_slope:
        failures = []
        for mode in sorted({m for _, m, _, _ in rows}):
            slope = fit_slope(rows, mode)
            if slope is None:
                print(f"{mode}: not enough formula points for a slope fit")
                continue
            rel = abs(slope - SLOPE_TARGET) / abs(SLOPE_TARGET)
            status = "ok" if rel <= 0.02 else "FAIL"
            print(f"{mode}: fitted slope {slope:.4f} vs {SLOPE_TARGET:.4f} "
                  f"(rel dev {rel:.2%}) {status}")
            if rel > 0.02:
                failures.append(mode)
        if failures:
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
