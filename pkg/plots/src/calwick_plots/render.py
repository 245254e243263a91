"""Deterministic figure rendering from calwick report CSVs.

Four figure kinds, all driven by the same eight-column row schema:

* convergence    residual vs resolution (param2) per mode, log-log, with
                 the observed order annotated from a least-squares slope;
* spectrum       per-mode values (real and imaginary parts) across modes;
* kernel_heatmap value_re/value_im pivoted over (param1, param2) as two
                 panels, suitable for two-point kernels sampled on a
                 (t1, t2) grid;
* strip          a surface over (t, s) = (param1, param2) plus, when a
                 second CSV is given, its row series drawn alongside so
                 the top edge of the strip can be compared against it.

Rendering is read-only and reproducible: fixed figure geometry, the Agg
backend, and a constant metadata block, so identical inputs give
byte-identical PNGs.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schema import SchemaError, load_csv

KINDS = ("convergence", "spectrum", "kernel_heatmap", "strip")

_METADATA = {"Software": "calwick-plots"}
_DPI = 120


def _save(fig, out_path: str) -> None:
    fig.savefig(out_path, dpi=_DPI, metadata=_METADATA)
    plt.close(fig)


def _series_by_mode(rows):
    out = {}
    for r in rows:
        out.setdefault((r.check, r.mode), []).append(r)
    for key in out:
        out[key].sort(key=lambda r: (r.param1, r.param2))
    return out


def _render_convergence(rows, out_path: str) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for (check, mode), series in sorted(_series_by_mode(rows).items()):
        x = np.array([r.param2 for r in series], dtype=float)
        y = np.array([max(r.residual, 1e-300) for r in series], dtype=float)
        order = np.argsort(x)
        x, y = x[order], y[order]
        label = f"{check} mode {mode}"
        if len(x) >= 2 and np.all(y > 1e-250):
            slope, _ = np.polyfit(np.log(x), np.log(y), 1)
            label += f" (order {-slope:.2f})"
        ax.loglog(x, y, marker="o", label=label)
    ax.set_xlabel("resolution")
    ax.set_ylabel("residual")
    ax.set_title(f"convergence: {rows[0].scenario}")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    _save(fig, out_path)


def _render_spectrum(rows, out_path: str) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    by_check = {}
    for r in rows:
        by_check.setdefault(r.check, []).append(r)
    for check, series in sorted(by_check.items()):
        series.sort(key=lambda r: (r.mode, r.param1, r.param2))
        modes = [r.mode for r in series]
        ax.plot(modes, [r.value_re for r in series], marker="o",
                label=f"{check} Re")
        if any(r.value_im != 0.0 for r in series):
            ax.plot(modes, [r.value_im for r in series], marker="x",
                    linestyle="--", label=f"{check} Im")
    ax.set_xlabel("mode")
    ax.set_ylabel("value")
    ax.set_title(f"spectrum: {rows[0].scenario}")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7)
    _save(fig, out_path)


def _pivot(rows):
    xs = np.array(sorted({r.param1 for r in rows}))
    ys = np.array(sorted({r.param2 for r in rows}))
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: i for i, v in enumerate(ys)}
    grid = np.full((len(ys), len(xs)), np.nan, dtype=complex)
    for r in rows:
        grid[yi[r.param2], xi[r.param1]] = r.value
    return xs, ys, grid


def _render_kernel_heatmap(rows, out_path: str) -> None:
    xs, ys, grid = _pivot(rows)
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.0))
    for ax, data, name in (
        (axes[0], grid.real, "Re"),
        (axes[1], grid.imag, "Im"),
    ):
        im = ax.pcolormesh(xs, ys, data, shading="nearest", cmap="RdBu_r")
        fig.colorbar(im, ax=ax)
        ax.set_xlabel("t1")
        ax.set_ylabel("t2")
        ax.set_title(f"{name} {rows[0].check}")
    fig.suptitle(f"kernel: {rows[0].scenario}")
    fig.tight_layout()
    _save(fig, out_path)


def _render_strip(rows, out_path: str, edge_rows=None) -> None:
    xs, ys, grid = _pivot(rows)
    n_panels = 2 if edge_rows else 1
    fig, axes = plt.subplots(1, n_panels, figsize=(4.8 * n_panels, 4.0),
                             squeeze=False)
    ax = axes[0][0]
    im = ax.pcolormesh(xs, ys, grid.real, shading="nearest", cmap="viridis")
    fig.colorbar(im, ax=ax)
    ax.set_xlabel("t")
    ax.set_ylabel("s")
    ax.set_title(f"strip Re: {rows[0].scenario}")
    if edge_rows:
        ax2 = axes[0][1]
        top = grid[0].real
        ax2.plot(xs, top, label="strip top edge")
        edge_rows = sorted(edge_rows, key=lambda r: (r.param1, r.param2))
        ax2.plot(
            [r.param1 for r in edge_rows],
            [r.value_re for r in edge_rows],
            linestyle="--",
            label=f"{edge_rows[0].check} row series",
        )
        ax2.set_xlabel("t")
        ax2.legend(fontsize=7)
        ax2.set_title("top edge vs row series")
    fig.tight_layout()
    _save(fig, out_path)


def render(kind: str, inputs, out_path: str) -> None:
    """Validate the input CSV(s) and write the requested figure."""
    if kind not in KINDS:
        raise ValueError(f"unknown figure kind {kind!r}")
    loaded = [load_csv(p) for p in inputs]
    rows = loaded[0]
    if kind == "convergence":
        _render_convergence(rows, out_path)
    elif kind == "spectrum":
        _render_spectrum(rows, out_path)
    elif kind == "kernel_heatmap":
        _render_kernel_heatmap(rows, out_path)
    else:
        edge = loaded[1] if len(loaded) > 1 else None
        _render_strip(rows, out_path, edge_rows=edge)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(
        prog="calwick-render", description="Render figures from calwick CSVs."
    )
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--in", dest="inputs", action="append", required=True,
                   metavar="FILE", help="input CSV (repeatable)")
    p.add_argument("--out", required=True, metavar="IMG")
    args = p.parse_args(argv)
    try:
        render(args.kind, args.inputs, args.out)
    except SchemaError as exc:
        print(f"schema error [{exc.column}]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
