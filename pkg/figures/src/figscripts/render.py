"""Render publication-style panel figures from the simulator's CSV artifacts.

Recipes are plain-text key=value files ('#' comments).  Common keys:

    figure  = fig2 | fig3 | fig4 | fig5 | figA1 | figA2
    output  = panels.png
    dpi     = 120            # optional
    title   = ...            # optional

Stationary-distribution figures (fig2, fig3, figA1, figA2) take
``without_csv``, ``with_csv`` and ``diff_csv`` (the three artifacts of a
finite-mode sweep) and draw one panel row per punishment level (fig2,
figA1) or checking-cost level (fig3, figA2), with columns: without
trust strategies, with them, and the adoption difference.  Trajectory
figures (fig4) take ``trajectories`` (comma-separated CSV paths, one per
column) and draw user strategy shares on top of the creator cooperation
rate.  Learning figures (fig5) take ``traces`` and do the same per
learning run.

Strategy colours are fixed so panels are comparable across figures:
AllA blue, AllN orange, TFT green, TUA red, DtG purple; unsafe-creator
lines are dashed.
"""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["FigureRecipe", "RenderResult", "SchemaMismatch", "RecipeError", "load_recipe", "render", "main"]

FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5", "figA1", "figA2")

USER_STRATEGIES = ("AllA", "AllN", "TFT", "TUA", "DtG")
USER_COLORS = {
    "AllA": "tab:blue",
    "AllN": "tab:orange",
    "TFT": "tab:green",
    "TUA": "tab:red",
    "DtG": "tab:purple",
}
COOP_COLOR = "tab:cyan"


class RecipeError(Exception):
    """Malformed recipe file or missing input."""


class SchemaMismatch(RecipeError):
    """A CSV input lacks a required column."""


@dataclass(frozen=True)
class FigureRecipe:
    figure_id: str
    output: str
    inputs: dict
    dpi: int = 120
    title: str = ""


@dataclass(frozen=True)
class RenderResult:
    path: str
    nrows: int
    ncols: int


def load_recipe(path) -> FigureRecipe:
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise RecipeError(f"cannot read recipe {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise RecipeError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    figure_id = values.pop("figure", None)
    if figure_id not in FIGURE_IDS:
        raise RecipeError(f"{path}: figure must be one of {FIGURE_IDS}, got {figure_id!r}")
    output = values.pop("output", None)
    if not output:
        raise RecipeError(f"{path}: missing output key")
    dpi = int(values.pop("dpi", "120"))
    title = values.pop("title", "")
    return FigureRecipe(figure_id, output, values, dpi, title)


def _read_csv(path, required):
    """Rows of a CSV as dicts; raises SchemaMismatch naming the first
    missing required column."""
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise RecipeError(f"cannot read {path}: {exc}") from exc
    with handle:
        reader = csv.DictReader(handle)
        fields = reader.fieldnames or []
        for column in required:
            if column not in fields:
                raise SchemaMismatch(f"{path}: missing column {column!r}")
        return fields, [dict(row) for row in reader]


def _stationary_labels(fields):
    """Map stationary_p* columns to (user, creator) line labels."""
    n = sum(1 for f in fields if f.startswith("stationary_p"))
    users = USER_STRATEGIES[: n // 2]
    labels = []
    for i in range(n):
        user = users[i // 2]
        creator = "C" if i % 2 == 0 else "D"
        labels.append((f"stationary_p{i}", user, creator))
    return labels


def _grouped(rows, key):
    values = sorted({float(r[key]) for r in rows})
    return [(v, [r for r in rows if float(r[key]) == v]) for v in values]


def _require_input(recipe, key):
    if key not in recipe.inputs:
        raise RecipeError(f"recipe for {recipe.figure_id} needs the {key!r} key")
    return recipe.inputs[key]


def _render_stationary_grid(recipe: FigureRecipe) -> RenderResult:
    # fig2/figA1: panel rows per punishment level, checking cost on x;
    # fig3/figA2: rows per checking-cost level, punishment on x
    row_key, x_key = ("v", "eps") if recipe.figure_id in ("fig2", "figA1") else ("eps", "v")
    without_path = _require_input(recipe, "without_csv")
    with_path = _require_input(recipe, "with_csv")
    diff_path = _require_input(recipe, "diff_csv")
    base_cols = ["eps", "v", "trust_enabled", "coop_freq", "adoption_level"]
    wo_fields, wo_rows = _read_csv(without_path, base_cols + ["stationary_p5"])
    wi_fields, wi_rows = _read_csv(with_path, base_cols + ["stationary_p9"])
    _, diff_rows = _read_csv(diff_path, ["eps", "v", "adoption_with", "adoption_without", "adoption_diff"])

    levels = sorted(
        {float(r[row_key]) for r in wo_rows}
        | {float(r[row_key]) for r in wi_rows}
        | {float(r[row_key]) for r in diff_rows}
    )
    nrows = max(len(levels), 1)
    fig, axes = plt.subplots(nrows, 3, figsize=(12, 2.8 * nrows), squeeze=False)
    for i, level in enumerate(levels):
        for j, (fields, rows, label) in enumerate(
            ((wo_fields, wo_rows, "without trust strategies"), (wi_fields, wi_rows, "with trust strategies"))
        ):
            ax = axes[i][j]
            sub = [r for r in rows if float(r[row_key]) == level]
            sub.sort(key=lambda r: float(r[x_key]))
            xs = [float(r[x_key]) for r in sub]
            for column, user, creator in _stationary_labels(fields):
                ys = [float(r[column]) for r in sub]
                ax.plot(
                    xs,
                    ys,
                    color=USER_COLORS[user],
                    linestyle="-" if creator == "C" else "--",
                    label=f"({user},{creator})",
                )
            ax.set_ylim(-0.02, 1.02)
            ax.set_ylabel("stationary mass")
            ax.set_title(f"{label}, {row_key}={level:g}")
        ax = axes[i][2]
        sub = [r for r in diff_rows if float(r[row_key]) == level]
        sub.sort(key=lambda r: float(r[x_key]))
        xs = [float(r[x_key]) for r in sub]
        ax.plot(xs, [float(r["adoption_diff"]) for r in sub], color="black")
        ax.axhline(0.0, color="gray", linewidth=0.5)
        ax.set_ylabel("adoption difference")
        ax.set_title(f"adoption uplift, {row_key}={level:g}")
    for ax in axes[-1]:
        ax.set_xlabel("checking cost" if x_key == "eps" else "punishment")
    if levels:
        axes[0][1].legend(fontsize=6, ncol=2, loc="upper right")
    return _finish(fig, recipe, nrows, 3)


def _render_trajectory_grid(recipe: FigureRecipe) -> RenderResult:
    paths = [p.strip() for p in _require_input(recipe, "trajectories").split(",") if p.strip()]
    labels = _column_labels(recipe, len(paths))
    ncols = max(len(paths), 1)
    fig, axes = plt.subplots(2, ncols, figsize=(4 * ncols, 6), squeeze=False)
    for j, path in enumerate(paths):
        _, rows = _read_csv(path, ["t", "x", "y", "z", "w", "dtg", "alpha"])
        ts = [float(r["t"]) for r in rows]
        top, bottom = axes[0][j], axes[1][j]
        for column, name in zip(("x", "y", "z", "w", "dtg"), USER_STRATEGIES):
            top.plot(ts, [float(r[column]) for r in rows], color=USER_COLORS[name], label=name)
        bottom.plot(ts, [float(r["alpha"]) for r in rows], color=COOP_COLOR)
        top.set_ylim(-0.02, 1.02)
        bottom.set_ylim(-0.02, 1.02)
        top.set_title(labels[j])
        top.set_ylabel("user share")
        bottom.set_ylabel("creator cooperation")
        bottom.set_xlabel("time")
    if paths:
        axes[0][0].legend(fontsize=7)
    return _finish(fig, recipe, 2, ncols)


def _render_learning_grid(recipe: FigureRecipe) -> RenderResult:
    paths = [p.strip() for p in _require_input(recipe, "traces").split(",") if p.strip()]
    labels = _column_labels(recipe, len(paths))
    ncols = max(len(paths), 1)
    fig, axes = plt.subplots(2, ncols, figsize=(4 * ncols, 6), squeeze=False)
    user_cols = [f"user_{name}" for name in USER_STRATEGIES]
    for j, path in enumerate(paths):
        _, rows = _read_csv(path, ["episode"] + user_cols + ["creator_coop_fraction"])
        eps = [int(r["episode"]) for r in rows]
        top, bottom = axes[0][j], axes[1][j]
        for column, name in zip(user_cols, USER_STRATEGIES):
            top.plot(eps, [float(r[column]) for r in rows], color=USER_COLORS[name], label=name)
        bottom.plot(eps, [float(r["creator_coop_fraction"]) for r in rows], color=COOP_COLOR)
        top.set_ylim(-0.02, 1.02)
        bottom.set_ylim(-0.02, 1.02)
        top.set_title(labels[j])
        top.set_ylabel("user share")
        bottom.set_ylabel("creator cooperation")
        bottom.set_xlabel("episode")
    if paths:
        axes[0][0].legend(fontsize=7)
    return _finish(fig, recipe, 2, ncols)


def _column_labels(recipe, count):
    raw = recipe.inputs.get("labels", "")
    labels = [s.strip() for s in raw.split(",")] if raw else []
    if len(labels) < count:
        labels += [f"input {i + 1}" for i in range(len(labels), count)]
    return labels


def _finish(fig, recipe: FigureRecipe, nrows: int, ncols: int) -> RenderResult:
    if recipe.title:
        fig.suptitle(recipe.title)
    fig.tight_layout()
    out = Path(recipe.output)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=recipe.dpi)
    plt.close(fig)
    return RenderResult(str(out), nrows, ncols)


def render(recipe: FigureRecipe) -> RenderResult:
    """Draw the recipe's panel grid and write the image file."""
    if recipe.figure_id in ("fig2", "fig3", "figA1", "figA2"):
        return _render_stationary_grid(recipe)
    if recipe.figure_id == "fig4":
        return _render_trajectory_grid(recipe)
    return _render_learning_grid(recipe)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: render <recipe-file>", file=sys.stderr)
        return 2
    try:
        result = render(load_recipe(argv[0]))
    except RecipeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.path} ({result.nrows}x{result.ncols} panels)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
