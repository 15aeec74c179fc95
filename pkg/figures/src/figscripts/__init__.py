"""Figure scripts for the trust-game toolkit's CSV artifacts."""

from .render import FigureRecipe, RenderResult, load_recipe, render

__all__ = ["FigureRecipe", "RenderResult", "load_recipe", "render"]
