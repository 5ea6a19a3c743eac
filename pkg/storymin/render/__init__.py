# isort: skip_file

from .slots import assign_slots
from .svg import RenderOptions, line_chains, render_svg
