"""wavelab - wave mechanics on periodic grids, the two-slit experiment and
the old quantum theory of hydrogen."""

__version__ = "0.1.0"
