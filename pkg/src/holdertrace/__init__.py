"""Trace p-norms and executable Hölder equality certificates."""
