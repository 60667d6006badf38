"""msstab - mean-square stability of stochastic two-step Maruyama methods"""

__version__ = "1.0.0"
