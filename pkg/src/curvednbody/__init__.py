"""n-body problem on the positive space form M^2_R in stereographic coordinates."""

__version__ = "0.1.0"
