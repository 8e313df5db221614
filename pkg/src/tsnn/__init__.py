"""Total-sensitivity-index feature selection and a feed-forward DDoS classifier."""

__version__ = "0.1.0"
