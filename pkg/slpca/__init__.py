# Semi-linear PCA: probabilistic semi-linear auto-associative models
__version__ = "1.0.0"
