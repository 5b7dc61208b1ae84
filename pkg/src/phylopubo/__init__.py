"""Maximum-parsimony tree inference through PUBO models, classical search and simulated VQA."""

__version__ = "0.1.0"
