"""Cluster-state Gaussian computation schemes: error analysis and minimal-error compilation."""
