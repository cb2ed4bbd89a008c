"""Constraint-based causal discovery under latent confounding."""
