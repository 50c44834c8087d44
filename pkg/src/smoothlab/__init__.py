"""Randomized smoothing of noise-augmented classifiers."""
