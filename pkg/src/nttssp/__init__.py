"""Somewhat-homomorphic signal processing over NTT-friendly rings."""
