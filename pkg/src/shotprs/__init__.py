"""Restricted Shapley contributions of football players to shot-ending actions."""
__version__ = "0.1.0"
