"""Sweep execution and report writers."""
