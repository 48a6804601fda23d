"""Experiment harness and command line for structured Frank-Wolfe attacks."""
