"""
Tests package for the Interval RAP Toolkit.
Contains unit tests and end-to-end checks for the solvers and the CLI.
"""
