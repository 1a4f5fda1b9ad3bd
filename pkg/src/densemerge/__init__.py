"""densemerge: closed-loop benchmark for motion planners merging into dense traffic."""

__version__ = "0.1.0"
