"""vvv: steer an image pipeline through its parameter space, one code at a time.

Every pipeline configuration is a single natural number.  The explorer
enumerates the integers around the current configuration's code, decodes
each one into candidate settings, renders every feasible candidate, and
lets a human selection re-center the search.
"""

__version__ = "0.1.0"
