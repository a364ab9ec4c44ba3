"""
IDEM: differential-entropy alignment metric and fine rigid registration.
"""

__version__ = "0.1.0"
